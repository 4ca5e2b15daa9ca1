#pragma once

// Gauss-Markov (Ornstein-Uhlenbeck) source model: exponential autocorrelation,
// the two closed-form sequences bounding its Karhunen-Loeve eigenvalues, and
// exact stationary path sampling.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oubounds {

inline constexpr double kPi = std::numbers::pi;

/// Parameters of the stationary OU process with autocorrelation
/// C(tau) = sigma^2/(2 eta) * exp(-eta |tau|) on the spatial interval [0, t0].
struct OuParams {
  double sigma;
  double eta;
  double t0;

  OuParams(double sigma_, double eta_, double t0_)
      : sigma(sigma_), eta(eta_), t0(t0_) {
    if (!(sigma > 0.0) || !(eta > 0.0) || !(t0 > 0.0)) {
      throw std::invalid_argument(
          "ou-process: sigma, eta and t0 must all be positive");
    }
  }

  /// C(0) = sigma^2 / (2 eta)
  double stationary_variance() const { return sigma * sigma / (2.0 * eta); }
};

inline double autocorrelation(const OuParams& p, double tau) {
  return p.stationary_variance() * std::exp(-p.eta * std::abs(tau));
}

/// K0 = floor(eta^2 t0^2 / pi^2 - 3/4). May be negative, in which case the
/// resonant branch of lambda_prime is never taken.
inline int k0_index(const OuParams& p) {
  return static_cast<int>(
      std::floor(p.eta * p.eta * p.t0 * p.t0 / (kPi * kPi) - 0.75));
}

/// Lower bounding sequence lambda'_k <= lambda_k.
inline double lambda_prime(const OuParams& p, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("ou-process: k must be >= 0");
  const double s2t2 = p.sigma * p.sigma * p.t0 * p.t0;
  if (k <= k0_index(p)) {
    const double kk = (static_cast<double>(k) + 0.5);
    return s2t2 / (kk * kk * kPi * kPi + p.eta * p.eta * p.t0 * p.t0);
  }
  const double kk = static_cast<double>(k) + 1.0;
  return s2t2 / (kk * kk * kPi * kPi);
}

/// Upper bounding sequence lambda''_k >= lambda_k.
inline double lambda_double_prime(const OuParams& p, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("ou-process: k must be >= 0");
  if (k <= 1) return p.sigma * p.sigma / (p.eta * p.eta);
  const double kk = static_cast<double>(k) - 1.0;
  return p.sigma * p.sigma * p.t0 * p.t0 / (kk * kk * kPi * kPi);
}

/// Analytic tail of an eigenvalue sequence: lambda_k = coefficient/(k+offset)^2
/// for every k at or beyond the stored head.
struct EigenTail {
  double coefficient;
  int index_offset;
};

enum class SpectrumKind { LowerPrime, UpperDoublePrime, Empirical };

/// Interval bracket for a sum evaluated with an analytic 1/k^2 tail.
struct SumBracket {
  double lower;
  double upper;
  double mid() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
};

/// An ordered eigenvalue sequence: an explicit head plus, for the analytic
/// bounding sequences, a pure c/(k+offset)^2 tail. Tail sums are always
/// evaluated through the telescoping bracket c/(m0) <= sum_{m>=m0} c/m^2
/// <= c/(m0-1), never by open-ended summation.
class EigenSequence {
 public:
  static EigenSequence lower_prime(const OuParams& p, int head_min = 64) {
    const int head_len = std::max(k0_index(p) + 1, head_min);
    std::vector<double> head(static_cast<std::size_t>(head_len));
    for (int k = 0; k < head_len; ++k) head[k] = lambda_prime(p, k);
    const double c = p.sigma * p.sigma * p.t0 * p.t0 / (kPi * kPi);
    return EigenSequence(SpectrumKind::LowerPrime, std::move(head),
                         EigenTail{c, +1});
  }

  static EigenSequence upper_double_prime(const OuParams& p,
                                          int head_min = 64) {
    const int head_len = std::max(k0_index(p) + 1, head_min);
    std::vector<double> head(static_cast<std::size_t>(head_len));
    for (int k = 0; k < head_len; ++k) head[k] = lambda_double_prime(p, k);
    const double c = p.sigma * p.sigma * p.t0 * p.t0 / (kPi * kPi);
    return EigenSequence(SpectrumKind::UpperDoublePrime, std::move(head),
                         EigenTail{c, -1});
  }

  /// Finite empirical spectrum (descending), e.g. eigenvalues of Sigma'_N.
  static EigenSequence empirical(std::vector<double> values) {
    if (values.empty()) {
      throw std::invalid_argument("ou-process: empirical spectrum is empty");
    }
    for (double v : values) {
      if (!(v > 0.0)) {
        throw std::invalid_argument(
            "ou-process: empirical spectrum entries must be positive");
      }
    }
    return EigenSequence(SpectrumKind::Empirical, std::move(values),
                         std::nullopt);
  }

  SpectrumKind kind() const { return kind_; }
  const std::vector<double>& head() const { return head_; }
  const std::optional<EigenTail>& tail() const { return tail_; }

  std::int64_t head_size() const {
    return static_cast<std::int64_t>(head_.size());
  }

  /// k-th eigenvalue; for tailed sequences valid for any k >= 0.
  double value(std::int64_t k) const {
    if (k < 0) throw std::invalid_argument("ou-process: k must be >= 0");
    if (k < head_size()) return head_[static_cast<std::size_t>(k)];
    if (!tail_) {
      throw std::out_of_range(
          "ou-process: index beyond an empirical spectrum");
    }
    const double m = static_cast<double>(k + tail_->index_offset);
    return tail_->coefficient / (m * m);
  }

  /// Largest eigenvalue of the sequence.
  double lambda0() const {
    double m = head_[0];
    for (double v : head_) m = std::max(m, v);
    return m;
  }

  /// sum_{j >= k} value(j) for k at or beyond the head, via the telescoping
  /// bracket around the analytic 1/m^2 tail.
  SumBracket tail_sum_from(std::int64_t k) const {
    if (!tail_) {
      if (k >= head_size()) return {0.0, 0.0};
      throw std::invalid_argument("ou-process: tail sum needs a tail");
    }
    if (k < head_size()) {
      throw std::invalid_argument("ou-process: tail sum starts inside head");
    }
    const std::int64_t m0 = k + tail_->index_offset;
    if (m0 < 2) throw std::logic_error("ou-process: degenerate tail start");
    const double c = tail_->coefficient;
    return {c / static_cast<double>(m0), c / static_cast<double>(m0 - 1)};
  }

  /// Full sum over the sequence (head exactly, tail bracketed).
  SumBracket total_sum() const {
    double h = 0.0;
    for (double v : head_) h += v;
    const SumBracket t = tail_sum_from(head_size());
    return {h + t.lower, h + t.upper};
  }

 private:
  EigenSequence(SpectrumKind kind, std::vector<double> head,
                std::optional<EigenTail> tail)
      : kind_(kind), head_(std::move(head)), tail_(tail) {}

  SpectrumKind kind_;
  std::vector<double> head_;
  std::optional<EigenTail> tail_;
};

/// Exact stationary draw of the OU process on a sorted grid: AR(1) transition
/// sampling, so the joint law is exactly N(0, C(t_i - t_j)) with no
/// discretization bias. Deterministic for a fixed seed.
inline std::vector<double> sample_path(const OuParams& p,
                                       const std::vector<double>& grid,
                                       std::uint64_t seed) {
  if (grid.empty()) return {};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i] > p.t0) {
      throw std::invalid_argument(
          "ou-process: grid position outside [0, t0]");
    }
    if (i > 0 && grid[i] < grid[i - 1]) {
      throw std::invalid_argument("ou-process: grid must be sorted ascending");
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double c0 = p.stationary_variance();
  std::vector<double> out(grid.size());
  out[0] = std::sqrt(c0) * gauss(rng);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double r = std::exp(-p.eta * (grid[i] - grid[i - 1]));
    const double innovation_sd = std::sqrt(c0 * (1.0 - r * r));
    out[i] = r * out[i - 1] + innovation_sd * gauss(rng);
  }
  return out;
}

}  // namespace oubounds
