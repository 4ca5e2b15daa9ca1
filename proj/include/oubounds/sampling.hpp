#pragma once

// Sample covariance structures for the equally spaced sensor grid and the
// exact reconstruction distortion D_s^N from noiseless samples.
//
// Two linear-algebra routes are provided. The dense route factorizes Sigma_N
// with a Cholesky decomposition. The Markov route exploits that the precision
// matrix Sigma_N^{-1} of the OU samples is tridiagonal: inside a gap the
// conditional variance given all samples equals the conditional variance given
// the two neighboring samples, which is closed form and O(1) per point.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oubounds/ou_process.hpp"
#include "oubounds/quadrature.hpp"

namespace oubounds {

/// Equally spaced sensor positions t_i = (i-1) t0/(N-1), t_1 = 0, t_N = t0.
class SampleGeometry {
 public:
  SampleGeometry(int n, double t0) : n_(n), t0_(t0) {
    if (n < 2) throw std::invalid_argument("sampling-mmse: need n >= 2");
    if (!(t0 > 0.0)) throw std::invalid_argument("sampling-mmse: t0 > 0");
    positions_.resize(static_cast<std::size_t>(n));
    const double spacing = t0 / (n - 1);
    for (int i = 0; i < n; ++i) positions_[i] = i * spacing;
    positions_.back() = t0;  // exact endpoint
  }

  int n() const { return n_; }
  double t0() const { return t0_; }
  double spacing() const { return t0_ / (n_ - 1); }
  const std::vector<double>& positions() const { return positions_; }

 private:
  int n_;
  double t0_;
  std::vector<double> positions_;
};

enum class SolvePath { Dense, MarkovFast };

/// Dense Sigma_N with a Cholesky factorization handle for repeated solves.
class CovarianceSystem {
 public:
  CovarianceSystem(const OuParams& p, const SampleGeometry& g)
      : params_(p), geometry_(g) {
    const int n = g.n();
    sigma_.resize(n, n);
    const auto& t = g.positions();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        sigma_(i, j) = autocorrelation(p, t[i] - t[j]);
      }
    }
    llt_.compute(sigma_);
    if (llt_.info() != Eigen::Success) {
      throw std::runtime_error(
          "sampling-mmse: Cholesky factorization of Sigma_N failed "
          "(degenerate geometry?)");
    }
  }

  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const OuParams& params() const { return params_; }
  const SampleGeometry& geometry() const { return geometry_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    return llt_.solve(rhs);
  }

  /// rho^T Sigma_N^{-1} rho
  double quad_form_inv(const Eigen::VectorXd& rho) const {
    return rho.dot(llt_.solve(rho));
  }

  /// Cross-covariance vector rho_N(t), entries C(t - t_i).
  Eigen::VectorXd rho(double t) const {
    const auto& pos = geometry_.positions();
    Eigen::VectorXd out(geometry_.n());
    for (int i = 0; i < geometry_.n(); ++i) {
      out[i] = autocorrelation(params_, t - pos[i]);
    }
    return out;
  }

 private:
  OuParams params_;
  SampleGeometry geometry_;
  Eigen::MatrixXd sigma_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

inline CovarianceSystem build_covariance(const OuParams& p,
                                         const SampleGeometry& g) {
  return CovarianceSystem(p, g);
}

/// Tridiagonal precision matrix of the uniform OU sample covariance, plus the
/// closed forms it buys: O(1) per-point conditional variance inside a gap,
/// O(N) shifted solves, and O(N^2) eigenvalues of Sigma_N.
class MarkovPrecision {
 public:
  MarkovPrecision(const OuParams& p, const SampleGeometry& g)
      : params_(p), geometry_(g) {
    const int n = g.n();
    const double c0 = p.stationary_variance();
    const double r = std::exp(-p.eta * g.spacing());
    const double scale = 1.0 / (c0 * (1.0 - r * r));
    diag_.assign(static_cast<std::size_t>(n), (1.0 + r * r) * scale);
    diag_.front() = scale;
    diag_.back() = scale;
    sub_.assign(static_cast<std::size_t>(n - 1), -r * scale);
  }

  const std::vector<double>& diagonal() const { return diag_; }
  const std::vector<double>& subdiagonal() const { return sub_; }

  /// P v
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    const int n = static_cast<int>(diag_.size());
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
      double s = diag_[i] * v[i];
      if (i > 0) s += sub_[i - 1] * v[i - 1];
      if (i + 1 < n) s += sub_[i] * v[i + 1];
      out[i] = s;
    }
    return out;
  }

  /// Solve (shift I + scale P) x = b by the Thomas algorithm. The matrix is
  /// symmetric positive definite for shift >= 0, scale > 0.
  Eigen::VectorXd solve_shifted(double shift, double scale,
                                const Eigen::VectorXd& b) const {
    const int n = static_cast<int>(diag_.size());
    Eigen::VectorXd c(n - 1), d(n), x(n);
    double piv = shift + scale * diag_[0];
    c[0] = scale * sub_[0] / piv;
    d[0] = b[0] / piv;
    for (int i = 1; i < n; ++i) {
      const double off = scale * sub_[i - 1];
      piv = shift + scale * diag_[i] - off * c[i - 1];
      if (i < n - 1) c[i] = scale * sub_[i] / piv;
      d[i] = (b[i] - off * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
    return x;
  }

  /// Var(S(t) | all samples) for t at distance a from the left neighbor and
  /// b from the right one. Markov property: only the two neighbors matter.
  double conditional_variance(double a, double b) const {
    const double c0 = params_.stationary_variance();
    const double ra = std::exp(-params_.eta * a);
    const double rb = std::exp(-params_.eta * b);
    const double rd = std::exp(-params_.eta * (a + b));
    return c0 *
           (1.0 - (ra * ra + rb * rb - 2.0 * ra * rb * rd) / (1.0 - rd * rd));
  }

  /// Conditional-mean weights (w_left, w_right) for t between two neighbors.
  std::pair<double, double> conditional_weights(double a, double b) const {
    const double ra = std::exp(-params_.eta * a);
    const double rb = std::exp(-params_.eta * b);
    const double rd = std::exp(-params_.eta * (a + b));
    const double den = 1.0 - rd * rd;
    return {(ra - rb * rd) / den, (rb - ra * rd) / den};
  }

  /// Eigenvalues of Sigma_N (descending) as reciprocals of the tridiagonal
  /// precision spectrum; QL iteration on the tridiagonal form, O(N^2).
  std::vector<double> covariance_eigenvalues() const {
    const int n = static_cast<int>(diag_.size());
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag_.data(), n);
    Eigen::VectorXd e =
        Eigen::Map<const Eigen::VectorXd>(sub_.data(), n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error(
          "sampling-mmse: tridiagonal eigensolver failed");
    }
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      mu[static_cast<std::size_t>(i)] = 1.0 / solver.eigenvalues()[n - 1 - i];
    }
    std::sort(mu.begin(), mu.end(), std::greater<double>());
    return mu;
  }

 private:
  OuParams params_;
  SampleGeometry geometry_;
  std::vector<double> diag_;
  std::vector<double> sub_;
};

namespace detail {

/// Dense evaluation of D_s^N: batched triangular solves over the quadrature
/// nodes, processed in bounded-size column blocks.
inline double distortion_from_samples_dense(const OuParams& p,
                                            const SampleGeometry& g,
                                            const QuadratureRule& rule) {
  const CovarianceSystem cov(p, g);
  const int n = g.n();
  const int q = static_cast<int>(rule.nodes.size());
  const auto& t = g.positions();
  const double c0 = p.stationary_variance();
  const Eigen::LLT<Eigen::MatrixXd> llt(cov.sigma());

  const int total_nodes = (n - 1) * q;
  const int block = std::min(total_nodes, 1024);
  Eigen::MatrixXd rhos(n, block);
  std::vector<double> node_weight(static_cast<std::size_t>(block));

  double acc = 0.0;
  int col = 0;
  auto flush = [&]() {
    auto cols = rhos.leftCols(col);
    llt.matrixL().solveInPlace(cols);  // integrand = C(0) - ||L^{-1} rho||^2
    for (int c = 0; c < col; ++c) {
      acc += node_weight[static_cast<std::size_t>(c)] *
             (c0 - cols.col(c).squaredNorm());
    }
    col = 0;
  };
  for (int i = 0; i + 1 < n; ++i) {
    const double mid = 0.5 * (t[i] + t[i + 1]);
    const double half = 0.5 * (t[i + 1] - t[i]);
    for (int j = 0; j < q; ++j) {
      rhos.col(col) = cov.rho(mid + half * rule.nodes[j]);
      node_weight[static_cast<std::size_t>(col)] = rule.weights[j] * half;
      if (++col == block) flush();
    }
  }
  flush();
  return acc / g.t0();
}

/// Markov-route evaluation: the integrand is identical over every interior
/// gap, so one gap's rule evaluation covers all of them.
inline double distortion_from_samples_markov(const OuParams& p,
                                             const SampleGeometry& g,
                                             const QuadratureRule& rule) {
  const MarkovPrecision prec(p, g);
  const double spacing = g.spacing();
  double gap_integral = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double a = 0.5 * spacing * (rule.nodes[j] + 1.0);
    gap_integral += rule.weights[j] * 0.5 * spacing *
                    prec.conditional_variance(a, spacing - a);
  }
  return gap_integral * (g.n() - 1) / g.t0();
}

}  // namespace detail

/// D_s^N: expected distortion of the linear MMSE reconstruction from the N
/// noiseless samples, integrated by per-gap Gauss-Legendre quadrature.
inline double distortion_from_samples(const OuParams& p,
                                      const SampleGeometry& g, int quad_order,
                                      SolvePath path = SolvePath::Dense) {
  const QuadratureRule rule = gauss_legendre(quad_order);
  return path == SolvePath::Dense
             ? detail::distortion_from_samples_dense(p, g, rule)
             : detail::distortion_from_samples_markov(p, g, rule);
}

struct MonteCarloResult {
  double mean;
  double std_error;
};

/// Empirical validation of D_s^N: draws exact OU paths on the union of sensor
/// positions and quadrature nodes, reconstructs with the MMSE weights, and
/// integrates the squared error with the same rule as the analytic value.
inline MonteCarloResult monte_carlo_distortion(const OuParams& p,
                                               const SampleGeometry& g,
                                               int trials, int quad_order,
                                               std::uint64_t seed) {
  if (trials < 100) {
    throw std::invalid_argument("sampling-mmse: need trials >= 100");
  }
  const QuadratureRule rule = gauss_legendre(quad_order);
  const CovarianceSystem cov(p, g);
  const int n = g.n();
  const int q = quad_order;
  const auto& t = g.positions();

  std::vector<double> nodes;
  std::vector<double> weights;
  nodes.reserve(static_cast<std::size_t>((n - 1) * q));
  weights.reserve(nodes.capacity());
  for (int i = 0; i + 1 < n; ++i) {
    const double mid = 0.5 * (t[i] + t[i + 1]);
    const double half = 0.5 * (t[i + 1] - t[i]);
    for (int j = 0; j < q; ++j) {
      nodes.push_back(mid + half * rule.nodes[j]);
      weights.push_back(rule.weights[j] * half);
    }
  }

  // MMSE weights per node, precomputed once: w(t) = Sigma^{-1} rho(t).
  Eigen::MatrixXd w(n, static_cast<int>(nodes.size()));
  for (std::size_t c = 0; c < nodes.size(); ++c) {
    w.col(static_cast<int>(c)) = cov.solve(cov.rho(nodes[c]));
  }

  // merged simulation grid: sensors + nodes, sorted
  std::vector<double> grid = t;
  grid.insert(grid.end(), nodes.begin(), nodes.end());
  std::sort(grid.begin(), grid.end());
  std::vector<std::size_t> sensor_idx(static_cast<std::size_t>(n));
  std::vector<std::size_t> node_idx(nodes.size());
  for (int i = 0; i < n; ++i) {
    sensor_idx[static_cast<std::size_t>(i)] = static_cast<std::size_t>(
        std::lower_bound(grid.begin(), grid.end(), t[i]) - grid.begin());
  }
  for (std::size_t c = 0; c < nodes.size(); ++c) {
    node_idx[c] = static_cast<std::size_t>(
        std::lower_bound(grid.begin(), grid.end(), nodes[c]) - grid.begin());
  }

  double sum = 0.0;
  double sum_sq = 0.0;
  Eigen::VectorXd samples(n);
  for (int trial = 0; trial < trials; ++trial) {
    // per-trial seed derived deterministically from the master seed
    const std::vector<double> path = sample_path(
        p, grid, seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(
                            trial + 1));
    for (int i = 0; i < n; ++i) samples[i] = path[sensor_idx[i]];
    double err = 0.0;
    for (std::size_t c = 0; c < nodes.size(); ++c) {
      const double est = w.col(static_cast<int>(c)).dot(samples);
      const double diff = path[node_idx[c]] - est;
      err += weights[c] * diff * diff;
    }
    err /= g.t0();
    sum += err;
    sum_sq += err * err;
  }
  const double mean = sum / trials;
  const double var = (sum_sq - trials * mean * mean) / (trials - 1);
  return {mean, std::sqrt(std::max(var, 0.0) / trials)};
}

}  // namespace oubounds
