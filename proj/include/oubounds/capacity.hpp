#pragma once

// Channel-side quantities: the point-to-point capacity upper bound C_u^N, the
// achievable cooperative rate C_a^N = beta log(N P(N)), and the five-region
// sum-power classifier. Regime boundaries are asymptotic statements, so power
// laws are compared symbolically on growth order, never numerically at a
// finite N.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oubounds {

enum class PowerForm { Constant, LinearPerNode, PowerOfN, ExpRootOverN };

/// Sum power constraint P(N). Every supported form reduces to
/// P(N) ~ coef * e^{N^r} * N^q, which makes growth-order comparison and the
/// limit L = lim log P(N) / log(N P(N)) exact.
class PowerLaw {
 public:
  static PowerLaw constant(double p_tot) {
    check_positive(p_tot);
    return PowerLaw(PowerForm::Constant, p_tot, 0.0, 0.0);
  }
  static PowerLaw linear_per_node(double p_ind) {
    check_positive(p_ind);
    return PowerLaw(PowerForm::LinearPerNode, p_ind, 0.0, 1.0);
  }
  static PowerLaw power_of_n(double coef, double exponent) {
    check_positive(coef);
    return PowerLaw(PowerForm::PowerOfN, coef, 0.0, exponent);
  }
  /// e^{N^r} / N
  static PowerLaw exp_root_over_n(double root_exponent) {
    return exp_root_times_power(root_exponent, -1.0);
  }
  /// coef * e^{N^r} * N^q (q defaults to -1 in exp_root_over_n)
  static PowerLaw exp_root_times_power(double root_exponent,
                                       double poly_exponent,
                                       double coef = 1.0) {
    check_positive(coef);
    if (!(root_exponent > 0.0)) {
      throw std::invalid_argument("capacity: root exponent must be positive");
    }
    return PowerLaw(PowerForm::ExpRootOverN, coef, root_exponent,
                    poly_exponent);
  }

  PowerForm form() const { return form_; }
  double coefficient() const { return coef_; }

  /// growth descriptor exponents: P(N) ~ e^{N^r} N^q
  double growth_root() const { return root_; }
  double growth_poly() const { return poly_; }

  double operator()(double n) const { return std::exp(log_value(n)); }

  /// log P(N), exact and overflow-free for every form
  double log_value(double n) const {
    double v = std::log(coef_) + poly_ * std::log(n);
    if (root_ > 0.0) v += std::pow(n, root_);
    return v;
  }

  std::string describe() const {
    std::ostringstream os;
    switch (form_) {
      case PowerForm::Constant:
        os << "P_tot=" << coef_;
        break;
      case PowerForm::LinearPerNode:
        os << "N*P_ind, P_ind=" << coef_;
        break;
      case PowerForm::PowerOfN:
        os << coef_ << "*N^" << poly_;
        break;
      case PowerForm::ExpRootOverN:
        if (coef_ != 1.0) os << coef_ << "*";
        os << "e^(N^" << root_ << ")*N^" << poly_;
        break;
    }
    return os.str();
  }

 private:
  PowerLaw(PowerForm form, double coef, double root, double poly)
      : form_(form), coef_(coef), root_(root), poly_(poly) {}

  static void check_positive(double v) {
    if (!(v > 0.0)) {
      throw std::invalid_argument(
          "capacity: power law coefficients must be positive");
    }
  }

  PowerForm form_;
  double coef_;
  double root_;  // 0 when no exponential factor
  double poly_;
};

enum class RegimeLabel { VeryLarge, Large, Medium, Small, VerySmall };

inline std::string_view to_string(RegimeLabel r) {
  switch (r) {
    case RegimeLabel::VeryLarge: return "very_large";
    case RegimeLabel::Large: return "large";
    case RegimeLabel::Medium: return "medium";
    case RegimeLabel::Small: return "small";
    case RegimeLabel::VerySmall: return "very_small";
  }
  return "unknown";
}

struct NetworkConfig {
  int n;
  PowerLaw power;
  double h;      // collector channel gain, identical across sensors
  double alpha;  // path-loss exponent

  NetworkConfig(int n_, PowerLaw power_, double h_, double alpha_)
      : n(n_), power(std::move(power_)), h(h_), alpha(alpha_) {
    if (n < 2) throw std::invalid_argument("capacity: need n >= 2");
    if (!(h > 0.0)) throw std::invalid_argument("capacity: h must be positive");
    if (!(alpha > 0.0)) {
      throw std::invalid_argument("capacity: alpha must be positive");
    }
  }

  /// true when alpha falls outside the typical [2, 6] path-loss range;
  /// such configs are accepted but flagged
  bool alpha_atypical() const { return alpha < 2.0 || alpha > 6.0; }
};

namespace detail {

/// Compare growth orders of e^{N^r1} N^q1 vs e^{N^r2} N^q2.
inline int growth_compare(double r1, double q1, double r2, double q2) {
  if (r1 != r2) return r1 < r2 ? -1 : 1;
  if (q1 != q2) return q1 < q2 ? -1 : 1;
  return 0;
}

inline int compare_with(const PowerLaw& pl, double r, double q) {
  return growth_compare(pl.growth_root(), pl.growth_poly(), r, q);
}

}  // namespace detail

/// Five-region classification of P(N); ties on growth order are assigned to
/// the lower (slower-power) region.
inline RegimeLabel classify_regime(const PowerLaw& pl, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("capacity: alpha must be positive");
  }
  if (detail::compare_with(pl, 1.0, -1.0) > 0) return RegimeLabel::VeryLarge;
  if (detail::compare_with(pl, 1.0 / 3.0, -1.0) > 0) return RegimeLabel::Large;
  const double small_top = -1.0 / (1.0 + 1.0 / alpha);  // N^{-alpha/(alpha+1)}
  if (detail::compare_with(pl, 0.0, small_top) > 0) return RegimeLabel::Medium;
  if (detail::compare_with(pl, 0.0, -1.0) > 0) return RegimeLabel::Small;
  return RegimeLabel::VerySmall;
}

/// C_u^N = 1/2 log(1 + h^2 N P(N)) in nats; log-domain evaluation keeps the
/// exponential power laws finite.
inline double capacity_upper(const NetworkConfig& cfg) {
  const double log_snr = 2.0 * std::log(cfg.h) +
                         std::log(static_cast<double>(cfg.n)) +
                         cfg.power.log_value(cfg.n);
  if (log_snr > 36.0) return 0.5 * log_snr;  // 1+x indistinguishable from x
  return 0.5 * std::log1p(std::exp(log_snr));
}

/// Signals that a power law violates the achievable-rate growth condition
/// lim 1/(N P(N)^{1+1/alpha}) = 0; callers should take the constant-rate
/// branch instead of using beta.
struct RegimeError : std::runtime_error {
  explicit RegimeError(const std::string& what) : std::runtime_error(what) {}
};

/// Condition for C_a^N = beta log(N P(N)) to grow:
/// lim 1/(N P(N)^{1+1/alpha}) = 0.
inline bool achievable_rate_condition(const PowerLaw& pl, double alpha) {
  const double gamma = 1.0 + 1.0 / alpha;
  // N P^gamma ~ e^{gamma N^r} N^{q gamma + 1} -> infinity?
  if (pl.growth_root() > 0.0) return true;
  return pl.growth_poly() * gamma + 1.0 > 0.0;
}

/// Condition for the achievable spectrum analysis:
/// lim N P(N) / e^{N^{1/3}} = 0.
inline bool spectrum_window_condition(const PowerLaw& pl) {
  // N P ~ e^{N^r} N^{q+1} below e^{N^{1/3}}?
  const int c = detail::growth_compare(pl.growth_root(), pl.growth_poly() + 1.0,
                                       1.0 / 3.0, 0.0);
  return c < 0;
}

/// L = lim log P(N) / log(N P(N)) for the supported forms.
inline double power_limit_ratio(const PowerLaw& pl) {
  switch (pl.form()) {
    case PowerForm::Constant:
      return 0.0;
    case PowerForm::LinearPerNode:
      return 0.5;
    case PowerForm::PowerOfN: {
      const double p = pl.growth_poly();
      if (p <= -1.0) {
        throw RegimeError(
            "capacity: L undefined for N^p with p <= -1 (N P(N) does not "
            "grow)");
      }
      return p / (1.0 + p);
    }
    case PowerForm::ExpRootOverN:
      return 1.0;  // log P and log NP are both dominated by N^r
  }
  throw std::logic_error("capacity: unreachable power form");
}

/// beta = (1 + L/alpha) / (4 (1 + 1/alpha)), valid only under the
/// achievable-rate growth condition.
inline double beta_constant(const PowerLaw& pl, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("capacity: alpha must be positive");
  }
  if (!achievable_rate_condition(pl, alpha)) {
    throw RegimeError(
        "capacity: power law violates lim 1/(N P^{1+1/alpha}) = 0; the "
        "achievable rate approaches a constant instead of beta log(N P(N))");
  }
  const double limit = power_limit_ratio(pl);
  return (1.0 + limit / alpha) / (4.0 * (1.0 + 1.0 / alpha));
}

struct AchievableRate {
  double value;  // nats; 0 in the constant-rate fallback
  bool growing;  // false: the beta log(NP) form does not apply
};

/// C_a^N: beta log(N P(N)) when the growth condition holds, otherwise a
/// flagged zero (the constant-rate fallback has no closed form to report).
inline AchievableRate capacity_achievable(const NetworkConfig& cfg) {
  if (!achievable_rate_condition(cfg.power, cfg.alpha)) {
    return {0.0, false};
  }
  const double log_np =
      std::log(static_cast<double>(cfg.n)) + cfg.power.log_value(cfg.n);
  return {beta_constant(cfg.power, cfg.alpha) * log_np, true};
}

}  // namespace oubounds
