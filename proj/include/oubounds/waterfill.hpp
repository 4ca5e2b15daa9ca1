#pragma once

// Reverse waterfilling on an eigenvalue sequence: R(theta), D(theta), the
// inverse theta(R), and the lower-bound distortion D'_p(C_u^N) evaluated on
// the lambda' sequence. Rates are in nats.
//
// Active sets over the analytic 1/k^2 tail are located in closed form
// (largest k with c/(k+offset)^2 > theta) and the tail's contribution to
// R(theta) uses the log-gamma telescoping sum, so no loop length depends on
// how small theta is.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "oubounds/ou_process.hpp"

namespace oubounds {

struct WaterfillPoint {
  double theta;
  double rate;        // nats
  double distortion;
};

namespace detail {

/// Largest tail index k (>= head size) with value(k) > theta, or head_size-1
/// if the tail is entirely below theta.
inline std::int64_t last_active_tail_index(const EigenSequence& seq,
                                           double theta) {
  const auto& tail = seq.tail();
  const std::int64_t head = seq.head_size();
  if (!tail) return head - 1;
  const double c = tail->coefficient;
  // c/(k+off)^2 > theta  <=>  k < sqrt(c/theta) - off
  std::int64_t k = static_cast<std::int64_t>(
      std::floor(std::sqrt(c / theta) - tail->index_offset));
  while (seq.value(std::max(k + 1, head)) > theta) ++k;
  while (k >= head && seq.value(k) <= theta) --k;
  return std::max(k, head - 1);
}

}  // namespace detail

/// R(theta) = sum_k max(0, 1/2 log(lambda_k / theta)).
inline double rate_of_theta(const EigenSequence& seq, double theta) {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("rate-distortion: theta must be positive");
  }
  double rate = 0.0;
  for (double v : seq.head()) {
    if (v > theta) rate += 0.5 * std::log(v / theta);
  }
  const std::int64_t k_last = detail::last_active_tail_index(seq, theta);
  const std::int64_t head = seq.head_size();
  if (k_last >= head) {
    // sum_{k=head}^{k_last} 1/2 log(c/((k+off)^2 theta))
    const auto& tail = *seq.tail();
    const double m_lo = static_cast<double>(head + tail.index_offset);
    const double m_hi = static_cast<double>(k_last + tail.index_offset);
    const double count = static_cast<double>(k_last - head + 1);
    const double log_prod = std::lgamma(m_hi + 1.0) - std::lgamma(m_lo);
    rate += 0.5 * count * std::log(tail.coefficient / theta) - log_prod;
  }
  return rate;
}

/// D(theta) = T0^{-1} sum_k min(theta, lambda_k) with the inactive tail summed
/// analytically; returns the bracket induced by the telescoping tail bounds.
inline SumBracket distortion_of_theta_bracket(const EigenSequence& seq,
                                              double theta, double t0) {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("rate-distortion: theta must be positive");
  }
  if (!(t0 > 0.0)) {
    throw std::invalid_argument("rate-distortion: t0 must be positive");
  }
  std::int64_t active = 0;
  double inactive_head = 0.0;
  for (double v : seq.head()) {
    if (v > theta) {
      ++active;
    } else {
      inactive_head += v;
    }
  }
  SumBracket inactive_tail{0.0, 0.0};
  if (seq.tail()) {
    const std::int64_t k_last = detail::last_active_tail_index(seq, theta);
    active += std::max<std::int64_t>(k_last - seq.head_size() + 1, 0);
    inactive_tail =
        seq.tail_sum_from(std::max(k_last + 1, seq.head_size()));
  }
  const double coded = theta * static_cast<double>(active);
  return {(coded + inactive_head + inactive_tail.lower) / t0,
          (coded + inactive_head + inactive_tail.upper) / t0};
}

inline double distortion_of_theta(const EigenSequence& seq, double theta,
                                  double t0) {
  return distortion_of_theta_bracket(seq, theta, t0).mid();
}

/// Inverse of R(theta): bisection on log theta over (theta_lo, lambda_0].
inline double theta_of_rate(const EigenSequence& seq, double rate, double t0,
                            double tol = 1e-10) {
  (void)t0;  // the inversion itself does not depend on the normalization
  if (!(rate > 0.0)) {
    throw std::invalid_argument("rate-distortion: rate must be positive");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("rate-distortion: tol must be positive");
  }
  const double lambda0 = seq.lambda0();
  double theta_lo = lambda0;
  while (rate_of_theta(seq, theta_lo) <= rate) {
    theta_lo *= 0.25;
    if (theta_lo < 1e-300) {
      throw std::runtime_error(
          "rate-distortion: could not bracket the requested rate");
    }
  }
  double lo = std::log(theta_lo);   // rate(lo) > target
  double hi = std::log(lambda0);    // rate(hi) = 0 < target
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double r = rate_of_theta(seq, std::exp(mid));
    if (std::abs(r - rate) <= tol * rate) return std::exp(mid);
    (r > rate ? lo : hi) = mid;
  }
  throw std::runtime_error(
      "rate-distortion: bisection did not reach the requested tolerance "
      "(tol too tight for double precision?)");
}

inline WaterfillPoint waterfill_at_rate(const EigenSequence& seq, double rate,
                                        double t0, double tol = 1e-10) {
  const double theta = theta_of_rate(seq, rate, t0, tol);
  return {theta, rate_of_theta(seq, theta), distortion_of_theta(seq, theta, t0)};
}

/// D'_p(capacity): the source-coding lower bound evaluated on the lambda'
/// sequence; lambda'' gives a looser but valid variant.
inline double lower_bound_distortion(
    const OuParams& p, double capacity,
    SpectrumKind kind = SpectrumKind::LowerPrime) {
  if (!(capacity > 0.0)) {
    throw std::invalid_argument("rate-distortion: capacity must be positive");
  }
  if (kind == SpectrumKind::Empirical) {
    throw std::invalid_argument(
        "rate-distortion: lower bound needs an analytic bounding sequence");
  }
  const EigenSequence seq = kind == SpectrumKind::LowerPrime
                                ? EigenSequence::lower_prime(p)
                                : EigenSequence::upper_double_prime(p);
  return distortion_of_theta(seq, theta_of_rate(seq, capacity, p.t0), p.t0);
}

}  // namespace oubounds
