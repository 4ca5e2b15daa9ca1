#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oubounds/achievable.hpp"

using namespace oubounds;
using Catch::Approx;

TEST_CASE("scaled spectrum trace identity") {
  const OuParams p(1.0, 1.0, 1.0);
  const auto spec = scaled_spectrum(p, SampleGeometry(11, 1.0));
  CHECK(spec.trace() == Approx(0.55).epsilon(1e-12));
  // general form (T0/(N-1)) * N * C(0)
  const OuParams q(2.0, 0.5, 3.0);
  const auto sq = scaled_spectrum(q, SampleGeometry(7, 3.0));
  CHECK(sq.trace() == Approx(3.0 / 6.0 * 7.0 * 4.0).epsilon(1e-12));
}

TEST_CASE("N=2 spectrum has the closed form T0 (C(0) +- C(T0))") {
  const OuParams p(1.0, 1.0, 1.0);
  const auto spec = scaled_spectrum(p, SampleGeometry(2, 1.0));
  const double c0 = 0.5, ct = 0.5 * std::exp(-1.0);
  REQUIRE(spec.mu.size() == 2);
  CHECK(spec.mu[0] == Approx(c0 + ct).epsilon(1e-12));
  CHECK(spec.mu[1] == Approx(c0 - ct).epsilon(1e-12));
  const auto fast = scaled_spectrum(p, SampleGeometry(2, 1.0),
                                    SolvePath::MarkovFast);
  CHECK(fast.mu[0] == Approx(spec.mu[0]).epsilon(1e-12));
  CHECK(fast.mu[1] == Approx(spec.mu[1]).epsilon(1e-12));
}

TEST_CASE("dense and tridiagonal spectra agree") {
  const OuParams p(1.0, 1.0, 1.0);
  for (int n : {50, 200}) {
    const SampleGeometry g(n, 1.0);
    const auto dense = scaled_spectrum(p, g, SolvePath::Dense);
    const auto fast = scaled_spectrum(p, g, SolvePath::MarkovFast);
    for (int k = 0; k < n; ++k) {
      CAPTURE(n, k);
      REQUIRE(fast.mu[static_cast<std::size_t>(k)] ==
              Approx(dense.mu[static_cast<std::size_t>(k)]).epsilon(1e-9));
    }
  }
}

TEST_CASE("spectrum is positive and nonincreasing") {
  const OuParams p(1.0, 1.0, 1.0);
  const auto spec = scaled_spectrum(p, SampleGeometry(80, 1.0));
  for (std::size_t k = 0; k + 1 < spec.mu.size(); ++k) {
    REQUIRE(spec.mu[k] >= spec.mu[k + 1]);
    REQUIRE(spec.mu[k + 1] > 0.0);
  }
}

TEST_CASE("spectrum head lands between the bounding sequences at N=200") {
  const OuParams p(1.0, 1.0, 1.0);
  const auto spec = scaled_spectrum(p, SampleGeometry(200, 1.0));
  for (int k = 0; k <= 10; ++k) {
    const double eps = 0.05 * lambda_double_prime(p, k);
    CAPTURE(k);
    CHECK(spec.mu[static_cast<std::size_t>(k)] >= lambda_prime(p, k) - eps);
    CHECK(spec.mu[static_cast<std::size_t>(k)] <=
          lambda_double_prime(p, k) + eps);
  }
}

TEST_CASE("spectrum converges as N doubles") {
  const OuParams p(1.0, 1.0, 1.0);
  const auto m50 = scaled_spectrum(p, SampleGeometry(50, 1.0));
  const auto m100 = scaled_spectrum(p, SampleGeometry(100, 1.0));
  const auto m200 = scaled_spectrum(p, SampleGeometry(200, 1.0));
  const auto m400 = scaled_spectrum(p, SampleGeometry(400, 1.0));
  for (int k = 0; k <= 5; ++k) {
    const double d1 = std::abs(m100.mu[k] - m50.mu[k]);
    const double d2 = std::abs(m200.mu[k] - m100.mu[k]);
    const double d3 = std::abs(m400.mu[k] - m200.mu[k]);
    CAPTURE(k, d1, d2, d3);
    CHECK(d2 <= d1);
    CHECK(d3 <= d2);
  }
}

TEST_CASE("achievable rate closed form at N=2") {
  const OuParams p(1.0, 1.0, 1.0);
  const auto spec = scaled_spectrum(p, SampleGeometry(2, 1.0));
  // frozen hand computation at theta' = 0.1
  CHECK(rate_achievable_of_theta(spec, 0.1) ==
        Approx(1.7424109553061742).epsilon(1e-12));
  CHECK(distortion_second_term(spec, 0.1, 1.0) ==
        Approx(0.1632089383707115).epsilon(1e-12));
}

TEST_CASE("achievable rate decreases to zero in theta'") {
  const OuParams p(1.0, 1.0, 1.0);
  const auto spec = scaled_spectrum(p, SampleGeometry(32, 1.0));
  double prev = rate_achievable_of_theta(spec, 1e-4);
  for (double th = 3e-4; th < 1e3; th *= 3.0) {
    const double r = rate_achievable_of_theta(spec, th);
    REQUIRE(r < prev);
    prev = r;
  }
  CHECK(rate_achievable_of_theta(spec, 1e12) < 1e-9);
  CHECK_THROWS_AS(rate_achievable_of_theta(spec, 0.0), std::invalid_argument);
}

TEST_CASE("second distortion term saturates and is dominated") {
  const OuParams p(1.0, 1.0, 1.0);
  const int n = 24;
  const auto spec = scaled_spectrum(p, SampleGeometry(n, 1.0));
  // theta' -> infinity: sum of mu / T0 = N C(0) / (N-1)
  CHECK(distortion_second_term(spec, 1e14, 1.0) ==
        Approx(n * 0.5 / (n - 1)).epsilon(1e-9));
  // each summand is at most min(theta', mu_k)
  for (double th : {0.01, 0.2, 5.0}) {
    double min_sum = 0.0;
    for (double mu : spec.mu) min_sum += std::min(th, mu);
    CHECK(distortion_second_term(spec, th, 1.0) <= min_sum + 1e-14);
  }
}

TEST_CASE("theta_achievable_of_rate round trips and handles extremes") {
  const OuParams p(1.0, 1.0, 1.0);
  const auto spec = scaled_spectrum(p, SampleGeometry(64, 1.0));
  for (double r : {0.1, 1.0, 10.0, 80.0}) {
    const double th = theta_achievable_of_rate(spec, r);
    CHECK(std::abs(rate_achievable_of_theta(spec, th) - r) <= 1e-9 * r);
  }
  // tiny rate: large theta', D_b near its saturation value
  const double th = theta_achievable_of_rate(spec, 1e-4);
  CHECK(th > 100.0);
  CHECK(distortion_second_term(spec, th, 1.0) >=
        0.9 * 64.0 * 0.5 / 63.0);
  CHECK_THROWS_AS(theta_achievable_of_rate(spec, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(theta_achievable_of_rate(spec, 1.0, 0.0),
                  std::invalid_argument);
  // a rate beyond what any representable theta' can produce fails to bracket
  CHECK_THROWS_AS(theta_achievable_of_rate(spec, 1e7), std::runtime_error);
}

TEST_CASE("regularized distortion recovers D_s as theta' vanishes") {
  const OuParams p(1.0, 1.0, 1.0);
  const SampleGeometry g(16, 1.0);
  const double ds = distortion_from_samples(p, g, 16);
  CHECK(distortion_achievable(p, g, 1e-12, 16) == Approx(ds).margin(1e-6));
}

TEST_CASE("regularized distortion is monotone and below C(0)") {
  const OuParams p(1.0, 1.0, 1.0);
  const SampleGeometry g(16, 1.0);
  double prev = 0.0;
  for (double th : {1e-6, 1e-3, 0.05, 0.3, 2.0, 50.0}) {
    const double d = distortion_achievable(p, g, th, 16);
    CHECK(d >= prev - 1e-12);
    CHECK(d <= p.stationary_variance() + 1e-12);
    CHECK(d > 0.0);
    prev = d;
  }
}

TEST_CASE("dense and markov achievable distortion agree") {
  const OuParams p(1.0, 1.0, 1.0);
  for (int n : {16, 64}) {
    const SampleGeometry g(n, 1.0);
    for (double th : {0.01, 0.3}) {
      const double dense =
          distortion_achievable(p, g, th, 12, SolvePath::Dense);
      const double fast =
          distortion_achievable(p, g, th, 12, SolvePath::MarkovFast);
      CAPTURE(n, th);
      CHECK(dense == Approx(fast).epsilon(1e-10));
    }
  }
}

TEST_CASE("validity window sequences satisfy their limit trends") {
  const OuParams p(1.0, 1.0, 1.0);
  double prev_scaled = 0.0, prev_hi = 1e9;
  for (int n : {16, 64, 256, 1024, 4096}) {
    const auto win = validity_window(p, n);
    REQUIRE(win.theta_lo < win.theta_hi);
    // 1/(theta_L N^{2/3}) -> 0: theta_L N^{2/3} increases
    const double scaled = win.theta_lo * std::pow(n, 2.0 / 3.0);
    CHECK(scaled > prev_scaled);
    prev_scaled = scaled;
    // theta_U -> 0: decreasing
    CHECK(win.theta_hi < prev_hi);
    prev_hi = win.theta_hi;
  }
  // the literal rate interval is an asymptotic object: empty at desk scale
  CHECK_FALSE(validity_window(p, 128).rate_interval_nonempty());
}

TEST_CASE("theta_a(R) sandwich holds on the window preimage at N=500") {
  const OuParams p(1.0, 1.0, 1.0);
  const auto spec = scaled_spectrum(p, SampleGeometry(500, 1.0));
  const auto win = validity_window(p, 500);
  const auto [r_lo, r_hi] = induced_rate_window(spec, win);
  REQUIRE(r_lo < r_hi);
  for (int i = 0; i < 20; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, i / 19.0);
    const double th = theta_achievable_of_rate(spec, r);
    CAPTURE(r, th);
    CHECK(th >= std::pow(p.sigma * p.t0 / (4.0 * kPi * r), 2));
    CHECK(th <= std::pow(8.0 * p.sigma * p.t0 / (kPi * r), 2));
  }
}

TEST_CASE("D_b sqrt bound holds inside the theta window at N=500") {
  const OuParams p(1.0, 1.0, 1.0);
  const auto spec = scaled_spectrum(p, SampleGeometry(500, 1.0));
  const auto win = validity_window(p, 500);
  for (int i = 0; i < 20; ++i) {
    const double th =
        win.theta_lo * std::pow(win.theta_hi / win.theta_lo, i / 19.0);
    CAPTURE(th);
    CHECK(distortion_second_term(spec, th, 1.0) <=
          12.0 * p.sigma / kPi * std::sqrt(th));
  }
}

TEST_CASE("upper bound assembles in the medium regime") {
  const OuParams p(1.0, 1.0, 1.0);
  double multiple = 0.0;
  double prev_du = 1e9;
  for (int n : {64, 128, 256, 512, 1024}) {
    const NetworkConfig cfg(n, PowerLaw::constant(1.0), 1.0, 2.0);
    const auto ub = upper_bound_distortion(cfg, p, 16);
    REQUIRE(ub.applicable);
    const double log_np = std::log(static_cast<double>(n));
    CAPTURE(n);
    CHECK(ub.c_a == Approx(log_np / 6.0).epsilon(1e-12));
    CHECK(ub.d_u > 0.0);
    CHECK(ub.d_u < p.stationary_variance());
    CHECK(ub.d_u * log_np > 0.3);
    CHECK(ub.d_u * log_np < 2.0);
    CHECK(ub.d_u < prev_du);
    prev_du = ub.d_u;
    // two-term surrogate: the exact value stays within a fixed multiple
    multiple = std::max(multiple, ub.d_u / ub.surrogate());
    CHECK(ub.n_inv_term > 0.0);
    CHECK(ub.d_b_term > 0.0);
  }
  CHECK(multiple < 1.5);
}

TEST_CASE("upper bound reports not-applicable outside its window") {
  const OuParams p(1.0, 1.0, 1.0);
  // very small regime: growth condition fails
  const NetworkConfig vs(64, PowerLaw::power_of_n(1.0, -2.0), 1.0, 2.0);
  const auto ub = upper_bound_distortion(vs, p, 16);
  CHECK_FALSE(ub.applicable);
  CHECK_FALSE(ub.reason.empty());
  CHECK(std::isnan(ub.d_u));
  // large regime: spectrum window condition fails
  const NetworkConfig lg(64, PowerLaw::exp_root_over_n(0.5), 1.0, 2.0);
  CHECK_FALSE(upper_bound_distortion(lg, p, 16).applicable);
}
