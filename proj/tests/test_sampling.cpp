#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>

#include "oubounds/sampling.hpp"

using namespace oubounds;
using Catch::Approx;

TEST_CASE("geometry is equally spaced with exact endpoints") {
  const SampleGeometry g(5, 2.0);
  REQUIRE(g.positions().front() == 0.0);
  REQUIRE(g.positions().back() == 2.0);
  for (int i = 0; i + 1 < g.n(); ++i) {
    CHECK(g.positions()[i + 1] - g.positions()[i] ==
          Approx(g.spacing()).epsilon(1e-15));
  }
  CHECK_THROWS_AS(SampleGeometry(1, 1.0), std::invalid_argument);
}

TEST_CASE("covariance matrix entries") {
  const OuParams p(1.0, 1.0, 1.0);
  const auto cov = build_covariance(p, SampleGeometry(2, 1.0));
  CHECK(cov.sigma()(0, 0) == Approx(0.5).epsilon(1e-15));
  CHECK(cov.sigma()(1, 1) == Approx(0.5).epsilon(1e-15));
  CHECK(cov.sigma()(0, 1) == Approx(0.5 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(cov.sigma()(1, 0) == cov.sigma()(0, 1));

  for (int n : {3, 17, 40}) {
    const auto c2 = build_covariance(p, SampleGeometry(n, 1.0));
    for (int i = 0; i < n; ++i) CHECK(c2.sigma()(i, i) == 0.5);
  }
}

TEST_CASE("degenerate geometry is reported as a factorization failure") {
  // eta ~ 0 makes all samples identical: Sigma_N is exactly rank one
  const OuParams p(1.0, 1e-30, 1.0);
  CHECK_THROWS_AS(build_covariance(p, SampleGeometry(3, 1.0)),
                  std::runtime_error);
}

TEST_CASE("precision matrix of the OU samples is tridiagonal") {
  const OuParams p(1.0, 1.0, 1.0);
  const SampleGeometry g(50, 1.0);
  const auto cov = build_covariance(p, g);
  const Eigen::MatrixXd inv = cov.sigma().inverse();  // dense oracle
  const MarkovPrecision prec(p, g);
  double scale = 0.0;
  for (int i = 0; i < 50; ++i) scale = std::max(scale, std::abs(inv(i, i)));
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      if (std::abs(i - j) > 1) {
        CHECK(std::abs(inv(i, j)) <= 1e-8 * scale);
      }
    }
    CHECK(inv(i, i) == Approx(prec.diagonal()[i]).epsilon(1e-8));
    if (i + 1 < 50) {
      CHECK(inv(i, i + 1) == Approx(prec.subdiagonal()[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("markov shifted solve agrees with the dense solve") {
  const OuParams p(1.2, 0.7, 2.0);
  const SampleGeometry g(23, 2.0);
  const auto cov = build_covariance(p, g);
  const MarkovPrecision prec(p, g);
  Eigen::VectorXd b(23);
  for (int i = 0; i < 23; ++i) b[i] = std::sin(0.3 * i) + 0.1;
  // (s I + t P) x = b  against a dense build of the same matrix
  const double s = 0.05, t = 0.8;
  Eigen::MatrixXd m = t * cov.sigma().inverse();
  m.diagonal().array() += s;
  const Eigen::VectorXd dense_x = m.ldlt().solve(b);
  const Eigen::VectorXd fast_x = prec.solve_shifted(s, t, b);
  CHECK((dense_x - fast_x).norm() <= 1e-9 * dense_x.norm());
  // P b
  const Eigen::VectorXd pb = cov.sigma().inverse() * b;
  CHECK((prec.apply(b) - pb).norm() <= 1e-7 * pb.norm());
}

TEST_CASE("MMSE interpolates exactly at sensor positions") {
  const OuParams p(1.0, 1.0, 1.0);
  const SampleGeometry g(9, 1.0);
  const auto cov = build_covariance(p, g);
  const double c0 = p.stationary_variance();
  for (double t : g.positions()) {
    CHECK(std::abs(c0 - cov.quad_form_inv(cov.rho(t))) < 1e-12);
  }
  // the weight vector at a sensor is the corresponding unit vector
  const Eigen::VectorXd w = cov.solve(cov.rho(g.positions()[3]));
  for (int i = 0; i < 9; ++i) {
    CHECK(std::abs(w[i] - (i == 3 ? 1.0 : 0.0)) < 1e-10);
  }
}

namespace {

// brute-force trapezoid oracle for D_s^N
double ds_trapezoid_oracle(const OuParams& p, const SampleGeometry& g,
                           int points) {
  const auto cov = build_covariance(p, g);
  const double c0 = p.stationary_variance();
  double acc = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t = g.t0() * i / (points - 1);
    const double v = c0 - cov.quad_form_inv(cov.rho(t));
    acc += (i == 0 || i == points - 1) ? 0.5 * v : v;
  }
  return acc * (g.t0() / (points - 1)) / g.t0();
}

}  // namespace

TEST_CASE("D_s agrees with a dense trapezoid oracle at N=3") {
  const OuParams p(1.0, 1.0, 1.0);
  const SampleGeometry g(3, 1.0);
  const double got = distortion_from_samples(p, g, 16);
  const double oracle = ds_trapezoid_oracle(p, g, 100001);
  CHECK(std::abs(got - oracle) <= 1e-8 * oracle);
  // frozen anchor for the same configuration
  CHECK(got == Approx(0.08197670686932644).epsilon(1e-12));
}

TEST_CASE("dense and markov paths agree") {
  const OuParams p(1.3, 2.1, 1.7);
  for (int n : {2, 3, 8, 33, 100}) {
    const SampleGeometry g(n, p.t0);
    const double dense = distortion_from_samples(p, g, 12, SolvePath::Dense);
    const double fast =
        distortion_from_samples(p, g, 12, SolvePath::MarkovFast);
    CAPTURE(n);
    CHECK(dense == Approx(fast).epsilon(1e-10));
  }
}

TEST_CASE("D_s stays inside (0, C(0)) and decreases with N") {
  const OuParams p(1.0, 1.0, 1.0);
  double prev = p.stationary_variance();
  for (int n = 2; n <= 256; n *= 2) {
    const double d = distortion_from_samples(p, SampleGeometry(n, 1.0), 16,
                                             SolvePath::MarkovFast);
    CHECK(d > 0.0);
    CHECK(d < p.stationary_variance());
    CHECK(d <= prev * (1 + 1e-12));
    prev = d;
  }
}

TEST_CASE("N * D_s is bounded between positive constants") {
  const OuParams p(1.0, 1.0, 1.0);
  for (int n = 8; n <= 1024; n *= 2) {
    const double nd =
        n * distortion_from_samples(p, SampleGeometry(n, 1.0), 16,
                                    SolvePath::MarkovFast);
    CHECK(nd > 0.16);
    CHECK(nd < 0.20);
  }
}

TEST_CASE("MMSE residual variance is nonnegative at quadrature nodes") {
  const OuParams p(1.0, 1.0, 1.0);
  const SampleGeometry g(16, 1.0);
  const auto cov = build_covariance(p, g);
  const MarkovPrecision prec(p, g);
  const auto rule = gauss_legendre(16);
  const double c0 = p.stationary_variance();
  const auto& t = g.positions();
  for (int i = 0; i + 1 < 16; ++i) {
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double tt = 0.5 * (t[i] + t[i + 1]) +
                        0.5 * g.spacing() * rule.nodes[j];
      CHECK(c0 - cov.quad_form_inv(cov.rho(tt)) >= -1e-10);
      CHECK(prec.conditional_variance(tt - t[i], t[i + 1] - tt) >= -1e-10);
    }
  }
}

TEST_CASE("quadrature order below 2 is rejected") {
  const OuParams p(1.0, 1.0, 1.0);
  CHECK_THROWS_AS(distortion_from_samples(p, SampleGeometry(4, 1.0), 1),
                  std::invalid_argument);
}

TEST_CASE("Monte Carlo distortion matches the analytic value") {
  const OuParams p(1.0, 1.0, 1.0);
  const SampleGeometry g(16, 1.0);
  const double analytic = distortion_from_samples(p, g, 16);
  const auto mc = monte_carlo_distortion(p, g, 2000, 16, 42);
  CHECK(std::abs(mc.mean - analytic) <= 3.0 * mc.std_error);
  CHECK(mc.std_error < 0.02 * mc.mean);
}

TEST_CASE("Monte Carlo standard error shrinks like 1/sqrt(trials)") {
  const OuParams p(1.0, 1.0, 1.0);
  const SampleGeometry g(8, 1.0);
  const auto a = monte_carlo_distortion(p, g, 500, 8, 7);
  const auto b = monte_carlo_distortion(p, g, 2000, 8, 7);
  // quadrupling trials should halve the standard error, within noise
  CHECK(a.std_error / b.std_error > 1.5);
  CHECK(a.std_error / b.std_error < 2.7);
}

TEST_CASE("Monte Carlo rejects too few trials") {
  const OuParams p(1.0, 1.0, 1.0);
  CHECK_THROWS_AS(monte_carlo_distortion(p, SampleGeometry(4, 1.0), 99, 8, 1),
                  std::invalid_argument);
}
