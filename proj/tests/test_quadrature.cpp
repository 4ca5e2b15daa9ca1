#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oubounds/quadrature.hpp"

using namespace oubounds;
using Catch::Approx;

TEST_CASE("gauss_legendre rejects order below 2") {
  CHECK_THROWS_AS(gauss_legendre(1), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("two-point rule is the textbook one") {
  const auto rule = gauss_legendre(2);
  CHECK(rule.nodes[0] == Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(rule.nodes[1] == Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(rule.weights[0] == Approx(1.0).epsilon(1e-14));
  CHECK(rule.weights[1] == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("nodes are symmetric and weights sum to 2") {
  for (int order : {2, 3, 8, 16, 31}) {
    const auto rule = gauss_legendre(order);
    double wsum = 0.0;
    for (int i = 0; i < order; ++i) {
      CHECK(rule.nodes[i] ==
            Approx(-rule.nodes[static_cast<std::size_t>(order - 1 - i)])
                .margin(1e-14));
      wsum += rule.weights[static_cast<std::size_t>(i)];
    }
    CHECK(wsum == Approx(2.0).epsilon(1e-13));
  }
}

TEST_CASE("order-q rule integrates degree 2q-1 polynomials exactly") {
  for (int order : {2, 8, 16}) {
    const auto rule = gauss_legendre(order);
    const int degree = 2 * order - 1;
    const double got = integrate(rule, 0.0, 1.0, [&](double x) {
      return std::pow(x, degree);
    });
    CHECK(got == Approx(1.0 / (degree + 1)).epsilon(1e-12));
  }
}

TEST_CASE("smooth integrand converges to machine precision") {
  const auto rule = gauss_legendre(16);
  const double got = integrate(rule, 0.0, 1.0, [](double x) { return std::exp(x); });
  CHECK(got == Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}
