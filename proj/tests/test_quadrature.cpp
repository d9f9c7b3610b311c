#include "doctest.h"

#include "ldnoma/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

using namespace ldnoma;

TEST_SUITE("quadrature") {

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (std::size_t n : {1u, 2u, 5u, 16u, 64u}) {
    const auto rule = gauss_legendre(n);
    REQUIRE(rule.nodes.size() == n);
    CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) ==
          doctest::Approx(2.0).epsilon(1e-14));
    for (std::size_t k = 0; k < 2 * n; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / static_cast<double>(k + 1);
      CHECK(std::abs(sum - exact) < 1e-13);
    }
  }
}

TEST_CASE("two-point rule nodes are +-1/sqrt(3)") {
  const auto rule = gauss_legendre(2);
  CHECK(std::abs(std::abs(rule.nodes[0]) - 1.0 / std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(rule.weights[0] - 1.0) < 1e-15);
}

TEST_CASE("cached rules only exist for the doubling ladder") {
  CHECK(cached_rule(16).nodes.size() == 16);
  CHECK(cached_rule(4096).nodes.size() == 4096);
  CHECK_THROWS(cached_rule(17));
}

TEST_CASE("adaptive integration of smooth functions") {
  const auto r = integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(std::abs(r.value - (std::numbers::e - 1.0)) < 1e-13);
}

TEST_CASE("edge substitution handles square-root endpoints") {
  const double a = 0.3, b = 2.7;
  const auto semicircle =
      integrate_sqrt_edges([&](double x) { return std::sqrt((x - a) * (b - x)); }, a, b);
  CHECK(semicircle.converged);
  CHECK(std::abs(semicircle.value - std::numbers::pi * (b - a) * (b - a) / 8.0) < 1e-12);

  const auto arcsine =
      integrate_sqrt_edges([&](double x) { return 1.0 / std::sqrt((x - a) * (b - x)); }, a, b);
  CHECK(std::abs(arcsine.value - std::numbers::pi) < 1e-12);

  // Partial integral of the arcsine density: (2/pi) asin(sqrt((u-a)/(b-a))) * pi.
  const double u = 1.1;
  const auto partial = integrate_sqrt_edges(
      [&](double x) { return 1.0 / std::sqrt((x - a) * (b - x)); }, a, b, u);
  CHECK(std::abs(partial.value - 2.0 * std::asin(std::sqrt((u - a) / (b - a)))) < 1e-12);
}

TEST_CASE("edge substitution never touches the endpoints") {
  bool touched = false;
  integrate_sqrt_edges(
      [&](double x) {
        if (x == 0.0 || x == 1.0) touched = true;
        return 1.0 / std::sqrt(x);
      },
      0.0, 1.0);
  CHECK_FALSE(touched);
}

}
