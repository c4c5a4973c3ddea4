#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tfgamma/errors.hpp"
#include "tfgamma/quadrature.hpp"

using namespace tfgamma;
constexpr double kPi = std::numbers::pi;

TEST_CASE("adaptive quadrature on finite and infinite ranges") {
    CHECK(integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    CHECK(integrate_adaptive([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, INFINITY, 1e-10) ==
          doctest::Approx(kPi / 2).epsilon(1e-10));
    // the error estimate is conservative at endpoint singularities
    CHECK(integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-6) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("adaptive quadrature reports a missed tolerance") {
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-10, 0.0, 6), NumericError);
}

TEST_CASE("composite Gauss-Legendre is exact for degree 15") {
    const auto rule = composite_gauss_legendre(-1.0, 2.0, 1);
    CHECK(rule.nodes.size() == 8);
    const auto p = [](double x) { return std::pow(x, 15) - 3.0 * std::pow(x, 7) + 1.0; };
    const double exact = (std::pow(2.0, 16) - 1.0) / 16.0 - 3.0 * (std::pow(2.0, 8) - 1.0) / 8.0 + 3.0;
    CHECK(rule.apply(p) == doctest::Approx(exact).epsilon(1e-13));
    const auto many = composite_gauss_legendre(0.0, 1.0, 7);
    double w = 0.0;
    for (double x : many.weights) w += x;
    CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("semi-infinite rule integrates decaying functions") {
    const auto rule = semi_infinite_rule(0.0, 1.0, 32);
    CHECK(rule.apply([](double r) { return std::exp(-r); }) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rule.apply([](double r) { return r * r * std::exp(-r * r); }) == doctest::Approx(std::sqrt(kPi) / 4).epsilon(1e-9));
}
