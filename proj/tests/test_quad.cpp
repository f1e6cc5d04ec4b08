#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "shrinkbound/errors.hpp"
#include "shrinkbound/prior.hpp"
#include "shrinkbound/quad.hpp"

using namespace shrinkbound;
using doctest::Approx;

TEST_CASE("integrate: constants and polynomials") {
  const auto one = quad::integrate([](double) { return 1.0; }, 0.0, 1.0);
  CHECK(one.value == Approx(1.0).epsilon(1e-14));

  const auto sq = quad::integrate([](double t) { return t * t; }, 0.0, 1.0);
  CHECK(std::abs(sq.value - 1.0 / 3.0) < 1e-14);

  // Error estimate bounds the actual error on polynomials.
  for (int n : {3, 7, 15, 29, 40}) {
    const auto r = quad::integrate([n](double t) { return std::pow(t, n); }, 0.0, 2.0);
    const double exact = std::pow(2.0, n + 1) / (n + 1);
    CHECK(std::abs(r.value - exact) <= std::max(r.error, 1e-13 * exact));
  }
}

TEST_CASE("integrate: truncated half-normal density has unit mass") {
  const auto prior = HeterogeneityPrior::half_normal(0.5);
  const double upper = prior.quantile(1.0 - 1e-7);
  const auto r = quad::integrate([&](double t) { return prior.density(t); }, 0.0, upper);
  CHECK(std::abs(r.value - 1.0) < 1e-6);
}

TEST_CASE("integrate: linearity") {
  auto f = [](double t) { return std::exp(-t) * std::sin(3 * t); };
  auto g = [](double t) { return 1.0 / (1.0 + t * t); };
  const double a = 2.5;
  const double b = -0.75;
  const auto If = quad::integrate(f, 0.0, 4.0).value;
  const auto Ig = quad::integrate(g, 0.0, 4.0).value;
  const auto Ih = quad::integrate([&](double t) { return a * f(t) + b * g(t); }, 0.0, 4.0).value;
  CHECK(std::abs(Ih - (a * If + b * Ig)) < 1e-10);
  CHECK(std::abs(Ig - std::atan(4.0)) < 1e-10);
}

TEST_CASE("integrate: breakpoints and a sharp peak") {
  const std::vector<double> bp{0.0, 0.001, 0.01, 0.1, 1.0, 10.0};
  auto f = [](double t) { return std::exp(-t / 0.002) / 0.002; };
  const auto r = quad::integrate(f, bp);
  CHECK(std::abs(r.value - (1.0 - std::exp(-5000.0))) < 1e-9);
}

TEST_CASE("integrate: subdivision cap raises a convergence error with the best estimate") {
  quad::QuadratureSettings s;
  s.max_subdivisions = 2;
  s.rel_tol = 1e-14;
  s.abs_tol = 1e-300;
  auto f = [](double t) { return std::sqrt(t) * std::sin(40.0 * t); };
  try {
    (void)quad::integrate(f, 0.0, 10.0, s);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.error_estimate() > 0.0);
  }
}

TEST_CASE("integrate: invalid bounds and settings") {
  CHECK_THROWS_AS(quad::integrate([](double) { return 1.0; }, 1.0, 0.0), DomainError);
  quad::QuadratureSettings s;
  s.rel_tol = 1.5;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("settings: environment override of the relative tolerance") {
  ::setenv("SHRINKBOUND_QUAD_TOL", "1e-6", 1);
  CHECK(quad::QuadratureSettings::from_environment().rel_tol == 1e-6);
  ::setenv("SHRINKBOUND_QUAD_TOL", "garbage", 1);
  CHECK_THROWS(quad::QuadratureSettings::from_environment());
  ::unsetenv("SHRINKBOUND_QUAD_TOL");
  CHECK(quad::QuadratureSettings::from_environment().rel_tol == 1e-8);
}

TEST_CASE("normal cdf and quantile") {
  CHECK(quad::normal_cdf(0.0) == 0.5);
  CHECK(quad::normal_quantile(0.975) == Approx(1.959964).epsilon(1e-6));
  CHECK(std::abs(quad::normal_quantile(0.975) - 1.959963984540054) < 1e-12);
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    CHECK(std::abs(quad::normal_cdf(-x) + quad::normal_cdf(x) - 1.0) < 1e-15);
    // Near 1, cdf(x) is only representable to half an ulp of 1, which moves
    // the exact inverse by up to 2^-53 / pdf(x) (about 1.8e-8 at x = 6).
    const double representable = 0x1p-53 / quad::normal_pdf(x);
    const double tol = x <= 0.0 ? 1e-9 : 1e-9 + representable;
    CHECK(std::abs(quad::normal_quantile(quad::normal_cdf(x)) - x) < tol);
  }
  CHECK(std::abs(quad::normal_cdf(-1.0) - 0.15865525393145705) < 1e-15);
  CHECK_THROWS_AS(quad::normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(quad::normal_quantile(1.0), DomainError);
}

TEST_CASE("find_root") {
  CHECK(quad::find_root([](double x) { return x - 2.0; }, 0.0, 5.0) == Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(quad::find_root([](double x) { return x * x * x - 2.0; }, 1.0, 2.0) -
                 std::cbrt(2.0)) < 1e-11);
  // Symmetric two-component mixture centred at m.
  const double m = 0.7;
  auto mix = [m](double x) {
    return 0.5 * quad::normal_cdf((x - m - 1.0) / 0.5) + 0.5 * quad::normal_cdf((x - m + 1.0) / 0.5) -
           0.5;
  };
  CHECK(std::abs(quad::find_root(mix, -5.0, 5.0) - m) < 1e-10);
  CHECK_THROWS_AS(quad::find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), BracketError);
}

TEST_CASE("golden section") {
  const double x = quad::golden_section_minimize([](double t) { return (t - 1.3) * (t - 1.3); }, 0.0,
                                                 4.0, 1e-9);
  CHECK(std::abs(x - 1.3) < 1e-7);
}
