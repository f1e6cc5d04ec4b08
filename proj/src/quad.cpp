#include "shrinkbound/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "shrinkbound/errors.hpp"

namespace shrinkbound::quad {

namespace {

// 21-point Kronrod abscissae on [0, 1] (QUADPACK qk21); odd entries are the
// 10-point Gauss nodes.
constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a;
  double b;
  double value;
  double error;

  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod_panel(const Function& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[10];
  double gauss = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * sum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  const double roundoff =
      50.0 * std::numeric_limits<double>::epsilon() * std::abs(kronrod);
  return {a, b, kronrod, std::max(std::abs(kronrod - gauss), roundoff)};
}

}  // namespace

void QuadratureSettings::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw DomainError("quadrature rel_tol must lie in (0, 1)");
  if (!(abs_tol > 0.0)) throw DomainError("quadrature abs_tol must be positive");
  if (max_subdivisions <= 0)
    throw DomainError("quadrature max_subdivisions must be positive");
  if (!(tail_mass_cutoff > 0.0 && tail_mass_cutoff < 1.0))
    throw DomainError("quadrature tail_mass_cutoff must lie in (0, 1)");
}

QuadratureSettings QuadratureSettings::from_environment() {
  QuadratureSettings settings;
  if (const char* env = std::getenv("SHRINKBOUND_QUAD_TOL"); env && *env) {
    char* end = nullptr;
    const double tol = std::strtod(env, &end);
    if (end == env || *end != '\0')
      throw DomainError(std::string("SHRINKBOUND_QUAD_TOL is not a number: ") + env);
    settings.rel_tol = tol;
  }
  settings.validate();
  return settings;
}

Integral integrate(const Function& f, double a, double b,
                   const QuadratureSettings& settings) {
  const std::array<double, 2> ends{a, b};
  return integrate(f, ends, settings);
}

Integral integrate(const Function& f, std::span<const double> breakpoints,
                   const QuadratureSettings& settings) {
  settings.validate();
  if (breakpoints.size() < 2)
    throw DomainError("integrate needs at least two breakpoints");
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i]) || !std::isfinite(breakpoints[i + 1]) ||
        !(breakpoints[i] < breakpoints[i + 1]))
      throw DomainError("integration limits must be finite and increasing");
  }

  std::priority_queue<Panel> panels;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    Panel p = gauss_kronrod_panel(f, breakpoints[i], breakpoints[i + 1]);
    value += p.value;
    error += p.error;
    panels.push(p);
  }

  int subdivisions = 0;
  auto converged = [&] {
    return error <= std::max(settings.abs_tol, settings.rel_tol * std::abs(value));
  };
  while (!converged()) {
    if (!std::isfinite(value))
      throw ConvergenceError("integrand produced a non-finite value", value, error);
    if (subdivisions >= settings.max_subdivisions) {
      throw ConvergenceError("quadrature did not converge within " +
                                 std::to_string(settings.max_subdivisions) +
                                 " subdivisions",
                             value, error);
    }
    Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      // Panel is at floating-point resolution; nothing left to refine.
      throw ConvergenceError("quadrature panel reached machine resolution", value,
                             error);
    }
    panels.pop();
    const Panel left = gauss_kronrod_panel(f, worst.a, mid);
    const Panel right = gauss_kronrod_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }

  // Re-sum to shed drift from the incremental updates.
  double total = 0.0;
  double total_error = 0.0;
  for (; !panels.empty(); panels.pop()) {
    total += panels.top().value;
    total_error += panels.top().error;
  }
  return {total, total_error, subdivisions};
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("normal_quantile requires 0 < p < 1, got " + std::to_string(p));
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double find_root(const Function& f, double lo, double hi, double tol) {
  if (!(lo <= hi)) std::swap(lo, hi);
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi) || std::isnan(flo) || std::isnan(fhi)) {
    throw BracketError("no sign change on [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }

  boost::uintmax_t max_iter = 100;
  auto width_ok = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, width_ok,
                                                  max_iter);
  if (width_ok(a, b)) return 0.5 * (a + b);

  // Bisection fallback on whatever bracket TOMS 748 left behind.
  double fa = f(a);
  for (int it = 0; it < 400 && !width_ok(a, b); ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(fa)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

double golden_section_minimize(const Function& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::abs(b - a) > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace shrinkbound::quad
