#pragma once

#include <functional>
#include <span>

namespace shrinkbound::quad {

struct QuadratureSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 200;
  // Prior tail mass discarded when truncating the tau support.
  double tail_mass_cutoff = 1e-7;

  // Throws DomainError unless all fields are positive and rel_tol < 1.
  void validate() const;

  // Defaults, with rel_tol taken from SHRINKBOUND_QUAD_TOL when set.
  static QuadratureSettings from_environment();
};

struct Integral {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

using Function = std::function<double(double)>;

// Globally adaptive Gauss-Kronrod (G10/K21) integration of f over [a, b].
// Converged when error <= max(abs_tol, rel_tol * |value|); throws
// ConvergenceError (carrying the best estimate) once max_subdivisions
// bisections have been spent.
Integral integrate(const Function& f, double a, double b,
                   const QuadratureSettings& settings = {});

// Same, but seeded with the panels [p0, p1], [p1, p2], ... Breakpoints must be
// strictly increasing. Used when the integrand has structure on scales much
// smaller than the full range.
Integral integrate(const Function& f, std::span<const double> breakpoints,
                   const QuadratureSettings& settings = {});

double normal_pdf(double x);
double normal_cdf(double x);
// Inverse of normal_cdf; throws DomainError unless 0 < p < 1.
double normal_quantile(double p);

// Bracketing root finder (TOMS 748 with bisection safeguard). Returns x with
// the final bracket no wider than tol. Throws BracketError when f(lo) and
// f(hi) have the same strict sign.
double find_root(const Function& f, double lo, double hi, double tol = 1e-12);

// Golden-section minimization of a unimodal f on [lo, hi]; returns the argmin.
double golden_section_minimize(const Function& f, double lo, double hi,
                               double tol);

}  // namespace shrinkbound::quad
