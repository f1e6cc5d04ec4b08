#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace shrinkbound {

// Prior on the between-study standard deviation tau >= 0.
class HeterogeneityPrior {
 public:
  enum class Kind { half_normal, half_cauchy, uniform, tabulated };

  static HeterogeneityPrior half_normal(double scale);
  static HeterogeneityPrior half_cauchy(double scale);
  static HeterogeneityPrior uniform(double upper);
  // Density values on an increasing, nonnegative tau grid. Linear in between,
  // zero outside, renormalized by the trapezoid rule. The CDF interpolates
  // the cumulative trapezoid sums linearly.
  static HeterogeneityPrior tabulated(std::vector<double> tau, std::vector<double> density);

  Kind kind() const noexcept;
  // Scale for the two scale families, upper bound for uniform, last grid
  // point for tabulated.
  double parameter() const noexcept;

  double density(double tau) const;
  double log_density(double tau) const;
  double cdf(double tau) const;
  // Throws DomainError unless 0 <= p < 1 (p = 0 maps to the support minimum).
  double quantile(double p) const;

  // Finite for bounded supports, +inf otherwise.
  double support_upper() const noexcept;

  // e.g. "half-normal(0.5)".
  std::string describe() const;

 private:
  struct HalfNormal {
    double scale;
  };
  struct HalfCauchy {
    double scale;
  };
  struct Uniform {
    double upper;
  };
  struct Table {
    std::vector<double> tau;
    std::vector<double> density;
    std::vector<double> cdf;
  };
  using Tabulated = std::shared_ptr<const Table>;

  explicit HeterogeneityPrior(std::variant<HalfNormal, HalfCauchy, Uniform, Tabulated> v)
      : family_(std::move(v)) {}

  std::variant<HalfNormal, HalfCauchy, Uniform, Tabulated> family_;
};

}  // namespace shrinkbound
