#pragma once

// Marginalization over the heterogeneity tau. Every posterior expectation is
// E[a] = int a(tau) p(tau | y, sigma) dtau, evaluated by adaptive quadrature
// against one cached normalization constant.

#include <functional>
#include <span>
#include <vector>

#include "shrinkbound/model.hpp"
#include "shrinkbound/prior.hpp"
#include "shrinkbound/quad.hpp"

namespace shrinkbound {

// Normalized marginal posterior of tau on [0, upper()].
class TauPosterior {
 public:
  // Truncates the support at the prior's (1 - tail_mass_cutoff) quantile,
  // doubling it until the unnormalized density there is below 1e-12 of its
  // peak. Quadrature failures propagate as ConvergenceError.
  static TauPosterior fit(Dataset data, HeterogeneityPrior prior,
                          quad::QuadratureSettings settings = {});

  const Dataset& dataset() const noexcept { return data_; }
  const HeterogeneityPrior& prior() const noexcept { return prior_; }
  const quad::QuadratureSettings& settings() const noexcept { return settings_; }

  double log_norm_const() const noexcept { return log_norm_; }
  double upper() const noexcept { return upper_; }
  // Panel boundaries used for every integral: 0, geometric steps, upper().
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }

  double log_unnorm(double tau) const;
  double density(double tau) const;
  double cdf(double tau) const;

  // CDF at each point of an increasing grid, accumulated panel by panel and
  // normalized by the accumulated total, so tails keep relative accuracy.
  std::vector<double> cdf_on_grid(std::span<const double> grid) const;

  // Posterior expectation of fn(tau).
  double expect(const quad::Function& fn) const;

 private:
  TauPosterior(Dataset data, HeterogeneityPrior prior, quad::QuadratureSettings settings)
      : data_(std::move(data)), prior_(std::move(prior)), settings_(settings) {}

  std::vector<double> breakpoints_up_to(double tau) const;

  Dataset data_;
  HeterogeneityPrior prior_;
  quad::QuadratureSettings settings_;
  double upper_ = 0.0;
  double log_norm_ = 0.0;
  std::vector<double> breakpoints_;
};

enum class IntervalKind { central, shortest };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Marginal posterior of a location parameter whose conditional posterior
// given tau is normal: a tau-mixture of normals. Keeps a reference to the
// TauPosterior, which must outlive it.
class NormalMixture {
 public:
  using Component = std::function<NormalMoments(double tau)>;

  NormalMixture(const TauPosterior& tau_posterior, Component component);

  double mean() const noexcept { return mean_; }
  // Law of total variance: E[v(tau)] + Var[m(tau)].
  double variance() const noexcept { return variance_; }
  double sd() const;

  double cdf(double x) const;
  double quantile(double p) const;

  Interval central_interval(double level) const;
  // Minimizes hi(lo) - lo with hi(lo) = quantile(cdf(lo) + level) by golden
  // section over lo in [quantile(1e-6), quantile(1 - level - 1e-6)].
  Interval shortest_interval(double level) const;
  Interval interval(double level, IntervalKind kind) const;

 private:
  TauPosterior tp_;
  Component component_;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

struct ExpectedWeights {
  std::vector<double> iv;  // E[w_i(tau)]
  WeightMatrix shrink;     // E[c_ij(tau)]
};

ExpectedWeights expected_weights(const TauPosterior& tp);

// E[c_ij(tau) | y, sigma].
double expected_shrink_weight(const TauPosterior& tp, std::size_t i, std::size_t j);

struct EffectSummary {
  // E[c_ij] over i for a study effect, E[w_i] for the overall mean.
  std::vector<double> weights;
  double mean = 0.0;
  double sd = 0.0;
  Interval interval;
  double level = 0.95;
  IntervalKind kind = IntervalKind::shortest;
};

struct ShrinkageResult {
  std::vector<EffectSummary> theta;
  EffectSummary mu;
};

NormalMixture theta_distribution(const TauPosterior& tp, std::size_t j);
NormalMixture mu_distribution(const TauPosterior& tp);

EffectSummary marginal_theta(const TauPosterior& tp, std::size_t j, double level = 0.95,
                             IntervalKind kind = IntervalKind::shortest);
EffectSummary marginal_mu(const TauPosterior& tp, double level = 0.95,
                          IntervalKind kind = IntervalKind::shortest);

ShrinkageResult shrinkage_analysis(const TauPosterior& tp, double level = 0.95,
                                   IntervalKind kind = IntervalKind::shortest);

// A study analyzed on its own: Normal(y, sigma^2), weight 1. Both interval
// kinds coincide.
EffectSummary single_study_summary(const Study& study, double level = 0.95);

}  // namespace shrinkbound
