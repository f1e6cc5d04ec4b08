#pragma once

// A-priori bounds on a study's weight in its own shrinkage estimate.
//
//   fe_weight <= coincidence_weight <= actual_weight
//
// The FE weight c_jj(0) bounds E[c_jj] for any prior and any data. The
// coincidence weight is E[c_jj] when all estimates agree and bounds the
// actual weight for a fixed prior over all data realizations.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shrinkbound/posterior.hpp"

namespace shrinkbound {

std::vector<double> fe_weights(std::span<const double> sigmas);

// E[c_jj] for every j with all estimates set to common_value.
std::vector<double> coincidence_weights(std::span<const double> sigmas,
                                        const HeterogeneityPrior& prior,
                                        const quad::QuadratureSettings& settings = {},
                                        double common_value = 0.0);

struct BoundsEntry {
  std::string label;
  double sigma = 0.0;
  double fe_weight = 0.0;
  double coincidence_weight = 0.0;
  std::optional<double> actual_weight;  // absent in design-stage mode
};

struct BoundsReport {
  std::string prior;
  std::vector<BoundsEntry> studies;
};

// Design stage: standard errors only. Labels "1", "2", ...
BoundsReport bounds_report(std::span<const double> sigmas, const HeterogeneityPrior& prior,
                           const quad::QuadratureSettings& settings = {});
// With observed estimates: fills actual_weight too.
BoundsReport bounds_report(const Dataset& data, const HeterogeneityPrior& prior,
                           const quad::QuadratureSettings& settings = {});

struct SweepRow {
  double x = 0.0;  // discrepancy or prior scale
  double weight = 0.0;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct SweepTable {
  std::string abscissa;  // "delta" or "scale"
  std::size_t target = 0;
  std::vector<SweepRow> rows;
};

struct SweepOptions {
  double level = 0.95;
  IntervalKind kind = IntervalKind::shortest;
  quad::QuadratureSettings settings{};
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

// k = 2 only: analyses with y = (0, delta) for each delta, reporting study j.
SweepTable discrepancy_sweep(std::span<const double> sigmas, const HeterogeneityPrior& prior,
                             std::size_t j, std::span<const double> deltas,
                             const SweepOptions& options = {});

// Half-normal priors over an ascending scale grid. Without estimates the
// analyses run in coincidence mode (all y equal).
SweepTable prior_scale_sweep(std::span<const double> sigmas,
                             std::optional<std::vector<double>> estimates,
                             std::span<const double> scales, std::size_t j,
                             const SweepOptions& options = {});

struct OrderingVerdict {
  bool ordered = false;
  // max over the grid of CDF_larger - CDF_smaller (<= 0 when ordered).
  double max_cdf_violation = 0.0;
  // Largest decrease of the log density ratio between adjacent grid points.
  double max_ratio_violation = 0.0;
  std::size_t grid_points = 0;
};

inline constexpr double kOrderingTolerance = 1e-9;

// Checks that `larger` is stochastically larger than `smaller`: pointwise
// CDF ordering and a monotone likelihood ratio on the grid. Both analyses
// must share sigma. An empty grid means 512 uniform points on the joint
// support.
OrderingVerdict verify_stochastic_ordering(const TauPosterior& smaller,
                                           const TauPosterior& larger,
                                           std::span<const double> tau_grid = {});

// Standard error of a log odds ratio from a balanced 2x2 table with n
// patients in total: 4 / sqrt(n).
double se_from_balanced_binary(long n);

}  // namespace shrinkbound
