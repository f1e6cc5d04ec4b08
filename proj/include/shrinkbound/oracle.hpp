#pragma once

// Brute-force reference computations used to cross-check the quadrature
// pipeline. Slow on purpose: a dense uniform tau grid, and a Monte-Carlo
// sampler that never touches the quadrature code.
//
// Random numbers come from std::mt19937_64 (fully specified by the C++
// standard), turned into uniforms as (x >> 11 + 0.5) * 2^-53 and into normals
// by Box-Muller, so runs are bit-reproducible per seed across platforms.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "shrinkbound/model.hpp"
#include "shrinkbound/prior.hpp"

namespace shrinkbound::oracle {

enum class Method { grid, monte_carlo };

struct OracleEstimate {
  double value = 0.0;
  double mc_std_error = 0.0;  // 0 for grid estimates
  Method method = Method::grid;
  std::size_t sample_count = 0;  // samples, or grid points
  std::uint64_t seed = 0;
};

// E[c_ij] by a Riemann sum over grid_size points: a uniform tau grid on
// [0, U] for priors bounded by U, otherwise a uniform grid in
// t = tau / (tau + c) on (0, 1) with c the median standard error. The
// marginal likelihood is evaluated from the Gaussian quadratic form, not from
// the model's residual form. Requires grid_size >= 10^4.
OracleEstimate grid_expected_weight(const Dataset& data, const HeterogeneityPrior& prior,
                                    std::size_t i, std::size_t j, std::size_t grid_size);

struct ThetaSample {
  OracleEstimate mean;
  OracleEstimate sd;
  std::vector<double> probabilities;
  std::vector<OracleEstimate> quantiles;
  double effective_sample_size = 0.0;
  // Set when the importance weights collapse (ESS < 100).
  bool low_ess_warning = false;
};

// Draws tau from the prior by CDF inversion, weights each draw by the
// marginal likelihood, then mu | tau and theta_j | mu, tau from their normal
// conditionals. Standard errors come from 100 equal batches. Requires
// n_samples >= 10^5.
ThetaSample mc_theta_distribution(const Dataset& data, const HeterogeneityPrior& prior,
                                  std::size_t j, std::size_t n_samples, std::uint64_t seed,
                                  std::vector<double> probabilities = {0.025, 0.5, 0.975});

}  // namespace shrinkbound::oracle
