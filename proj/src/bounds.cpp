#include "shrinkbound/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <thread>

#include "shrinkbound/errors.hpp"

namespace shrinkbound {

namespace {

void check_sigmas(std::span<const double> sigmas) {
  if (sigmas.empty()) throw DomainError("no standard errors given");
  for (double s : sigmas)
    if (!std::isfinite(s) || !(s > 0.0)) throw DomainError("standard errors must be positive");
}

// Runs fn(i) for i in [0, n) on a small worker pool; rethrows the first
// failure in index order.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::exception_ptr> errors(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

SweepRow analyze_row(double x, const Dataset& data, const HeterogeneityPrior& prior,
                     std::size_t j, const SweepOptions& options) {
  const auto tp = TauPosterior::fit(data, prior, options.settings);
  const auto summary = marginal_theta(tp, j, options.level, options.kind);
  return {x, summary.weights[j], summary.mean, summary.interval.lo, summary.interval.hi};
}

}  // namespace

std::vector<double> fe_weights(std::span<const double> sigmas) {
  check_sigmas(sigmas);
  std::vector<double> w(sigmas.size());
  double total = 0.0;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    w[i] = 1.0 / (sigmas[i] * sigmas[i]);
    total += w[i];
  }
  for (double& wi : w) wi /= total;
  return w;
}

std::vector<double> coincidence_weights(std::span<const double> sigmas,
                                        const HeterogeneityPrior& prior,
                                        const quad::QuadratureSettings& settings,
                                        double common_value) {
  check_sigmas(sigmas);
  const std::vector<double> y(sigmas.size(), common_value);
  const auto tp = TauPosterior::fit(Dataset::from_arrays(y, sigmas), prior, settings);
  std::vector<double> out(sigmas.size());
  for (std::size_t j = 0; j < sigmas.size(); ++j) out[j] = expected_shrink_weight(tp, j, j);
  return out;
}

BoundsReport bounds_report(std::span<const double> sigmas, const HeterogeneityPrior& prior,
                           const quad::QuadratureSettings& settings) {
  const auto fe = fe_weights(sigmas);
  const auto coincidence = coincidence_weights(sigmas, prior, settings);
  BoundsReport report{prior.describe(), {}};
  for (std::size_t j = 0; j < sigmas.size(); ++j)
    report.studies.push_back({std::to_string(j + 1), sigmas[j], fe[j], coincidence[j], {}});
  return report;
}

BoundsReport bounds_report(const Dataset& data, const HeterogeneityPrior& prior,
                           const quad::QuadratureSettings& settings) {
  const auto sigmas = data.std_errors();
  const auto fe = fe_weights(sigmas);
  const auto coincidence = coincidence_weights(sigmas, prior, settings);
  const auto tp = TauPosterior::fit(data, prior, settings);
  BoundsReport report{prior.describe(), {}};
  for (std::size_t j = 0; j < data.size(); ++j) {
    report.studies.push_back({data[j].label, sigmas[j], fe[j], coincidence[j],
                              expected_shrink_weight(tp, j, j)});
  }
  return report;
}

SweepTable discrepancy_sweep(std::span<const double> sigmas, const HeterogeneityPrior& prior,
                             std::size_t j, std::span<const double> deltas,
                             const SweepOptions& options) {
  check_sigmas(sigmas);
  if (sigmas.size() != 2) throw UnsupportedError("discrepancy sweep needs exactly two studies");
  if (j >= 2) throw DomainError("target study index out of range");
  for (double d : deltas)
    if (!std::isfinite(d)) throw DomainError("discrepancy grid must be finite");

  SweepTable table{"delta", j, std::vector<SweepRow>(deltas.size())};
  parallel_for(deltas.size(), options.threads, [&](std::size_t r) {
    const std::vector<double> y{0.0, deltas[r]};
    table.rows[r] = analyze_row(deltas[r], Dataset::from_arrays(y, sigmas), prior, j, options);
  });
  return table;
}

SweepTable prior_scale_sweep(std::span<const double> sigmas,
                             std::optional<std::vector<double>> estimates,
                             std::span<const double> scales, std::size_t j,
                             const SweepOptions& options) {
  check_sigmas(sigmas);
  if (j >= sigmas.size()) throw DomainError("target study index out of range");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !std::isfinite(scales[i]))
      throw DomainError("prior scales must be positive");
    if (i > 0 && !(scales[i] > scales[i - 1]))
      throw DomainError("prior scales must be ascending");
  }
  const std::vector<double> y =
      estimates ? std::move(*estimates) : std::vector<double>(sigmas.size(), 0.0);
  const auto data = Dataset::from_arrays(y, sigmas);

  SweepTable table{"scale", j, std::vector<SweepRow>(scales.size())};
  parallel_for(scales.size(), options.threads, [&](std::size_t r) {
    table.rows[r] =
        analyze_row(scales[r], data, HeterogeneityPrior::half_normal(scales[r]), j, options);
  });
  return table;
}

OrderingVerdict verify_stochastic_ordering(const TauPosterior& smaller,
                                           const TauPosterior& larger,
                                           std::span<const double> tau_grid) {
  if (smaller.dataset().std_errors() != larger.dataset().std_errors())
    throw DomainError("stochastic ordering check needs analyses with identical sigma");

  std::vector<double> grid(tau_grid.begin(), tau_grid.end());
  if (grid.empty()) {
    constexpr std::size_t kPoints = 512;
    const double top = std::max(smaller.upper(), larger.upper());
    grid.resize(kPoints);
    for (std::size_t i = 0; i < kPoints; ++i)
      grid[i] = top * static_cast<double>(i) / static_cast<double>(kPoints - 1);
  }

  OrderingVerdict v;
  v.grid_points = grid.size();
  // Both CDFs vanish at tau = 0; cdf_on_grid wants strictly positive steps.
  std::vector<double> positive;
  for (double t : grid)
    if (t > 0.0) positive.push_back(t);
  if (!positive.empty()) {
    const auto cdf_small = smaller.cdf_on_grid(positive);
    const auto cdf_large = larger.cdf_on_grid(positive);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positive.size(); ++i)
      worst = std::max(worst, cdf_large[i] - cdf_small[i]);
    v.max_cdf_violation = worst;
  }

  double prev = std::numeric_limits<double>::quiet_NaN();
  double worst_drop = 0.0;
  for (double t : grid) {
    const double a = smaller.log_unnorm(t);
    const double b = larger.log_unnorm(t);
    if (!std::isfinite(a) || !std::isfinite(b)) continue;
    const double ratio = b - a;
    if (!std::isnan(prev)) worst_drop = std::max(worst_drop, prev - ratio);
    prev = ratio;
  }
  v.max_ratio_violation = worst_drop;
  v.ordered = v.max_cdf_violation <= kOrderingTolerance &&
              v.max_ratio_violation <= kOrderingTolerance;
  return v;
}

double se_from_balanced_binary(long n) {
  if (n < 1) throw DomainError("sample size must be at least 1");
  return 4.0 / std::sqrt(static_cast<double>(n));
}

}  // namespace shrinkbound
