#include "shrinkbound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "shrinkbound/errors.hpp"

namespace shrinkbound::oracle {

namespace {

// log p(y | tau) up to a constant, from the quadratic form
// y' S^-1 y - (1' S^-1 y)^2 / (1' S^-1 1) with S = diag(sigma^2 + tau^2).
double log_likelihood(const Dataset& data, double tau) {
  double log_det = 0.0;
  double sum_u = 0.0;
  double sum_uy = 0.0;
  double sum_uyy = 0.0;
  for (const auto& s : data.studies()) {
    const double v = s.sigma * s.sigma + tau * tau;
    log_det += std::log(v);
    sum_u += 1.0 / v;
    sum_uy += s.y / v;
    sum_uyy += s.y * s.y / v;
  }
  const double quad_form = std::max(0.0, sum_uyy - sum_uy * sum_uy / sum_u);
  return -0.5 * log_det - 0.5 * std::log(sum_u) - 0.5 * quad_form;
}

double shrink_weight(const Dataset& data, std::size_t i, std::size_t j, double tau) {
  double sum_u = 0.0;
  for (const auto& s : data.studies()) sum_u += 1.0 / (s.sigma * s.sigma + tau * tau);
  const double w_i = 1.0 / (data[i].sigma * data[i].sigma + tau * tau) / sum_u;
  const double b_j = tau * tau / (data[j].sigma * data[j].sigma + tau * tau);
  return i == j ? b_j + (1.0 - b_j) * w_i : (1.0 - b_j) * w_i;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct WeightedDraw {
  double theta;
  double weight;
};

struct Summary {
  double mean;
  double sd;
  std::vector<double> quantiles;
};

// Sorts the span in place.
Summary summarize(std::span<WeightedDraw> draws, const std::vector<double>& probs) {
  double total = 0.0;
  double first = 0.0;
  for (const auto& d : draws) {
    total += d.weight;
    first += d.weight * d.theta;
  }
  const double mean = first / total;
  double second = 0.0;
  for (const auto& d : draws) second += d.weight * (d.theta - mean) * (d.theta - mean);

  std::sort(draws.begin(), draws.end(),
            [](const WeightedDraw& a, const WeightedDraw& b) { return a.theta < b.theta; });
  std::vector<double> q(probs.size(), draws.back().theta);
  std::size_t next = 0;
  double cumulative = 0.0;
  for (const auto& d : draws) {
    cumulative += d.weight;
    while (next < probs.size() && cumulative >= probs[next] * total) q[next++] = d.theta;
    if (next == probs.size()) break;
  }
  return {mean, std::sqrt(second / total), std::move(q)};
}

double batch_std_error(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

OracleEstimate grid_expected_weight(const Dataset& data, const HeterogeneityPrior& prior,
                                    std::size_t i, std::size_t j, std::size_t grid_size) {
  if (grid_size < 10000) throw DomainError("grid oracle needs at least 10^4 points");
  if (i >= data.size() || j >= data.size()) throw DomainError("weight index out of range");

  // Bounded priors: trapezoid rule on a uniform tau grid over the support.
  // Unbounded priors: midpoint rule on a uniform grid in t = tau / (tau + c),
  // c the median standard error, so heavy prior tails are covered without
  // truncation and small tau stays finely resolved.
  const double bounded = prior.support_upper();
  std::vector<double> taus(grid_size);
  std::vector<double> log_jacobian(grid_size, 0.0);
  std::vector<double> end_weight(grid_size, 1.0);
  if (std::isfinite(bounded)) {
    const double step = bounded / static_cast<double>(grid_size - 1);
    for (std::size_t m = 0; m < grid_size; ++m) taus[m] = step * static_cast<double>(m);
    end_weight.front() = end_weight.back() = 0.5;
  } else {
    auto sigmas = data.std_errors();
    std::nth_element(sigmas.begin(), sigmas.begin() + static_cast<std::ptrdiff_t>(sigmas.size() / 2),
                     sigmas.end());
    const double c = sigmas[sigmas.size() / 2];
    for (std::size_t m = 0; m < grid_size; ++m) {
      const double t = (static_cast<double>(m) + 0.5) / static_cast<double>(grid_size);
      taus[m] = c * t / (1.0 - t);
      log_jacobian[m] = std::log(c) - 2.0 * std::log1p(-t);
    }
  }

  std::vector<double> log_mass(grid_size);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < grid_size; ++m) {
    const double p = prior.density(taus[m]);
    log_mass[m] = p > 0.0 ? std::log(p) + log_likelihood(data, taus[m]) + log_jacobian[m]
                          : -std::numeric_limits<double>::infinity();
    peak = std::max(peak, log_mass[m]);
  }

  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t m = 0; m < grid_size; ++m) {
    const double mass = end_weight[m] * std::exp(log_mass[m] - peak);
    numerator += mass * shrink_weight(data, i, j, taus[m]);
    denominator += mass;
  }
  return {numerator / denominator, 0.0, Method::grid, grid_size, 0};
}

ThetaSample mc_theta_distribution(const Dataset& data, const HeterogeneityPrior& prior,
                                  std::size_t j, std::size_t n_samples, std::uint64_t seed,
                                  std::vector<double> probabilities) {
  if (n_samples < 100000) throw DomainError("Monte-Carlo oracle needs at least 10^5 samples");
  if (j >= data.size()) throw DomainError("study index out of range");
  for (double p : probabilities)
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile probabilities must lie in (0, 1)");
  std::sort(probabilities.begin(), probabilities.end());

  Rng rng(seed);
  std::vector<WeightedDraw> draws(n_samples);
  std::vector<double> log_w(n_samples);
  double peak = -std::numeric_limits<double>::infinity();
  const double sigma_j = data[j].sigma;
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double tau = prior.quantile(rng.uniform());
    log_w[n] = log_likelihood(data, tau);
    peak = std::max(peak, log_w[n]);

    double precision = 0.0;
    double weighted = 0.0;
    for (const auto& s : data.studies()) {
      const double u = 1.0 / (s.sigma * s.sigma + tau * tau);
      precision += u;
      weighted += u * s.y;
    }
    const double mu = weighted / precision + rng.normal() / std::sqrt(precision);
    double theta = mu;
    if (tau > 0.0) {
      const double prec_j = 1.0 / (sigma_j * sigma_j) + 1.0 / (tau * tau);
      const double mean_j = (data[j].y / (sigma_j * sigma_j) + mu / (tau * tau)) / prec_j;
      theta = mean_j + rng.normal() / std::sqrt(prec_j);
    } else {
      rng.normal();  // keep the stream aligned across tau = 0 draws
    }
    draws[n].theta = theta;
  }

  double sum_w = 0.0;
  double sum_w2 = 0.0;
  for (std::size_t n = 0; n < n_samples; ++n) {
    draws[n].weight = std::exp(log_w[n] - peak);
    sum_w += draws[n].weight;
    sum_w2 += draws[n].weight * draws[n].weight;
  }

  constexpr std::size_t kBatches = 100;
  const std::size_t batch = n_samples / kBatches;
  std::vector<double> batch_mean;
  std::vector<double> batch_sd;
  std::vector<std::vector<double>> batch_q(probabilities.size());
  for (std::size_t b = 0; b < kBatches; ++b) {
    std::vector<WeightedDraw> slice(draws.begin() + static_cast<std::ptrdiff_t>(b * batch),
                                    draws.begin() + static_cast<std::ptrdiff_t>((b + 1) * batch));
    const auto s = summarize(slice, probabilities);
    batch_mean.push_back(s.mean);
    batch_sd.push_back(s.sd);
    for (std::size_t q = 0; q < probabilities.size(); ++q) batch_q[q].push_back(s.quantiles[q]);
  }
  const auto full = summarize(draws, probabilities);

  ThetaSample out;
  auto estimate = [&](double value, const std::vector<double>& batches) {
    return OracleEstimate{value, batch_std_error(batches), Method::monte_carlo, n_samples, seed};
  };
  out.mean = estimate(full.mean, batch_mean);
  out.sd = estimate(full.sd, batch_sd);
  out.probabilities = probabilities;
  for (std::size_t q = 0; q < probabilities.size(); ++q)
    out.quantiles.push_back(estimate(full.quantiles[q], batch_q[q]));
  out.effective_sample_size = sum_w * sum_w / sum_w2;
  out.low_ess_warning = out.effective_sample_size < 100.0;
  return out;
}

}  // namespace shrinkbound::oracle
