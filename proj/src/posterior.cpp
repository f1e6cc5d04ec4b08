#include "shrinkbound/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shrinkbound/errors.hpp"

namespace shrinkbound {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Density ratio (relative to the peak) below which the support is cut.
const double kLogNegligible = std::log(1e-12);

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    std::ostringstream os;
    os << "credible level must lie in (0, 1), got " << level;
    throw DomainError(os.str());
  }
}

double scan_peak(const TauPosterior& tp, const std::vector<double>& breaks, double upper) {
  double peak = kNegInf;
  for (double t : breaks) peak = std::max(peak, tp.log_unnorm(t));
  constexpr int kScan = 256;
  for (int i = 0; i <= kScan; ++i) peak = std::max(peak, tp.log_unnorm(upper * i / kScan));
  return peak;
}

std::vector<double> geometric_breaks(double first, double upper) {
  std::vector<double> out{0.0};
  for (double t = first; t < upper * (1.0 - 1e-9); t *= 2.0) out.push_back(t);
  out.push_back(upper);
  return out;
}

}  // namespace

TauPosterior TauPosterior::fit(Dataset data, HeterogeneityPrior prior,
                               quad::QuadratureSettings settings) {
  settings.validate();
  TauPosterior tp(std::move(data), std::move(prior), settings);

  const auto sigmas = tp.data_.std_errors();
  const double min_sigma = *std::min_element(sigmas.begin(), sigmas.end());
  const double prior_median = tp.prior_.quantile(0.5);
  const double bounded = tp.prior_.support_upper();

  double upper = std::isfinite(bounded) ? bounded
                                        : tp.prior_.quantile(1.0 - settings.tail_mass_cutoff);
  const double first = std::min(min_sigma, prior_median > 0.0 ? prior_median : min_sigma) / 16.0;

  auto breaks = geometric_breaks(first, upper);
  double peak = scan_peak(tp, breaks, upper);
  if (!std::isfinite(bounded)) {
    for (int doubling = 0; tp.log_unnorm(upper) - peak > kLogNegligible; ++doubling) {
      if (doubling == 64)
        throw ConvergenceError("tau posterior support did not close after 64 doublings",
                               upper, 0.0);
      upper *= 2.0;
      breaks = geometric_breaks(first, upper);
      peak = scan_peak(tp, breaks, upper);
    }
  }
  if (!std::isfinite(peak))
    throw DomainError("tau posterior vanishes on the prior support");

  tp.upper_ = upper;
  tp.breakpoints_ = std::move(breaks);
  // Integrate exp(lu - peak) so the integrand stays O(1).
  tp.log_norm_ = peak;
  const auto z = quad::integrate([&tp](double t) { return tp.density(t); }, tp.breakpoints_,
                                 settings);
  tp.log_norm_ = peak + std::log(z.value);
  return tp;
}

double TauPosterior::log_unnorm(double tau) const {
  return tau_log_posterior_unnorm(data_, prior_, tau);
}

double TauPosterior::density(double tau) const {
  const double lu = log_unnorm(tau);
  return lu == kNegInf ? 0.0 : std::exp(lu - log_norm_);
}

std::vector<double> TauPosterior::breakpoints_up_to(double tau) const {
  std::vector<double> out;
  for (double b : breakpoints_) {
    if (b >= tau) break;
    out.push_back(b);
  }
  out.push_back(tau);
  return out;
}

double TauPosterior::cdf(double tau) const {
  if (std::isnan(tau)) throw DomainError("cdf evaluated at NaN");
  if (tau <= 0.0) return 0.0;
  if (tau >= upper_) return 1.0;
  const auto breaks = breakpoints_up_to(tau);
  const auto r = quad::integrate([this](double t) { return density(t); }, breaks, settings_);
  return std::clamp(r.value, 0.0, 1.0);
}

std::vector<double> TauPosterior::cdf_on_grid(std::span<const double> grid) const {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("cdf_on_grid: grid must be increasing");

  auto f = [this](double t) { return density(t); };
  std::vector<double> cumulative(grid.size(), 0.0);
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = std::min(grid[i], upper_);
    if (t > prev) {
      std::vector<double> panel;
      for (double b : breakpoints_)
        if (b > prev && b < t) panel.push_back(b);
      panel.insert(panel.begin(), prev);
      panel.push_back(t);
      acc += quad::integrate(f, panel, settings_).value;
      prev = t;
    }
    cumulative[i] = acc;
  }
  double total = acc;
  if (prev < upper_) {
    std::vector<double> panel{prev};
    for (double b : breakpoints_)
      if (b > prev && b < upper_) panel.push_back(b);
    panel.push_back(upper_);
    total += quad::integrate(f, panel, settings_).value;
  }
  for (double& c : cumulative) c = std::clamp(c / total, 0.0, 1.0);
  return cumulative;
}

double TauPosterior::expect(const quad::Function& fn) const {
  return quad::integrate([this, &fn](double t) {
    const double d = density(t);
    return d == 0.0 ? 0.0 : fn(t) * d;
  },
                         breakpoints_, settings_)
      .value;
}

NormalMixture::NormalMixture(const TauPosterior& tau_posterior, Component component)
    : tp_(tau_posterior), component_(std::move(component)) {
  mean_ = tp_.expect([this](double t) { return component_(t).mean; });
  const double within = tp_.expect([this](double t) { return component_(t).variance; });
  const double between = tp_.expect([this](double t) {
    const double d = component_(t).mean - mean_;
    return d * d;
  });
  variance_ = within + between;
}

double NormalMixture::sd() const { return std::sqrt(variance_); }

double NormalMixture::cdf(double x) const {
  if (std::isnan(x)) throw DomainError("mixture cdf evaluated at NaN");
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double v = tp_.expect([this, x](double t) {
    const auto c = component_(t);
    return quad::normal_cdf((x - c.mean) / std::sqrt(c.variance));
  });
  return std::clamp(v, 0.0, 1.0);
}

double NormalMixture::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("mixture quantile requires 0 < p < 1");
  const double s = sd();
  double lo = mean_ - 8.0 * s;
  double hi = mean_ + 8.0 * s;
  for (int i = 0; i < 60 && cdf(lo) > p; ++i) lo -= (hi - lo);
  for (int i = 0; i < 60 && cdf(hi) < p; ++i) hi += (hi - lo);
  return quad::find_root([this, p](double x) { return cdf(x) - p; }, lo, hi, 1e-10 * s);
}

Interval NormalMixture::central_interval(double level) const {
  check_level(level);
  const double tail = 0.5 * (1.0 - level);
  return {quantile(tail), quantile(1.0 - tail)};
}

Interval NormalMixture::shortest_interval(double level) const {
  check_level(level);
  constexpr double kEdge = 1e-6;
  if (1.0 - level - kEdge <= kEdge) return central_interval(level);
  const double lo_min = quantile(kEdge);
  const double lo_max = quantile(1.0 - level - kEdge);
  auto upper_for = [this, level](double lo) {
    return quantile(std::min(cdf(lo) + level, 1.0 - 1e-12));
  };
  const double lo = quad::golden_section_minimize(
      [&](double x) { return upper_for(x) - x; }, lo_min, lo_max, 1e-7 * sd());
  return {lo, upper_for(lo)};
}

Interval NormalMixture::interval(double level, IntervalKind kind) const {
  return kind == IntervalKind::central ? central_interval(level) : shortest_interval(level);
}

double expected_shrink_weight(const TauPosterior& tp, std::size_t i, std::size_t j) {
  const auto& data = tp.dataset();
  if (i >= data.size() || j >= data.size()) throw DomainError("weight index out of range");
  return tp.expect([&data, i, j](double t) {
    const double b = shrink_b(data[j].sigma, t);
    const double w = iv_weights(data, t)[i];
    return i == j ? b + (1.0 - b) * w : (1.0 - b) * w;
  });
}

ExpectedWeights expected_weights(const TauPosterior& tp) {
  const std::size_t k = tp.dataset().size();
  ExpectedWeights out{std::vector<double>(k), WeightMatrix(k)};
  for (std::size_t i = 0; i < k; ++i) {
    out.iv[i] = tp.expect([&tp, i](double t) { return iv_weights(tp.dataset(), t)[i]; });
    for (std::size_t j = 0; j < k; ++j) out.shrink(i, j) = expected_shrink_weight(tp, i, j);
  }
  return out;
}

NormalMixture theta_distribution(const TauPosterior& tp, std::size_t j) {
  if (j >= tp.dataset().size()) throw DomainError("study index out of range");
  return NormalMixture(tp, [data = tp.dataset(), j](double t) { return conditional_theta(data, j, t); });
}

NormalMixture mu_distribution(const TauPosterior& tp) {
  return NormalMixture(tp, [data = tp.dataset()](double t) { return conditional_mu(data, t); });
}

EffectSummary marginal_theta(const TauPosterior& tp, std::size_t j, double level,
                             IntervalKind kind) {
  check_level(level);
  const auto dist = theta_distribution(tp, j);
  EffectSummary out;
  const std::size_t k = tp.dataset().size();
  out.weights.resize(k);
  for (std::size_t i = 0; i < k; ++i) out.weights[i] = expected_shrink_weight(tp, i, j);
  out.mean = dist.mean();
  out.sd = dist.sd();
  out.interval = dist.interval(level, kind);
  out.level = level;
  out.kind = kind;
  return out;
}

EffectSummary marginal_mu(const TauPosterior& tp, double level, IntervalKind kind) {
  check_level(level);
  const auto dist = mu_distribution(tp);
  EffectSummary out;
  const std::size_t k = tp.dataset().size();
  out.weights.resize(k);
  for (std::size_t i = 0; i < k; ++i)
    out.weights[i] = tp.expect([&tp, i](double t) { return iv_weights(tp.dataset(), t)[i]; });
  out.mean = dist.mean();
  out.sd = dist.sd();
  out.interval = dist.interval(level, kind);
  out.level = level;
  out.kind = kind;
  return out;
}

ShrinkageResult shrinkage_analysis(const TauPosterior& tp, double level, IntervalKind kind) {
  ShrinkageResult out;
  for (std::size_t j = 0; j < tp.dataset().size(); ++j)
    out.theta.push_back(marginal_theta(tp, j, level, kind));
  out.mu = marginal_mu(tp, level, kind);
  return out;
}

EffectSummary single_study_summary(const Study& study, double level) {
  validate_study(study);
  check_level(level);
  const double z = quad::normal_quantile(0.5 + 0.5 * level);
  EffectSummary out;
  out.weights = {1.0};
  out.mean = study.y;
  out.sd = study.sigma;
  out.interval = {study.y - z * study.sigma, study.y + z * study.sigma};
  out.level = level;
  out.kind = IntervalKind::shortest;
  return out;
}

}  // namespace shrinkbound
