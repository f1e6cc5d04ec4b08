#include "shrinkbound/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "shrinkbound/errors.hpp"

namespace shrinkbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << what << " must be positive and finite, got " << value;
    throw DomainError(os.str());
  }
}

// Linear interpolation of ys over the increasing grid xs; zero outside.
double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x < xs.front() || x > xs.back()) return 0.0;
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.end()) return ys.back();
  const auto i = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

}  // namespace

HeterogeneityPrior HeterogeneityPrior::half_normal(double scale) {
  require_positive(scale, "half-normal scale");
  return HeterogeneityPrior(HalfNormal{scale});
}

HeterogeneityPrior HeterogeneityPrior::half_cauchy(double scale) {
  require_positive(scale, "half-Cauchy scale");
  return HeterogeneityPrior(HalfCauchy{scale});
}

HeterogeneityPrior HeterogeneityPrior::uniform(double upper) {
  require_positive(upper, "uniform upper bound");
  return HeterogeneityPrior(Uniform{upper});
}

HeterogeneityPrior HeterogeneityPrior::tabulated(std::vector<double> tau,
                                                 std::vector<double> density) {
  if (tau.size() < 2 || tau.size() != density.size())
    throw DomainError("tabulated prior needs >= 2 (tau, density) pairs of equal length");
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!std::isfinite(tau[i]) || tau[i] < 0.0)
      throw DomainError("tabulated prior tau values must be finite and nonnegative");
    if (i > 0 && !(tau[i] > tau[i - 1]))
      throw DomainError("tabulated prior tau values must be strictly increasing");
    if (!std::isfinite(density[i]) || density[i] < 0.0)
      throw DomainError("tabulated prior densities must be finite and nonnegative");
  }

  std::vector<double> cdf(tau.size(), 0.0);
  for (std::size_t i = 1; i < tau.size(); ++i)
    cdf[i] = cdf[i - 1] + 0.5 * (density[i] + density[i - 1]) * (tau[i] - tau[i - 1]);
  const double total = cdf.back();
  if (!(total > 0.0)) throw DomainError("tabulated prior has zero total mass");
  for (std::size_t i = 0; i < tau.size(); ++i) {
    density[i] /= total;
    cdf[i] /= total;
  }
  cdf.back() = 1.0;
  return HeterogeneityPrior(std::make_shared<const Table>(
      Table{std::move(tau), std::move(density), std::move(cdf)}));
}

HeterogeneityPrior::Kind HeterogeneityPrior::kind() const noexcept {
  return std::visit(overloaded{
                        [](const HalfNormal&) { return Kind::half_normal; },
                        [](const HalfCauchy&) { return Kind::half_cauchy; },
                        [](const Uniform&) { return Kind::uniform; },
                        [](const Tabulated&) { return Kind::tabulated; },
                    },
                    family_);
}

double HeterogeneityPrior::parameter() const noexcept {
  return std::visit(overloaded{
                        [](const HalfNormal& p) { return p.scale; },
                        [](const HalfCauchy& p) { return p.scale; },
                        [](const Uniform& p) { return p.upper; },
                        [](const Tabulated& t) { return t->tau.back(); },
                    },
                    family_);
}

double HeterogeneityPrior::density(double tau) const {
  if (std::isnan(tau)) throw DomainError("prior density evaluated at NaN");
  if (tau < 0.0) return 0.0;
  return std::visit(
      overloaded{
          [tau](const HalfNormal& p) {
            const double z = tau / p.scale;
            return std::numbers::sqrt2 * std::numbers::inv_sqrtpi / p.scale *
                   std::exp(-0.5 * z * z);
          },
          [tau](const HalfCauchy& p) {
            const double z = tau / p.scale;
            return 2.0 / (std::numbers::pi * p.scale * (1.0 + z * z));
          },
          [tau](const Uniform& p) { return tau <= p.upper ? 1.0 / p.upper : 0.0; },
          [tau](const Tabulated& t) { return interpolate(t->tau, t->density, tau); },
      },
      family_);
}

double HeterogeneityPrior::log_density(double tau) const {
  if (const auto* hn = std::get_if<HalfNormal>(&family_); hn && tau >= 0.0) {
    const double z = tau / hn->scale;
    return 0.5 * std::log(2.0 / std::numbers::pi) - std::log(hn->scale) - 0.5 * z * z;
  }
  if (const auto* hc = std::get_if<HalfCauchy>(&family_); hc && tau >= 0.0) {
    const double z = tau / hc->scale;
    return std::log(2.0 / std::numbers::pi) - std::log(hc->scale) - std::log1p(z * z);
  }
  const double d = density(tau);
  return d > 0.0 ? std::log(d) : -kInf;
}

double HeterogeneityPrior::cdf(double tau) const {
  if (std::isnan(tau)) throw DomainError("prior cdf evaluated at NaN");
  if (tau <= 0.0) return 0.0;
  return std::visit(
      overloaded{
          [tau](const HalfNormal& p) {
            return std::erf(tau / (p.scale * std::numbers::sqrt2));
          },
          [tau](const HalfCauchy& p) {
            return 2.0 * std::numbers::inv_pi * std::atan(tau / p.scale);
          },
          [tau](const Uniform& p) { return std::min(tau / p.upper, 1.0); },
          [tau](const Tabulated& t) {
            if (tau >= t->tau.back()) return 1.0;
            if (tau <= t->tau.front()) return 0.0;
            return interpolate(t->tau, t->cdf, tau);
          },
      },
      family_);
}

double HeterogeneityPrior::quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0)) {
    // p = 1 is admitted only for bounded supports.
    if (p == 1.0 && std::isfinite(support_upper())) return support_upper();
    throw DomainError("prior quantile requires 0 <= p < 1, got " + std::to_string(p));
  }
  return std::visit(
      overloaded{
          [p](const HalfNormal& hn) {
            return hn.scale * std::numbers::sqrt2 * boost::math::erf_inv(p);
          },
          [p](const HalfCauchy& hc) {
            return hc.scale * std::tan(0.5 * std::numbers::pi * p);
          },
          [p](const Uniform& u) { return p * u.upper; },
          [p](const Tabulated& t) {
            const auto& c = t->cdf;
            // First node whose cumulative mass reaches p.
            auto it = std::lower_bound(c.begin(), c.end(), p);
            const auto i = static_cast<std::size_t>(it - c.begin());
            if (i == 0) return t->tau.front();
            const double span = c[i] - c[i - 1];
            const double frac = span > 0.0 ? (p - c[i - 1]) / span : 0.0;
            return t->tau[i - 1] + frac * (t->tau[i] - t->tau[i - 1]);
          },
      },
      family_);
}

double HeterogeneityPrior::support_upper() const noexcept {
  return std::visit(overloaded{
                        [](const HalfNormal&) { return kInf; },
                        [](const HalfCauchy&) { return kInf; },
                        [](const Uniform& u) { return u.upper; },
                        [](const Tabulated& t) { return t->tau.back(); },
                    },
                    family_);
}

std::string HeterogeneityPrior::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&os](const HalfNormal& p) { os << "half-normal(" << p.scale << ")"; },
                 [&os](const HalfCauchy& p) { os << "half-Cauchy(" << p.scale << ")"; },
                 [&os](const Uniform& p) { os << "uniform(0, " << p.upper << ")"; },
                 [&os](const Tabulated& t) {
                   os << "tabulated(" << t->tau.size() << " points on [" << t->tau.front()
                      << ", " << t->tau.back() << "])";
                 },
             },
             family_);
  return os.str();
}

}  // namespace shrinkbound
