#include "shrinkbound/model.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "shrinkbound/errors.hpp"

namespace shrinkbound {

namespace {

void check_tau(double tau) {
  if (!std::isfinite(tau) || tau < 0.0) {
    std::ostringstream os;
    os << "tau must be finite and nonnegative, got " << tau;
    throw DomainError(os.str());
  }
}

void check_index(const Dataset& data, std::size_t j) {
  if (j >= data.size()) {
    std::ostringstream os;
    os << "study index " << j << " out of range for k = " << data.size();
    throw DomainError(os.str());
  }
}

}  // namespace

void validate_study(const Study& study) {
  if (!std::isfinite(study.y)) throw DomainError("study '" + study.label + "': y is not finite");
  if (!std::isfinite(study.sigma) || !(study.sigma > 0.0))
    throw DomainError("study '" + study.label + "': sigma must be positive and finite");
}

Dataset::Dataset(std::vector<Study> studies) : studies_(std::move(studies)) {
  if (studies_.size() < 2) throw DomainError("a dataset needs at least two studies");
  std::set<std::string> seen;
  for (const auto& s : studies_) {
    validate_study(s);
    if (!seen.insert(s.label).second) throw DomainError("duplicate study label '" + s.label + "'");
  }
}

Dataset Dataset::from_arrays(std::span<const double> y, std::span<const double> sigma) {
  if (y.size() != sigma.size()) throw DomainError("y and sigma differ in length");
  std::vector<Study> studies;
  studies.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    studies.push_back({std::to_string(i + 1), y[i], sigma[i]});
  return Dataset(std::move(studies));
}

std::vector<double> Dataset::estimates() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& s : studies_) out.push_back(s.y);
  return out;
}

std::vector<double> Dataset::std_errors() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& s : studies_) out.push_back(s.sigma);
  return out;
}

Dataset Dataset::with_estimates(std::span<const double> y) const {
  if (y.size() != size()) throw DomainError("with_estimates: length mismatch");
  std::vector<Study> studies = studies_;
  for (std::size_t i = 0; i < y.size(); ++i) studies[i].y = y[i];
  return Dataset(std::move(studies));
}

std::size_t Dataset::find(const std::string& label) const {
  for (std::size_t i = 0; i < studies_.size(); ++i)
    if (studies_[i].label == label) return i;
  return studies_.size();
}

std::vector<double> WeightMatrix::column(std::size_t j) const {
  std::vector<double> out(k_);
  for (std::size_t i = 0; i < k_; ++i) out[i] = (*this)(i, j);
  return out;
}

std::vector<double> iv_weights(const Dataset& data, double tau) {
  check_tau(tau);
  const double tau2 = tau * tau;
  std::vector<double> w(data.size());
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double s = data[i].sigma;
    w[i] = 1.0 / (s * s + tau2);
    total += w[i];
  }
  for (double& wi : w) wi /= total;
  return w;
}

NormalMoments conditional_mu(const Dataset& data, double tau) {
  check_tau(tau);
  const double tau2 = tau * tau;
  double precision = 0.0;
  double weighted = 0.0;
  for (const auto& s : data.studies()) {
    const double u = 1.0 / (s.sigma * s.sigma + tau2);
    precision += u;
    weighted += u * s.y;
  }
  return {weighted / precision, 1.0 / precision};
}

double shrink_b(double sigma, double tau) {
  if (!std::isfinite(sigma) || !(sigma > 0.0)) throw DomainError("shrink_b: sigma must be positive");
  check_tau(tau);
  if (tau == 0.0) return 0.0;
  const double tau2 = tau * tau;
  return tau2 / (sigma * sigma + tau2);
}

WeightMatrix shrink_matrix(const Dataset& data, double tau) {
  const auto w = iv_weights(data, tau);
  const std::size_t k = data.size();
  WeightMatrix c(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double b = shrink_b(data[j].sigma, tau);
    for (std::size_t i = 0; i < k; ++i) c(i, j) = (1.0 - b) * w[i];
    c(j, j) += b;
  }
  return c;
}

NormalMoments conditional_theta(const Dataset& data, std::size_t j, double tau) {
  check_index(data, j);
  const auto mu = conditional_mu(data, tau);
  const double sigma = data[j].sigma;
  const double b = shrink_b(sigma, tau);
  const double tau2 = tau * tau;
  // (sigma^-2 + tau^-2)^-1, defined as 0 at tau = 0.
  const double own = tau == 0.0 ? 0.0 : sigma * sigma * tau2 / (sigma * sigma + tau2);
  return {b * data[j].y + (1.0 - b) * mu.mean, (1.0 - b) * (1.0 - b) * mu.variance + own};
}

ConditionalState conditional_state(const Dataset& data, double tau) {
  ConditionalState st;
  st.tau = tau;
  const auto mu = conditional_mu(data, tau);
  st.mu_cond_mean = mu.mean;
  st.mu_cond_var = mu.variance;
  st.iv_weights = iv_weights(data, tau);
  st.shrink_b.reserve(data.size());
  for (const auto& s : data.studies()) st.shrink_b.push_back(shrink_b(s.sigma, tau));
  st.shrink_c = shrink_matrix(data, tau);
  return st;
}

double g_term(const Dataset& data, double tau) {
  if (data.size() != 2) throw UnsupportedError("g_term is the k = 2 closed form");
  check_tau(tau);
  const double d = data[1].y - data[0].y;
  const double s1 = data[0].sigma;
  const double s2 = data[1].sigma;
  return std::exp(-0.5 * d * d / (s1 * s1 + s2 * s2 + 2.0 * tau * tau));
}

double log_marginal_likelihood(const Dataset& data, double tau) {
  check_tau(tau);
  const double tau2 = tau * tau;
  double sum_log_s = 0.0;
  double precision = 0.0;
  double weighted = 0.0;
  for (const auto& s : data.studies()) {
    const double v = s.sigma * s.sigma + tau2;
    sum_log_s += std::log(v);
    precision += 1.0 / v;
    weighted += s.y / v;
  }
  const double mu = weighted / precision;
  double residual = 0.0;
  for (const auto& s : data.studies()) {
    const double r = s.y - mu;
    residual += r * r / (s.sigma * s.sigma + tau2);
  }
  return -0.5 * sum_log_s - 0.5 * std::log(precision) - 0.5 * residual;
}

double tau_log_posterior_unnorm(const Dataset& data, const HeterogeneityPrior& prior,
                                double tau) {
  check_tau(tau);
  const double log_prior = prior.log_density(tau);
  if (log_prior == -std::numeric_limits<double>::infinity()) return log_prior;
  return log_prior + log_marginal_likelihood(data, tau);
}

}  // namespace shrinkbound
