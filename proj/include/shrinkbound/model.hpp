#pragma once

// Closed-form kernels of the normal-normal hierarchical model conditional on
// the heterogeneity tau, with an improper uniform prior on the overall mean:
//
//   y_i | theta_i ~ N(theta_i, sigma_i^2),  theta_i | mu, tau ~ N(mu, tau^2).
//
// Study indices are 0-based in the API; reports print them 1-based.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "shrinkbound/prior.hpp"

namespace shrinkbound {

struct Study {
  std::string label;
  double y = 0.0;
  double sigma = 1.0;
};

// Throws DomainError unless y is finite and sigma is positive and finite.
void validate_study(const Study& study);

class Dataset {
 public:
  // Requires k >= 2 valid studies with unique labels; throws DomainError.
  explicit Dataset(std::vector<Study> studies);

  // Labels default to "1", "2", ...
  static Dataset from_arrays(std::span<const double> y, std::span<const double> sigma);

  std::size_t size() const noexcept { return studies_.size(); }
  const Study& operator[](std::size_t i) const { return studies_[i]; }
  std::span<const Study> studies() const noexcept { return studies_; }

  std::vector<double> estimates() const;
  std::vector<double> std_errors() const;

  // Same labels and standard errors, new estimates.
  Dataset with_estimates(std::span<const double> y) const;

  // Index of the study with this label, or size() if absent.
  std::size_t find(const std::string& label) const;

 private:
  std::vector<Study> studies_;
};

// Dense k x k matrix, row-major. entry(i, j) is the weight of study i in the
// estimate of study j, so columns sum to one.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(std::size_t k) : k_(k), data_(k * k, 0.0) {}

  std::size_t size() const noexcept { return k_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * k_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * k_ + j]; }
  std::vector<double> column(std::size_t j) const;

 private:
  std::size_t k_ = 0;
  std::vector<double> data_;
};

struct NormalMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Everything the model knows at a single tau.
struct ConditionalState {
  double tau = 0.0;
  double mu_cond_mean = 0.0;
  double mu_cond_var = 0.0;
  std::vector<double> iv_weights;
  std::vector<double> shrink_b;
  WeightMatrix shrink_c;
};

// Inverse-variance weights w_j(tau); sum to one.
std::vector<double> iv_weights(const Dataset& data, double tau);

// Conditional posterior of mu given tau: mean sum_j w_j y_j and variance
// 1 / sum_i (sigma_i^2 + tau^2)^-1.
NormalMoments conditional_mu(const Dataset& data, double tau);

// b_j(tau) = tau^2 / (sigma_j^2 + tau^2); exactly 0 at tau = 0.
double shrink_b(double sigma, double tau);

// c_jj = b_j + (1 - b_j) w_j, c_ij = (1 - b_j) w_i for i != j.
WeightMatrix shrink_matrix(const Dataset& data, double tau);

// Conditional posterior of theta_j given tau. Variance is
// (1 - b_j)^2 V_mu + sigma_j^2 tau^2 / (sigma_j^2 + tau^2).
NormalMoments conditional_theta(const Dataset& data, std::size_t j, double tau);

ConditionalState conditional_state(const Dataset& data, double tau);

// exp(-(y2 - y1)^2 / (2 (sigma1^2 + sigma2^2 + 2 tau^2))); k = 2 only.
double g_term(const Dataset& data, double tau);

// Log of the uniform-mu marginal likelihood p(y | tau) up to a constant:
//   -1/2 sum log(s_i) - 1/2 log sum 1/s_i - 1/2 sum (y_i - mu~)^2 / s_i,
// with s_i = sigma_i^2 + tau^2.
double log_marginal_likelihood(const Dataset& data, double tau);

// log p(tau) + log_marginal_likelihood; -inf outside the prior support.
double tau_log_posterior_unnorm(const Dataset& data, const HeterogeneityPrior& prior,
                                double tau);

}  // namespace shrinkbound
