#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "shrinkbound/model.hpp"

namespace testing {

inline std::string data_path(const std::string& name) {
  return std::string(SHRINKBOUND_DATA_DIR) + "/" + name;
}

inline shrinkbound::Dataset cjd() {
  return shrinkbound::Dataset({{"observational", -0.499, 0.249}, {"randomized", -0.173, 0.631}});
}

inline shrinkbound::Dataset acidosis() {
  return shrinkbound::Dataset(
      {{"Amer-Wahlin (2001)", -0.764, 0.313}, {"Westerhuis (2007)", -0.401, 0.287}});
}

// Random instance: sigma log-uniform on [0.05, 2], y normal around 0 with a
// spread comparable to the standard errors.
inline shrinkbound::Dataset random_dataset(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> log_sigma(std::log(0.05), std::log(2.0));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> y(k);
  std::vector<double> sigma(k);
  for (std::size_t i = 0; i < k; ++i) {
    sigma[i] = std::exp(log_sigma(rng));
    y[i] = noise(rng) * (0.3 + sigma[i]);
  }
  return shrinkbound::Dataset::from_arrays(y, sigma);
}

// 64-point grid: 0 followed by geometric steps up to 1e3 * max sigma.
inline std::vector<double> geometric_tau_grid(double max_sigma, std::size_t n = 64) {
  std::vector<double> grid{0.0};
  const double lo = 1e-4 * max_sigma;
  const double hi = 1e3 * max_sigma;
  for (std::size_t i = 0; i + 1 < n; ++i)
    grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 2)));
  return grid;
}

}  // namespace testing
