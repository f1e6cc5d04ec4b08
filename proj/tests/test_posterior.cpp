#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "shrinkbound/errors.hpp"
#include "shrinkbound/posterior.hpp"
#include "support.hpp"

using namespace shrinkbound;

TEST_CASE("tau posterior is normalized") {
  const auto tp = TauPosterior::fit(testing::cjd(), HeterogeneityPrior::half_normal(0.5));
  CHECK(std::abs(tp.expect([](double) { return 1.0; }) - 1.0) < 1e-6);
  CHECK(tp.cdf(tp.upper()) >= 1.0 - 1e-6);
  CHECK(tp.cdf(0.0) == 0.0);
  CHECK_THROWS_AS(tp.density(-1.0), DomainError);
  double prev = 0.0;
  for (double t = 0.05; t < 3.0; t += 0.05) {
    CHECK(tp.density(t) >= 0.0);
    const double c = tp.cdf(t);
    CHECK(c >= prev);
    prev = c;
  }
  const std::vector<double> grid{0.1, 0.4, 0.9, 2.0};
  const auto cdfs = tp.cdf_on_grid(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(cdfs[i] - tp.cdf(grid[i])) < 1e-9);
}

TEST_CASE("uniform prior, coinciding estimates, equal sigma: density is the normalized likelihood") {
  const auto d = Dataset::from_arrays(std::vector<double>{0.1, 0.1}, std::vector<double>{0.5, 0.5});
  const auto tp = TauPosterior::fit(d, HeterogeneityPrior::uniform(2.0));
  CHECK(tp.upper() == 2.0);
  // p(tau) ∝ (2 (0.25 + tau^2))^{-1/2} on [0, 2].
  const double z = std::asinh(2.0 / 0.5) / std::sqrt(2.0);
  for (double tau : {0.0, 0.3, 1.0, 1.9})
    CHECK(std::abs(tp.density(tau) - 1.0 / std::sqrt(2.0 * (0.25 + tau * tau)) / z) < 1e-8);
  CHECK(tp.density(2.5) == 0.0);
}

TEST_CASE("expected weights: published CJD and acidosis values") {
  const auto cjd05 = expected_weights(TauPosterior::fit(testing::cjd(), HeterogeneityPrior::half_normal(0.5)));
  CHECK(std::abs(cjd05.shrink(1, 1) - 0.395) < 0.005);
  const auto cjd10 = expected_weights(TauPosterior::fit(testing::cjd(), HeterogeneityPrior::half_normal(1.0)));
  CHECK(std::abs(cjd10.shrink(1, 1) - 0.531) < 0.005);
  const auto ac05 = expected_weights(TauPosterior::fit(testing::acidosis(), HeterogeneityPrior::half_normal(0.5)));
  CHECK(std::abs(ac05.shrink(1, 1) - 0.740) < 0.005);
  for (const auto* e : {&cjd05, &cjd10, &ac05}) {
    CHECK(std::abs(std::accumulate(e->iv.begin(), e->iv.end(), 0.0) - 1.0) < 1e-8);
    for (std::size_t j = 0; j < 2; ++j) {
      const auto col = e->shrink.column(j);
      CHECK(std::abs(std::accumulate(col.begin(), col.end(), 0.0) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("marginal theta: published CJD and acidosis summaries") {
  const auto tp = TauPosterior::fit(testing::cjd(), HeterogeneityPrior::half_normal(0.5));
  const auto s = marginal_theta(tp, 1);
  CHECK(std::abs(s.mean - (-0.370)) < 0.005);
  CHECK(std::abs(s.interval.lo - (-1.157)) < 0.02);
  CHECK(std::abs(s.interval.hi - 0.477) < 0.02);
  CHECK(s.kind == IntervalKind::shortest);

  const auto ac = TauPosterior::fit(testing::acidosis(), HeterogeneityPrior::half_normal(1.0));
  const auto a = marginal_theta(ac, 1);
  CHECK(std::abs(a.mean - (-0.472)) < 0.005);
  CHECK(std::abs(a.interval.lo - (-0.983)) < 0.02);
  CHECK(std::abs(a.interval.hi - 0.051) < 0.02);
}

TEST_CASE("single study summary is the plain normal") {
  const auto s = single_study_summary({"randomized", -0.173, 0.631});
  CHECK(s.mean == -0.173);
  CHECK(s.sd == 0.631);
  CHECK(s.weights == std::vector<double>{1.0});
  CHECK(std::abs(s.interval.lo - (-1.410)) < 0.002);
  CHECK(std::abs(s.interval.hi - 1.064) < 0.002);
}

TEST_CASE("mean identity and interval properties on random instances") {
  std::mt19937_64 rng(11);
  for (std::size_t k : {2u, 3u, 5u}) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto d = testing::random_dataset(rng, k);
      const auto tp = TauPosterior::fit(d, HeterogeneityPrior::half_normal(0.5));
      const auto w = expected_weights(tp);
      const auto y = d.estimates();
      for (std::size_t j = 0; j < k; ++j) {
        const auto mix = theta_distribution(tp, j);
        double combo = 0.0;
        for (std::size_t i = 0; i < k; ++i) combo += w.shrink(i, j) * y[i];
        CHECK(std::abs(mix.mean() - combo) < 1e-8);
        CHECK(w.shrink(j, j) >= shrink_matrix(d, 0.0)(j, j));
        for (auto kind : {IntervalKind::central, IntervalKind::shortest}) {
          const auto iv = mix.interval(0.95, kind);
          CHECK(iv.lo < mix.mean());
          CHECK(mix.mean() < iv.hi);
          CHECK(std::abs(mix.cdf(iv.hi) - mix.cdf(iv.lo) - 0.95) < 1e-7);
        }
        const auto c = mix.central_interval(0.9);
        const auto sh = mix.shortest_interval(0.9);
        CHECK(sh.hi - sh.lo <= c.hi - c.lo + 1e-7);
        for (double x : {-0.5, 0.0, 0.4}) {
          const double p = mix.cdf(x);
          if (p > 1e-6 && p < 1 - 1e-6) CHECK(std::abs(mix.quantile(p) - x) < 1e-6);
        }
      }
      double combo = 0.0;
      for (std::size_t i = 0; i < k; ++i) combo += w.iv[i] * y[i];
      CHECK(std::abs(mu_distribution(tp).mean() - combo) < 1e-8);
    }
  }
}

TEST_CASE("overall effect: symmetric and coinciding cases") {
  const auto same = Dataset::from_arrays(std::vector<double>{0.42, 0.42}, std::vector<double>{0.3, 0.9});
  CHECK(std::abs(marginal_mu(TauPosterior::fit(same, HeterogeneityPrior::half_cauchy(1.0))).mean - 0.42) < 1e-10);
  const auto eq = Dataset::from_arrays(std::vector<double>{-0.2, 0.6}, std::vector<double>{0.4, 0.4});
  CHECK(std::abs(marginal_mu(TauPosterior::fit(eq, HeterogeneityPrior::half_normal(0.5))).mean - 0.2) < 1e-10);
}

TEST_CASE("shrinkage analysis collects every study") {
  const auto tp = TauPosterior::fit(testing::acidosis(), HeterogeneityPrior::half_normal(0.5));
  const auto r = shrinkage_analysis(tp, 0.9, IntervalKind::central);
  REQUIRE(r.theta.size() == 2);
  CHECK(r.theta[1].level == 0.9);
  CHECK(r.theta[1].kind == IntervalKind::central);
  CHECK(r.mu.weights.size() == 2);
  CHECK(std::abs(r.theta[1].mean - marginal_theta(tp, 1).mean) < 1e-15);
  CHECK_THROWS_AS(marginal_theta(tp, 2), DomainError);
  CHECK_THROWS_AS(marginal_theta(tp, 0, 1.0), DomainError);
}
