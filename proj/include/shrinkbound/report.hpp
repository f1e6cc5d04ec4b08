#pragma once

// Analysis assembly and rendering (text / JSON / CSV) for the CLI.
// Text output prints weights as percentages with one decimal and effects
// with three decimals; JSON and CSV carry full double precision.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shrinkbound/bounds.hpp"
#include "shrinkbound/oracle.hpp"
#include "shrinkbound/posterior.hpp"

namespace shrinkbound::report {

struct AnalysisOptions {
  double level = 0.95;
  IntervalKind kind = IntervalKind::shortest;
  // Report a single study; all studies when empty.
  std::optional<std::size_t> target;
  bool oracle = false;
  std::size_t oracle_samples = 1'000'000;
  std::size_t oracle_grid = 1'000'000;
  std::uint64_t oracle_seed = 20210301;
  quad::QuadratureSettings settings{};
};

struct StudyRow {
  std::size_t index = 0;  // 0-based; printed 1-based
  std::string label;
  double y = 0.0;
  double sigma = 0.0;
  double fe_weight = 0.0;
  double coincidence_weight = 0.0;
  double actual_weight = 0.0;
  EffectSummary theta;
};

struct OracleCheck {
  std::size_t index = 0;
  double quadrature_weight = 0.0;
  oracle::OracleEstimate grid_weight;
  double quadrature_mean = 0.0;
  oracle::OracleEstimate mc_mean;
  Interval central;  // quadrature central interval at the report level
  oracle::OracleEstimate mc_lower;
  oracle::OracleEstimate mc_upper;
  bool agrees = false;  // weight within 1e-4, mean/quantiles within 3 MC SE
};

struct AnalysisReport {
  std::string prior;
  double level = 0.95;
  IntervalKind kind = IntervalKind::shortest;
  std::size_t study_count = 0;
  std::vector<std::string> labels;  // all studies, input order
  double tau_upper = 0.0;  // 0 for a single study
  std::vector<StudyRow> studies;
  std::optional<EffectSummary> overall;  // absent for a single study
  std::vector<OracleCheck> oracle;
};

// One study yields the plain normal summary with weight 1.
AnalysisReport run_analysis(const std::vector<Study>& studies, const HeterogeneityPrior& prior,
                            const AnalysisOptions& options = {});

std::string interval_kind_name(IntervalKind kind);

void write_text(std::ostream& out, const AnalysisReport& report);
nlohmann::json to_json(const AnalysisReport& report);
void write_csv(std::ostream& out, const AnalysisReport& report);

void write_text(std::ostream& out, const BoundsReport& report);
nlohmann::json to_json(const BoundsReport& report);
void write_csv(std::ostream& out, const BoundsReport& report);

// Header `delta,weight,mean,lo,hi` or `scale,weight,mean,lo,hi`.
void write_csv(std::ostream& out, const SweepTable& table);

}  // namespace shrinkbound::report
