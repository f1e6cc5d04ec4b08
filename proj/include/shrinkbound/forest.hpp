#pragma once

#include <span>
#include <string>
#include <vector>

#include "shrinkbound/model.hpp"
#include "shrinkbound/posterior.hpp"

namespace shrinkbound::plot {

struct ForestRow {
  std::string label;
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool shrinkage = false;
};

struct ShrinkageMarker {
  std::size_t study = 0;  // 0-based index into the study list
  EffectSummary summary;
};

// One row per study (y +- z sigma with z the normal quantile at
// (1 + level) / 2), then one shrinkage row per marker.
std::vector<ForestRow> forest_rows(std::span<const Study> studies,
                                   std::span<const ShrinkageMarker> markers, double level = 0.95);

// Fixed 640-pixel-wide layout; byte-identical output for identical rows.
std::string render_forest_svg(std::span<const ForestRow> rows);

}  // namespace shrinkbound::plot
