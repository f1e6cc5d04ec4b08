#include "shrinkbound/forest.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "shrinkbound/errors.hpp"
#include "shrinkbound/quad.hpp"

namespace shrinkbound::plot {

namespace {

constexpr double kWidth = 640.0;
constexpr double kLabelColumn = 180.0;
constexpr double kRight = 610.0;
constexpr double kRowHeight = 28.0;
constexpr double kTop = 20.0;
constexpr double kAxisSpace = 40.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Tick spacing from {1, 2, 5} x 10^n giving at most ~6 ticks.
double tick_step(double span) {
  const double raw = span / 6.0;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * magnitude >= raw) return m * magnitude;
  return 10.0 * magnitude;
}

}  // namespace

std::vector<ForestRow> forest_rows(std::span<const Study> studies,
                                   std::span<const ShrinkageMarker> markers, double level) {
  const double z = quad::normal_quantile(0.5 + 0.5 * level);
  std::vector<ForestRow> rows;
  for (const auto& s : studies)
    rows.push_back({s.label, s.y, s.y - z * s.sigma, s.y + z * s.sigma, false});
  for (const auto& m : markers) {
    if (m.study >= studies.size()) throw DomainError("shrinkage marker refers to a missing study");
    rows.push_back({studies[m.study].label + " (shrinkage)", m.summary.mean, m.summary.interval.lo,
                    m.summary.interval.hi, true});
  }
  return rows;
}

std::string render_forest_svg(std::span<const ForestRow> rows) {
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.lo);
    hi = std::max(hi, r.hi);
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto px = [&](double x) { return kLabelColumn + (x - lo) / (hi - lo) * (kRight - kLabelColumn); };

  const double plot_bottom = kTop + kRowHeight * static_cast<double>(rows.size());
  const double height = plot_bottom + kAxisSpace;

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, height, kWidth, height);
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n",
                     kWidth, height);

  // Reference line at zero effect.
  svg += fmt::format(
      "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#999999\" "
      "stroke-dasharray=\"4 3\"/>\n",
      px(0.0), kTop, plot_bottom);

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double y = kTop + kRowHeight * (static_cast<double>(i) + 0.5);
    const char* colour = r.shrinkage ? "#1f4fbf" : "#000000";
    svg += fmt::format("<g class=\"{}\">\n", r.shrinkage ? "shrinkage" : "study");
    svg += fmt::format("  <text x=\"8\" y=\"{:.2f}\" fill=\"{}\">{}</text>\n", y + 4.0, colour,
                       escape(r.label));
    svg += fmt::format(
        "  <line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
        "stroke-width=\"1.5\"/>\n",
        px(r.lo), y, px(r.hi), y, colour);
    if (r.shrinkage) {
      const double cx = px(r.point);
      svg += fmt::format(
          "  <polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" "
          "fill=\"{}\"/>\n",
          cx - 6.0, y, cx, y - 6.0, cx + 6.0, y, cx, y + 6.0, colour);
    } else {
      svg += fmt::format(
          "  <rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"8\" height=\"8\" fill=\"{}\"/>\n",
          px(r.point) - 4.0, y - 4.0, colour);
    }
    svg += "</g>\n";
  }

  svg += fmt::format(
      "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#000000\"/>\n",
      kLabelColumn, plot_bottom, kRight, plot_bottom);
  const double step = tick_step(hi - lo);
  for (auto n = static_cast<long>(std::ceil(lo / step)); static_cast<double>(n) * step <= hi; ++n) {
    const double tick = static_cast<double>(n) * step;
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#000000\"/>\n",
        px(tick), plot_bottom, plot_bottom + 5.0);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n",
                       px(tick), plot_bottom + 18.0, tick);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace shrinkbound::plot
