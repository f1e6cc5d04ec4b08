#include "shrinkbound/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "shrinkbound/errors.hpp"

namespace shrinkbound::report {

namespace {

std::string pct(double w) { return fmt::format("{:.1f}%", 100.0 * w); }
std::string eff(double x) { return fmt::format("{:.3f}", x); }

std::size_t label_width(const std::vector<std::string>& labels, std::size_t minimum) {
  std::size_t w = minimum;
  for (const auto& l : labels) w = std::max(w, l.size());
  return w;
}

bool within(double a, const oracle::OracleEstimate& e, double slack = 0.0) {
  return std::abs(a - e.value) <= 3.0 * e.mc_std_error + slack;
}

nlohmann::json summary_json(const EffectSummary& s) {
  return {{"weights", s.weights}, {"mean", s.mean}, {"sd", s.sd},
          {"lo", s.interval.lo},  {"hi", s.interval.hi}};
}

nlohmann::json estimate_json(const oracle::OracleEstimate& e) {
  return {{"value", e.value},
          {"mc_std_error", e.mc_std_error},
          {"method", e.method == oracle::Method::grid ? "grid" : "monte-carlo"},
          {"sample_count", e.sample_count},
          {"seed", e.seed}};
}

}  // namespace

std::string interval_kind_name(IntervalKind kind) {
  return kind == IntervalKind::central ? "central" : "shortest";
}

AnalysisReport run_analysis(const std::vector<Study>& studies, const HeterogeneityPrior& prior,
                            const AnalysisOptions& options) {
  if (studies.empty()) throw DomainError("no studies to analyze");
  if (options.target && *options.target >= studies.size())
    throw DomainError("target study index out of range");

  AnalysisReport report;
  report.prior = prior.describe();
  report.level = options.level;
  report.kind = options.kind;
  report.study_count = studies.size();
  for (const auto& s : studies) report.labels.push_back(s.label);

  if (studies.size() == 1) {
    const auto s = single_study_summary(studies[0], options.level);
    report.studies.push_back({0, studies[0].label, studies[0].y, studies[0].sigma, 1.0, 1.0, 1.0, s});
    return report;
  }

  const Dataset data(studies);
  const auto sigmas = data.std_errors();
  const auto fe = fe_weights(sigmas);
  const auto coincidence = coincidence_weights(sigmas, prior, options.settings);
  const auto tp = TauPosterior::fit(data, prior, options.settings);
  report.tau_upper = tp.upper();

  for (std::size_t j = 0; j < data.size(); ++j) {
    if (options.target && *options.target != j) continue;
    const auto theta = marginal_theta(tp, j, options.level, options.kind);
    report.studies.push_back({j, data[j].label, data[j].y, data[j].sigma, fe[j], coincidence[j],
                              theta.weights[j], theta});

    if (options.oracle) {
      OracleCheck check;
      check.index = j;
      check.quadrature_weight = theta.weights[j];
      check.grid_weight = oracle::grid_expected_weight(data, prior, j, j, options.oracle_grid);
      check.quadrature_mean = theta.mean;
      const double tail = 0.5 * (1.0 - options.level);
      const auto mc = oracle::mc_theta_distribution(data, prior, j, options.oracle_samples,
                                                    options.oracle_seed, {tail, 1.0 - tail});
      check.mc_mean = mc.mean;
      check.mc_lower = mc.quantiles[0];
      check.mc_upper = mc.quantiles[1];
      check.central = theta_distribution(tp, j).central_interval(options.level);
      check.agrees = std::abs(check.quadrature_weight - check.grid_weight.value) <= 1e-4 &&
                     within(check.quadrature_mean, check.mc_mean) &&
                     within(check.central.lo, check.mc_lower) &&
                     within(check.central.hi, check.mc_upper);
      report.oracle.push_back(check);
    }
  }
  report.overall = marginal_mu(tp, options.level, options.kind);
  return report;
}

void write_text(std::ostream& out, const AnalysisReport& report) {
  const int level_pct = static_cast<int>(std::lround(100.0 * report.level));
  if (report.study_count == 1) {
    const auto& r = report.studies.front();
    fmt::print(out, "Single study '{}': normal posterior, no pooling\n\n", r.label);
    fmt::print(out, "  {:>7}  {:>7}  {:>6}  {}% CI\n", "weight", "mean", "sd", level_pct);
    fmt::print(out, "  {:>7}  {:>7}  {:>6}  [{}, {}]\n", pct(1.0), eff(r.theta.mean),
               eff(r.theta.sd), eff(r.theta.interval.lo), eff(r.theta.interval.hi));
    return;
  }

  const auto lw = label_width(report.labels, 12);

  fmt::print(out, "Shrinkage analysis: {} studies, prior {}, {}% {} intervals\n\n",
             report.study_count, report.prior, level_pct, interval_kind_name(report.kind));
  fmt::print(out, " j  {:<{}}  {:>7}  {:>6}  {:>6}  {:>6}  {:>6}  {:>7}  {:>6}  {}% CI\n", "study",
             lw, "y", "sigma", "FE", "coinc.", "actual", "mean", "sd", level_pct);
  for (const auto& r : report.studies) {
    fmt::print(out, "{:>2}  {:<{}}  {:>7}  {:>6}  {:>6}  {:>6}  {:>6}  {:>7}  {:>6}  [{}, {}]\n",
               r.index + 1, r.label, lw, eff(r.y), eff(r.sigma), pct(r.fe_weight),
               pct(r.coincidence_weight), pct(r.actual_weight), eff(r.theta.mean),
               eff(r.theta.sd), eff(r.theta.interval.lo), eff(r.theta.interval.hi));
  }
  if (report.overall) {
    const auto& o = *report.overall;
    fmt::print(out, "    {:<{}}  {:>7}  {:>6}  {:>6}  {:>6}  {:>6}  {:>7}  {:>6}  [{}, {}]\n",
               "overall (mu)", lw, "", "", "", "", "", eff(o.mean), eff(o.sd), eff(o.interval.lo),
               eff(o.interval.hi));
  }

  fmt::print(out, "\nPosterior expected shrinkage weights (column: estimate of study j)\n");
  fmt::print(out, "    {:<{}}", "", lw);
  for (const auto& r : report.studies) fmt::print(out, "  {:>7}", fmt::format("j={}", r.index + 1));
  fmt::print(out, "\n");
  for (std::size_t i = 0; i < report.study_count; ++i) {
    fmt::print(out, "{:>2}  {:<{}}", i + 1, report.labels[i], lw);
    for (const auto& r : report.studies) fmt::print(out, "  {:>7}", pct(r.theta.weights[i]));
    fmt::print(out, "\n");
  }
  if (report.overall) {
    fmt::print(out, "\nPosterior expected IV weights for mu:");
    for (std::size_t i = 0; i < report.overall->weights.size(); ++i)
      fmt::print(out, " {}={}", i + 1, pct(report.overall->weights[i]));
    fmt::print(out, "\nTau posterior support: [0, {:.4g}]\n", report.tau_upper);
  }

  if (!report.oracle.empty()) {
    fmt::print(out, "\nOracle cross-check (grid {} points, Monte-Carlo {} draws)\n",
               report.oracle.front().grid_weight.sample_count,
               report.oracle.front().mc_mean.sample_count);
    for (const auto& c : report.oracle) {
      fmt::print(out,
                 "{:>2}  weight {:.6f} vs grid {:.6f}; mean {:.4f} vs MC {:.4f} +- {:.4f}; "
                 "central [{:.4f}, {:.4f}] vs MC [{:.4f}, {:.4f}]  {}\n",
                 c.index + 1, c.quadrature_weight, c.grid_weight.value, c.quadrature_mean,
                 c.mc_mean.value, c.mc_mean.mc_std_error, c.central.lo, c.central.hi,
                 c.mc_lower.value, c.mc_upper.value, c.agrees ? "ok" : "MISMATCH");
    }
  }
}

nlohmann::json to_json(const AnalysisReport& report) {
  nlohmann::json studies = nlohmann::json::array();
  for (const auto& r : report.studies) {
    auto s = summary_json(r.theta);
    s["index"] = r.index + 1;
    s["label"] = r.label;
    s["y"] = r.y;
    s["sigma"] = r.sigma;
    s["fe_weight"] = r.fe_weight;
    s["coincidence_weight"] = r.coincidence_weight;
    s["actual_weight"] = r.actual_weight;
    studies.push_back(std::move(s));
  }
  nlohmann::json doc{{"prior", report.prior},
                     {"level", report.level},
                     {"interval", interval_kind_name(report.kind)},
                     {"study_count", report.study_count},
                     {"tau_upper", report.tau_upper},
                     {"studies", std::move(studies)},
                     {"overall", report.overall ? summary_json(*report.overall) : nlohmann::json()}};
  if (!report.oracle.empty()) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : report.oracle) {
      checks.push_back({{"index", c.index + 1},
                        {"quadrature_weight", c.quadrature_weight},
                        {"grid_weight", estimate_json(c.grid_weight)},
                        {"quadrature_mean", c.quadrature_mean},
                        {"mc_mean", estimate_json(c.mc_mean)},
                        {"central_lo", c.central.lo},
                        {"central_hi", c.central.hi},
                        {"mc_lower", estimate_json(c.mc_lower)},
                        {"mc_upper", estimate_json(c.mc_upper)},
                        {"agrees", c.agrees}});
    }
    doc["oracle"] = std::move(checks);
  }
  return doc;
}

void write_csv(std::ostream& out, const AnalysisReport& report) {
  out << "index,study,y,sigma,fe_weight,coincidence_weight,actual_weight,mean,sd,lo,hi\n";
  for (const auto& r : report.studies) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", r.index + 1, r.label, r.y, r.sigma,
               r.fe_weight, r.coincidence_weight, r.actual_weight, r.theta.mean, r.theta.sd,
               r.theta.interval.lo, r.theta.interval.hi);
  }
  if (report.overall) {
    const auto& o = *report.overall;
    fmt::print(out, ",overall,,,,,,{},{},{},{}\n", o.mean, o.sd, o.interval.lo, o.interval.hi);
  }
}

void write_text(std::ostream& out, const BoundsReport& report) {
  std::vector<std::string> labels;
  for (const auto& s : report.studies) labels.push_back(s.label);
  const auto lw = label_width(labels, 5);
  fmt::print(out, "Weight bounds for each study's own shrinkage estimate, prior {}\n\n", report.prior);
  fmt::print(out, " j  {:<{}}  {:>6}  {:>6}  {:>11}  {:>6}\n", "study", lw, "sigma", "FE",
             "coincidence", "actual");
  for (std::size_t j = 0; j < report.studies.size(); ++j) {
    const auto& s = report.studies[j];
    fmt::print(out, "{:>2}  {:<{}}  {:>6}  {:>6}  {:>11}  {:>6}\n", j + 1, s.label, lw,
               eff(s.sigma), pct(s.fe_weight), pct(s.coincidence_weight),
               s.actual_weight ? pct(*s.actual_weight) : std::string("-"));
  }
}

nlohmann::json to_json(const BoundsReport& report) {
  nlohmann::json studies = nlohmann::json::array();
  for (std::size_t j = 0; j < report.studies.size(); ++j) {
    const auto& s = report.studies[j];
    studies.push_back({{"index", j + 1},
                       {"label", s.label},
                       {"sigma", s.sigma},
                       {"fe_weight", s.fe_weight},
                       {"coincidence_weight", s.coincidence_weight},
                       {"actual_weight", s.actual_weight ? nlohmann::json(*s.actual_weight)
                                                         : nlohmann::json()}});
  }
  return {{"prior", report.prior}, {"studies", std::move(studies)}};
}

void write_csv(std::ostream& out, const BoundsReport& report) {
  out << "index,study,sigma,fe_weight,coincidence_weight,actual_weight\n";
  for (std::size_t j = 0; j < report.studies.size(); ++j) {
    const auto& s = report.studies[j];
    fmt::print(out, "{},{},{},{},{},{}\n", j + 1, s.label, s.sigma, s.fe_weight,
               s.coincidence_weight, s.actual_weight ? fmt::format("{}", *s.actual_weight) : "");
  }
}

void write_csv(std::ostream& out, const SweepTable& table) {
  fmt::print(out, "{},weight,mean,lo,hi\n", table.abscissa);
  for (const auto& r : table.rows)
    fmt::print(out, "{},{},{},{},{}\n", r.x, r.weight, r.mean, r.lo, r.hi);
}

}  // namespace shrinkbound::report
