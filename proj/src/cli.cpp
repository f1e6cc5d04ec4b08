#include "shrinkbound/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "shrinkbound/bounds.hpp"
#include "shrinkbound/errors.hpp"
#include "shrinkbound/forest.hpp"
#include "shrinkbound/io.hpp"
#include "shrinkbound/report.hpp"

namespace shrinkbound::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string data;
  std::string sigmas;
  std::string prior;
  double level = 0.95;
  std::string interval = "shortest";
  std::string target;
  std::string delta;
  std::string scales;
  std::string format = "text";
  bool oracle = false;
  bool coincidence = false;
  std::string out;
};

HeterogeneityPrior prior_from(const Config& c) {
  if (c.prior.empty()) throw UsageError("--prior is required");
  try {
    return io::parse_prior(c.prior);
  } catch (const std::exception& e) {
    // A broken table file is a data problem; a broken spec is a usage problem.
    if (c.prior.rfind("table:", 0) == 0) throw;
    throw UsageError(std::string("invalid --prior: ") + e.what());
  }
}

IntervalKind kind_from(const Config& c) {
  return c.interval == "central" ? IntervalKind::central : IntervalKind::shortest;
}

void check_level(const Config& c) {
  if (!(c.level > 0.0 && c.level < 1.0)) throw UsageError("--level must lie strictly between 0 and 1");
}

// Studies from --data, or from --sigmas with y = 0 and labels 1..k.
std::vector<Study> studies_from(const Config& c, bool allow_sigmas) {
  if (!c.data.empty() && !c.sigmas.empty()) throw UsageError("give either --data or --sigmas, not both");
  if (!c.data.empty()) return io::read_studies(c.data);
  if (allow_sigmas && !c.sigmas.empty()) {
    std::vector<double> sigmas;
    try {
      sigmas = io::parse_number_list(c.sigmas);
    } catch (const ParseError& e) {
      throw UsageError(std::string("invalid --sigmas: ") + e.what());
    }
    std::vector<Study> studies;
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
      if (!(sigmas[i] > 0.0)) throw UsageError("--sigmas entries must be positive");
      studies.push_back({std::to_string(i + 1), 0.0, sigmas[i]});
    }
    return studies;
  }
  throw UsageError(allow_sigmas ? "one of --data or --sigmas is required" : "--data is required");
}

// Label match first, then a 1-based index.
std::optional<std::size_t> target_from(const Config& c, const std::vector<Study>& studies) {
  if (c.target.empty()) return std::nullopt;
  for (std::size_t i = 0; i < studies.size(); ++i)
    if (studies[i].label == c.target) return i;
  try {
    std::size_t used = 0;
    const long n = std::stol(c.target, &used);
    if (used == c.target.size() && n >= 1 && static_cast<std::size_t>(n) <= studies.size())
      return static_cast<std::size_t>(n - 1);
  } catch (const std::exception&) {
  }
  throw UsageError("--target '" + c.target + "' matches no study label or index");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write '" + path + "'");
  f << content;
  if (!f) throw ParseError("failed writing '" + path + "'");
}

std::vector<double> sigmas_of(const std::vector<Study>& studies) {
  std::vector<double> out;
  for (const auto& s : studies) out.push_back(s.sigma);
  return out;
}

std::string forest_svg(const std::vector<Study>& studies, const report::AnalysisReport& rep,
                       bool with_shrinkage) {
  std::vector<plot::ShrinkageMarker> markers;
  if (with_shrinkage)
    for (const auto& r : rep.studies) markers.push_back({r.index, r.theta});
  const auto rows = plot::forest_rows(studies, markers, rep.level);
  return plot::render_forest_svg(rows);
}

int cmd_analyze(const Config& c, std::ostream& out) {
  check_level(c);
  const auto studies = studies_from(c, false);
  const auto prior = prior_from(c);
  report::AnalysisOptions options;
  options.level = c.level;
  options.kind = kind_from(c);
  options.target = target_from(c, studies);
  options.oracle = c.oracle;
  options.settings = quad::QuadratureSettings::from_environment();
  const auto rep = report::run_analysis(studies, prior, options);

  if (c.format == "json") {
    out << report::to_json(rep).dump(2) << '\n';
  } else if (c.format == "csv") {
    report::write_csv(out, rep);
  } else {
    report::write_text(out, rep);
  }
  if (!c.out.empty()) write_file(c.out, forest_svg(studies, rep, true));
  return kSuccess;
}

int cmd_bounds(const Config& c, std::ostream& out) {
  const auto studies = studies_from(c, true);
  const auto prior = prior_from(c);
  const auto settings = quad::QuadratureSettings::from_environment();
  const auto sigmas = sigmas_of(studies);
  if (studies.size() < 2) throw DomainError("bounds need at least two studies");

  BoundsReport rep = c.data.empty() ? bounds_report(sigmas, prior, settings)
                                    : bounds_report(Dataset(studies), prior, settings);
  if (c.format == "json") {
    out << report::to_json(rep).dump(2) << '\n';
  } else if (c.format == "csv") {
    report::write_csv(out, rep);
  } else {
    report::write_text(out, rep);
  }
  return kSuccess;
}

int cmd_sweep(const Config& c, std::ostream& out) {
  check_level(c);
  if (c.delta.empty() == c.scales.empty()) throw UsageError("give exactly one of --delta or --scales");
  const auto studies = studies_from(c, true);
  if (studies.size() < 2) throw DomainError("a sweep needs at least two studies");
  const auto sigmas = sigmas_of(studies);
  const std::size_t target = target_from(c, studies).value_or(0);

  SweepOptions options;
  options.level = c.level;
  options.kind = kind_from(c);
  options.settings = quad::QuadratureSettings::from_environment();

  auto grid_of = [](const std::string& text, bool range) {
    try {
      return range ? io::parse_grid(text) : io::parse_number_list(text);
    } catch (const ParseError& e) {
      throw UsageError(std::string("malformed grid: ") + e.what());
    }
  };

  SweepTable table;
  if (!c.delta.empty()) {
    if (sigmas.size() != 2) throw UsageError("--delta sweeps need exactly two studies");
    table = discrepancy_sweep(sigmas, prior_from(c), target, grid_of(c.delta, true), options);
  } else {
    std::optional<std::vector<double>> y;
    if (!c.data.empty() && !c.coincidence) {
      y.emplace();
      for (const auto& s : studies) y->push_back(s.y);
    }
    const auto scales = grid_of(c.scales, false);
    for (std::size_t i = 0; i < scales.size(); ++i)
      if (!(scales[i] > 0.0) || (i > 0 && !(scales[i] > scales[i - 1])))
        throw UsageError("--scales must be positive and ascending");
    table = prior_scale_sweep(sigmas, y, scales, target, options);
  }

  std::ostringstream csv;
  report::write_csv(csv, table);
  if (c.out.empty()) {
    out << csv.str();
  } else {
    write_file(c.out, csv.str());
  }
  return kSuccess;
}

int cmd_forest(const Config& c, std::ostream& out) {
  check_level(c);
  const auto studies = studies_from(c, false);
  const auto target = target_from(c, studies);
  std::string svg;
  if (target) {
    report::AnalysisOptions options;
    options.level = c.level;
    options.kind = kind_from(c);
    options.target = target;
    options.settings = quad::QuadratureSettings::from_environment();
    const auto rep = report::run_analysis(studies, prior_from(c), options);
    svg = forest_svg(studies, rep, true);
  } else {
    svg = plot::render_forest_svg(plot::forest_rows(studies, {}, c.level));
  }
  if (c.out.empty()) {
    out << svg;
  } else {
    write_file(c.out, svg);
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian shrinkage estimation with a-priori weight bounds", "shrinkbound"};
  app.require_subcommand(1);
  Config c;

  auto add_data = [&c](CLI::App* sub, bool sigmas) {
    sub->add_option("--data", c.data, "CSV (study,y,sigma) or JSON study file");
    if (sigmas) sub->add_option("--sigmas", c.sigmas, "comma-separated standard errors");
  };
  auto add_prior = [&c](CLI::App* sub) {
    sub->add_option("--prior", c.prior,
                    "half-normal:<scale> | half-cauchy:<scale> | uniform:<upper> | table:<path>");
  };
  auto add_interval = [&c](CLI::App* sub) {
    sub->add_option("--level", c.level, "credible level")->capture_default_str();
    sub->add_option("--interval", c.interval, "central | shortest")
        ->check(CLI::IsMember({"central", "shortest"}))
        ->capture_default_str();
  };

  auto* analyze = app.add_subcommand("analyze", "shrinkage estimates, weights and bounds");
  add_data(analyze, false);
  add_prior(analyze);
  add_interval(analyze);
  analyze->add_option("--target", c.target, "study label or 1-based index");
  analyze->add_option("--format", c.format, "text | json | csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  analyze->add_flag("--oracle", c.oracle, "cross-check against grid and Monte-Carlo oracles");
  analyze->add_option("--out", c.out, "also write a forest plot SVG here");

  auto* bounds = app.add_subcommand("bounds", "FE, coincidence and actual weights");
  add_data(bounds, true);
  add_prior(bounds);
  bounds->add_option("--format", c.format, "text | json | csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "weight sweeps over discrepancy or prior scale (CSV)");
  add_data(sweep, true);
  add_prior(sweep);
  add_interval(sweep);
  sweep->add_option("--target", c.target, "study label or 1-based index (default 1)");
  sweep->add_option("--delta", c.delta, "discrepancy grid lo:hi:step, y = (0, delta)");
  sweep->add_option("--scales", c.scales, "ascending half-normal scales s1,s2,...");
  sweep->add_flag("--coincidence", c.coincidence, "with --data --scales: use coinciding estimates");
  sweep->add_option("--out", c.out, "CSV output path (default stdout)");

  auto* forest = app.add_subcommand("forest", "forest plot SVG");
  add_data(forest, false);
  add_prior(forest);
  add_interval(forest);
  forest->add_option("--target", c.target, "add the shrinkage row for this study");
  forest->add_option("--out", c.out, "SVG output path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(c, out);
    if (bounds->parsed()) return cmd_bounds(c, out);
    if (sweep->parsed()) return cmd_sweep(c, out);
    if (forest->parsed()) return cmd_forest(c, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const UnsupportedError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const DomainError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const ConvergenceError& e) {
    err << "numerical failure: " << e.what() << " (best estimate " << e.best_estimate() << ")\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  return kUsageError;
}

}  // namespace shrinkbound::cli
