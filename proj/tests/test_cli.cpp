#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shrinkbound/cli.hpp"
#include "shrinkbound/forest.hpp"
#include "shrinkbound/posterior.hpp"
#include "support.hpp"

using namespace shrinkbound;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const std::string kCjd = testing::data_path("cjd.csv");
const std::string kAcidosis = testing::data_path("acidosis.csv");

}  // namespace

TEST_CASE("analyze: CJD text report") {
  const auto r = run({"analyze", "--data", kCjd, "--prior", "half-normal:0.5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("randomized") != std::string::npos);
  CHECK(r.out.find("38.9%") != std::string::npos);
  CHECK(r.out.find("39.5%") != std::string::npos);
  CHECK(r.out.find("-0.370") != std::string::npos);
  CHECK(r.out.find("[-1.157, 0.477]") != std::string::npos);
  CHECK(r.out.find("13.5%") != std::string::npos);
  CHECK(r.out.find("overall") != std::string::npos);
  // Deterministic.
  CHECK(run({"analyze", "--data", kCjd, "--prior", "half-normal:0.5"}).out == r.out);
}

TEST_CASE("analyze: acidosis and single study") {
  const auto r = run({"analyze", "--data", kAcidosis, "--prior", "half-normal:0.5", "--target", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("74.0%") != std::string::npos);
  CHECK(r.out.find("-0.495") != std::string::npos);
  CHECK(r.out.find("[-0.986, 0.004]") != std::string::npos);

  const auto single = run({"analyze", "--data", testing::data_path("cjd_randomized_only.csv"), "--prior",
                           "half-normal:0.5"});
  REQUIRE(single.code == 0);
  CHECK(single.out.find("100.0%") != std::string::npos);
  CHECK(single.out.find("-0.173") != std::string::npos);
  CHECK(single.out.find("[-1.410, 1.064]") != std::string::npos);
}

TEST_CASE("analyze: JSON round-trips the library results exactly") {
  const auto r = run({"analyze", "--data", kCjd, "--prior", "half-normal:1.0", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const auto tp = TauPosterior::fit(testing::cjd(), HeterogeneityPrior::half_normal(1.0));
  const auto w = expected_weights(tp);
  REQUIRE(j["studies"].size() == 2);
  for (std::size_t s = 0; s < 2; ++s) {
    const auto& row = j["studies"][s];
    const auto summary = marginal_theta(tp, s);
    CHECK(row["actual_weight"].get<double>() == w.shrink(s, s));
    CHECK(row["mean"].get<double>() == summary.mean);
    CHECK(row["sd"].get<double>() == summary.sd);
    CHECK(row["lo"].get<double>() == summary.interval.lo);
    CHECK(row["hi"].get<double>() == summary.interval.hi);
    CHECK(row["weights"][0].get<double>() == summary.weights[0]);
  }
  const auto mu = marginal_mu(tp);
  CHECK(j["overall"]["mean"].get<double>() == mu.mean);
  CHECK(j["prior"] == "half-normal(1)");
  CHECK(j["interval"] == "shortest");
}

TEST_CASE("analyze: CSV has one row per reported study") {
  const auto r = run({"analyze", "--data", kCjd, "--prior", "half-normal:0.5", "--format", "csv",
                      "--interval", "central"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0].rfind("index,study,y,sigma,fe_weight", 0) == 0);
  CHECK(ls[2].rfind("2,randomized,", 0) == 0);
  CHECK(ls[3].rfind(",overall,", 0) == 0);
}

TEST_CASE("bounds") {
  auto r = run({"bounds", "--sigmas", "0.8,0.2", "--prior", "half-normal:0.5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("5.9%") != std::string::npos);
  CHECK(r.out.find("29.4%") != std::string::npos);

  r = run({"bounds", "--data", kCjd, "--prior", "half-normal:1.0", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["studies"][1]["coincidence_weight"].get<double>() - 0.521) < 0.005);
  CHECK(std::abs(j["studies"][1]["actual_weight"].get<double>() - 0.531) < 0.005);

  r = run({"bounds", "--sigmas", "1,1", "--prior", "half-normal:0.5"});
  REQUIRE(r.code == 0);
  CHECK(count(r.out, "50.0%") == 2);
}

TEST_CASE("sweep") {
  auto r = run({"sweep", "--sigmas", "0.8,0.2", "--prior", "half-normal:0.5", "--delta", "-3:3:0.5"});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 14);
  CHECK(ls[0] == "delta,weight,mean,lo,hi");
  double best = 2.0;
  std::string best_delta;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto comma = ls[i].find(',');
    const double w = std::stod(ls[i].substr(comma + 1));
    if (w < best) {
      best = w;
      best_delta = ls[i].substr(0, comma);
    }
  }
  CHECK(best_delta == "0");
  CHECK(std::abs(best - 0.29) < 0.01);

  r = run({"sweep", "--sigmas", "0.8,0.2", "--prior", "half-normal:0.5", "--delta", "0:0:1"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).size() == 2);

  r = run({"sweep", "--data", kCjd, "--scales", "0.5,1", "--target", "randomized", "--coincidence"});
  REQUIRE(r.code == 0);
  ls = lines(r.out);
  REQUIRE(ls.size() == 3);
  CHECK(ls[0] == "scale,weight,mean,lo,hi");
  CHECK(ls[1].rfind("0.5,0.389", 0) == 0);

  const auto path = std::filesystem::temp_directory_path() / "shrinkbound_sweep.csv";
  r = run({"sweep", "--data", kCjd, "--scales", "0.5,1", "--target", "2", "--out", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "scale,weight,mean,lo,hi");
  std::filesystem::remove(path);
}

TEST_CASE("forest") {
  const auto rows = plot::forest_rows(testing::cjd().studies(), {}, 0.95);
  REQUIRE(rows.size() == 2);
  CHECK(std::abs((rows[1].hi - rows[1].point) - 1.959964 * 0.631) < 1e-6);
  CHECK(std::abs((rows[1].hi - rows[1].point) - 1.237) < 5e-4);

  auto r = run({"forest", "--data", kCjd, "--prior", "half-normal:0.5", "--target", "randomized"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("<svg", 0) == 0);
  CHECK(count(r.out, "<g class=\"study\">") == 2);
  CHECK(count(r.out, "<g class=\"shrinkage\">") == 1);
  CHECK(run({"forest", "--data", kCjd, "--prior", "half-normal:0.5", "--target", "randomized"}).out == r.out);

  r = run({"forest", "--data", kCjd});
  REQUIRE(r.code == 0);
  CHECK(count(r.out, "<g class=\"study\">") == 2);
  CHECK(count(r.out, "<g class=\"shrinkage\">") == 0);

  const auto path = std::filesystem::temp_directory_path() / "shrinkbound_forest.svg";
  r = run({"analyze", "--data", kCjd, "--prior", "half-normal:0.5", "--out", path.string()});
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::file_size(path) > 100);
  std::filesystem::remove(path);

  r = run({"forest", "--data", kCjd, "--out", "/nonexistent-dir/x.svg"});
  CHECK(r.code == cli::kDataError);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kUsageError);
  CHECK(run({"--help"}).code == cli::kSuccess);
  CHECK(run({"frobnicate"}).code == cli::kUsageError);
  CHECK(run({"analyze", "--data", kCjd}).code == cli::kUsageError);
  CHECK(run({"analyze", "--data", kCjd, "--prior", "half-normal:-1"}).code == cli::kUsageError);
  CHECK(run({"analyze", "--data", kCjd, "--prior", "wibble:1"}).code == cli::kUsageError);
  CHECK(run({"analyze", "--data", kCjd, "--prior", "half-normal:0.5", "--level", "1.5"}).code ==
        cli::kUsageError);
  CHECK(run({"analyze", "--data", kCjd, "--prior", "half-normal:0.5", "--interval", "hpd"}).code ==
        cli::kUsageError);
  CHECK(run({"analyze", "--data", kCjd, "--prior", "half-normal:0.5", "--target", "nobody"}).code ==
        cli::kUsageError);
  CHECK(run({"sweep", "--sigmas", "1,1", "--prior", "half-normal:0.5", "--delta", "0:1"}).code ==
        cli::kUsageError);
  CHECK(run({"sweep", "--sigmas", "1,1,1", "--prior", "half-normal:0.5", "--delta", "0:1:0.5"}).code ==
        cli::kUsageError);
  CHECK(run({"bounds", "--data", kCjd, "--sigmas", "1,1", "--prior", "half-normal:0.5"}).code ==
        cli::kUsageError);

  const auto missing = run({"analyze", "--data", testing::data_path("missing.csv"), "--prior", "half-normal:0.5"});
  CHECK(missing.code == cli::kDataError);
  CHECK(!missing.err.empty());

  const auto path = std::filesystem::temp_directory_path() / "shrinkbound_bad.csv";
  {
    std::ofstream f(path);
    f << "study,y,sigma\na,1,0.5\nb,2,0\n";
  }
  const auto bad = run({"analyze", "--data", path.string(), "--prior", "half-normal:0.5"});
  CHECK(bad.code == cli::kDataError);
  CHECK(bad.err.find("line 3") != std::string::npos);
  std::filesystem::remove(path);

  CHECK(run({"analyze", "--data", kCjd, "--prior", "table:/nonexistent.csv"}).code == cli::kDataError);
}
