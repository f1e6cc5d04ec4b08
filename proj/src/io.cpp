#include "shrinkbound/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shrinkbound/errors.hpp"

namespace shrinkbound::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Splits one CSV line; double quotes group, "" is a literal quote.
std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  fields.emplace_back(trim(current));
  return fields;
}

double parse_double(std::string_view text, std::string_view what, std::size_t line_no) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw ParseError(std::string(what) + " is not a finite number: '" + std::string(text) + "'",
                     line_no);
  }
  return value;
}

// Reads a CSV with the named columns; returns one row of values per line
// (in `columns` order) plus its line number.
struct CsvTable {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;
};

CsvTable read_csv(std::istream& in, const std::vector<std::string>& columns) {
  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::size_t> index;
  std::size_t width = 0;
  CsvTable table;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (trim(line).empty()) continue;
    auto fields = split_csv(line, line_no);
    if (index.empty()) {
      width = fields.size();
      std::map<std::string, std::size_t> where;
      for (std::size_t i = 0; i < fields.size(); ++i) where.emplace(lower(fields[i]), i);
      for (const auto& c : columns) {
        auto it = where.find(c);
        if (it == where.end()) throw ParseError("missing column '" + c + "' in header", line_no);
        index.push_back(it->second);
      }
      continue;
    }
    if (fields.size() != width) {
      std::ostringstream os;
      os << "expected " << width << " fields, found " << fields.size();
      throw ParseError(os.str(), line_no);
    }
    std::vector<std::string> row;
    for (std::size_t i : index) row.push_back(fields[i]);
    table.rows.push_back(std::move(row));
    table.lines.push_back(line_no);
  }
  if (index.empty()) throw ParseError("empty file: no header line");
  return table;
}

void check_study(const Study& s, std::set<std::string>& labels, std::size_t line_no) {
  if (s.label.empty()) throw ParseError("empty study label", line_no);
  if (!(s.sigma > 0.0)) throw ParseError("sigma must be positive for study '" + s.label + "'", line_no);
  if (!labels.insert(s.label).second)
    throw ParseError("duplicate study label '" + s.label + "'", line_no);
}

}  // namespace

std::vector<Study> parse_studies_csv(std::istream& in) {
  const auto table = read_csv(in, {"study", "y", "sigma"});
  std::vector<Study> studies;
  std::set<std::string> labels;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line_no = table.lines[r];
    Study s{row[0], parse_double(row[1], "y", line_no), parse_double(row[2], "sigma", line_no)};
    check_study(s, labels, line_no);
    studies.push_back(std::move(s));
  }
  if (studies.empty()) throw ParseError("no studies in file");
  return studies;
}

std::vector<Study> parse_studies_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("JSON input must be an array of study objects");
  std::vector<Study> studies;
  std::set<std::string> labels;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    const std::string where = "entry " + std::to_string(i + 1) + ": ";
    if (!e.is_object()) throw ParseError(where + "not an object");
    for (const char* key : {"study", "y", "sigma"})
      if (!e.contains(key)) throw ParseError(where + "missing key '" + key + "'");
    if (!e["study"].is_string() && !e["study"].is_number())
      throw ParseError(where + "'study' must be a string");
    if (!e["y"].is_number() || !e["sigma"].is_number())
      throw ParseError(where + "'y' and 'sigma' must be numbers");
    Study s{e["study"].is_string() ? e["study"].get<std::string>() : e["study"].dump(),
            e["y"].get<double>(), e["sigma"].get<double>()};
    try {
      check_study(s, labels, 0);
    } catch (const ParseError& err) {
      throw ParseError(where + err.what());
    }
    studies.push_back(std::move(s));
  }
  if (studies.empty()) throw ParseError("no studies in file");
  return studies;
}

std::vector<Study> read_studies(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open data file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') return parse_studies_json(text);
  std::istringstream stream(text);
  return parse_studies_csv(stream);
}

Dataset parse_dataset(const std::filesystem::path& path) {
  auto studies = read_studies(path);
  if (studies.size() < 2) throw ParseError("a dataset needs at least two studies");
  return Dataset(std::move(studies));
}

HeterogeneityPrior read_prior_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open prior table '" + path.string() + "'");
  const auto table = read_csv(in, {"tau", "density"});
  std::vector<double> tau;
  std::vector<double> density;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    tau.push_back(parse_double(table.rows[r][0], "tau", table.lines[r]));
    density.push_back(parse_double(table.rows[r][1], "density", table.lines[r]));
    if (tau.back() < 0.0 || (r > 0 && !(tau.back() > tau[r - 1])))
      throw ParseError("tau must be nonnegative and strictly increasing", table.lines[r]);
    if (density.back() < 0.0) throw ParseError("density must be nonnegative", table.lines[r]);
  }
  return HeterogeneityPrior::tabulated(std::move(tau), std::move(density));
}

HeterogeneityPrior parse_prior(std::string_view spec) {
  spec = trim(spec);
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw ParseError("prior spec must look like <family>:<parameter>, got '" +
                     std::string(spec) + "'");
  const std::string family = lower(trim(spec.substr(0, colon)));
  const std::string_view arg = trim(spec.substr(colon + 1));
  if (family == "table") {
    if (arg.empty()) throw ParseError("table prior needs a file path");
    return read_prior_table(std::filesystem::path(std::string(arg)));
  }
  const double value = parse_double(arg, "prior parameter", 0);
  if (family == "half-normal" || family == "halfnormal") return HeterogeneityPrior::half_normal(value);
  if (family == "half-cauchy" || family == "halfcauchy") return HeterogeneityPrior::half_cauchy(value);
  if (family == "uniform") return HeterogeneityPrior::uniform(value);
  throw ParseError("unknown prior family '" + family + "'");
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    out.push_back(parse_double(piece, "list entry", 0));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_grid(std::string_view spec) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon == std::string_view::npos ? spec.npos : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3) throw ParseError("grid spec must be lo:hi:step, got '" + std::string(spec) + "'");
  const double lo = parse_double(parts[0], "grid lower end", 0);
  const double hi = parse_double(parts[1], "grid upper end", 0);
  const double step = parse_double(parts[2], "grid step", 0);
  if (!(step > 0.0)) throw ParseError("grid step must be positive");
  if (hi < lo) throw ParseError("grid upper end is below the lower end");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 1000000) throw ParseError("grid has more than 10^6 points");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    double v = lo + static_cast<double>(i) * step;
    if (std::abs(v) < 1e-9 * step) v = 0.0;
    grid[i] = v;
  }
  return grid;
}

}  // namespace shrinkbound::io
