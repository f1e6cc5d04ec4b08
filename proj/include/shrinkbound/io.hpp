#pragma once

// Input parsing for the command-line front end.
//
// Dataset CSV: header naming the columns `study`, `y` and `sigma` (any order,
// extra columns ignored), one study per line, decimal point, no thousands
// separators. Double quotes may wrap a label that contains commas.
//
// Dataset JSON: [{"study": "a", "y": -0.5, "sigma": 0.25}, ...]
//
// Prior specs: half-normal:<scale> | half-cauchy:<scale> | uniform:<upper> |
// table:<path>, the table being a CSV with header `tau,density`.

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "shrinkbound/model.hpp"
#include "shrinkbound/prior.hpp"

namespace shrinkbound::io {

// Rows in file order. Errors (ParseError) name the offending line.
std::vector<Study> parse_studies_csv(std::istream& in);
std::vector<Study> parse_studies_json(std::string_view text);

// Dispatches on the first non-blank character ('[' means JSON). A file with
// a single study is valid here; Dataset needs two.
std::vector<Study> read_studies(const std::filesystem::path& path);

// read_studies + Dataset construction (k >= 2).
Dataset parse_dataset(const std::filesystem::path& path);

// Throws ParseError on bad syntax and DomainError on bad parameter values.
// Table files resolve relative to the working directory.
HeterogeneityPrior parse_prior(std::string_view spec);
HeterogeneityPrior read_prior_table(const std::filesystem::path& path);

// "0.8,0.2" -> {0.8, 0.2}.
std::vector<double> parse_number_list(std::string_view text);

// "lo:hi:step" -> lo, lo + step, ..., up to hi inclusive. Values within
// 1e-9 * step of zero are snapped to zero.
std::vector<double> parse_grid(std::string_view spec);

}  // namespace shrinkbound::io
