#pragma once

#include "secf/targets.hpp"
#include "secf/types.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace secf {

using Json = nlohmann::ordered_json;

/// Sample CSV: header `x1..xd, g1..gd, f_<name>...`, one row per state.
/// Column order within each group must be x1, x2, ... (g likewise); integrand
/// columns keep their file order. `source` names the input in error messages.
SampleSet parse_samples(std::istream& in, const std::string& source = "<stream>");
SampleSet load_samples(const std::string& path);

/// Writes the same layout with 17 significant digits.
void write_samples(std::ostream& out, const SampleSet& samples);
void write_samples(const std::string& path, const SampleSet& samples);

/// Header row, then one row per release cohort: the release count followed by
/// recaptures at occasions 2..T.
CjsData load_cjs_data(const std::string& path);

struct LogisticTable {
  Matrix covariates;
  Vector response;
};

/// Header row, then covariates with the 0/1 response in the last column.
LogisticTable load_logistic_table(const std::string& path);

/// Plain numeric CSV without a header.
Matrix load_matrix_csv(const std::string& path);

/// Serialises with stable key order and every float at 17 significant digits.
std::string dump_json(const Json& value, int indent = 2);
void write_json(const std::string& path, const Json& value);

}  // namespace secf
