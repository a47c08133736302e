#include "secf/io.hpp"

#include "secf/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace secf {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

std::string row_context(const std::string& source, std::size_t line) {
  return source + ": line " + std::to_string(line);
}

double parse_number(const std::string& cell, const std::string& where) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    throw InputError(where + ": cannot parse '" + cell + "' as a number");
  }
  if (!std::isfinite(v)) throw InputError(where + ": non-finite value '" + cell + "'");
  return v;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

// Header plus numeric body; every body row must match the header width.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(std::istream& in, const std::string& source, bool has_header) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    auto cells = split_csv(line);
    if (has_header && t.header.empty()) {
      t.header = std::move(cells);
      width = t.header.size();
      continue;
    }
    if (width == 0) width = cells.size();
    const std::string where = row_context(source, lineno);
    if (cells.size() != width) {
      throw InputError(where + ": expected " + std::to_string(width) + " columns, found " +
                       std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(width);
    for (const auto& c : cells) row.push_back(parse_number(c, where));
    t.rows.push_back(std::move(row));
  }
  if (has_header && t.header.empty()) throw InputError(source + ": missing header row");
  if (t.rows.empty()) throw InputError(source + ": no data rows");
  return t;
}

// "x12" with prefix "x" -> 12; 0 when the name does not match.
int numbered(const std::string& name, std::string_view prefix) {
  if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) return 0;
  int v = 0;
  const auto [ptr, ec] = std::from_chars(name.data() + prefix.size(), name.data() + name.size(), v);
  return (ec == std::errc() && ptr == name.data() + name.size() && v > 0) ? v : 0;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SampleSet parse_samples(std::istream& in, const std::string& source) {
  const Table t = read_table(in, source, true);
  std::vector<std::size_t> xcols, gcols, fcols;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const auto& h = t.header[c];
    if (int k = numbered(h, "x"); k > 0) {
      if (k != static_cast<int>(xcols.size()) + 1) {
        throw InputError(source + ": point columns must be x1..xd in order (saw '" + h + "')");
      }
      xcols.push_back(c);
    } else if (int k2 = numbered(h, "g"); k2 > 0) {
      if (k2 != static_cast<int>(gcols.size()) + 1) {
        throw InputError(source + ": gradient columns must be g1..gd in order (saw '" + h + "')");
      }
      gcols.push_back(c);
    } else if (h.size() > 2 && h.compare(0, 2, "f_") == 0) {
      fcols.push_back(c);
    } else {
      throw InputError(source + ": unrecognised column '" + h + "'");
    }
  }
  if (xcols.empty()) throw InputError(source + ": no point columns x1..xd");
  if (gcols.size() != xcols.size()) {
    throw InputError(source + ": gradient column count mismatch (" + std::to_string(xcols.size()) +
                     " point columns, " + std::to_string(gcols.size()) + " gradient columns)");
  }
  if (fcols.empty()) throw InputError(source + ": no integrand columns f_<name>");

  const auto n = static_cast<Index>(t.rows.size());
  const auto d = static_cast<Index>(xcols.size());
  SampleSet s;
  s.points.resize(n, d);
  s.gradients.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    for (Index k = 0; k < d; ++k) {
      s.points(i, k) = row[xcols[static_cast<std::size_t>(k)]];
      s.gradients(i, k) = row[gcols[static_cast<std::size_t>(k)]];
    }
  }
  for (std::size_t c : fcols) {
    const std::string name = t.header[c].substr(2);
    if (s.has_integrand(name)) throw InputError(source + ": duplicate integrand column '" + t.header[c] + "'");
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = t.rows[static_cast<std::size_t>(i)][c];
    s.add_integrand(name, std::move(v));
  }
  return s;
}

SampleSet load_samples(const std::string& path) {
  auto in = open_input(path);
  return parse_samples(in, path);
}

void write_samples(std::ostream& out, const SampleSet& samples) {
  const Index d = samples.dim();
  std::string sep;
  for (Index k = 0; k < d; ++k, sep = ",") out << sep << 'x' << k + 1;
  for (Index k = 0; k < d; ++k) out << ",g" << k + 1;
  for (const auto& f : samples.integrands) out << ",f_" << f.name;
  out << '\n';
  for (Index i = 0; i < samples.size(); ++i) {
    sep.clear();
    for (Index k = 0; k < d; ++k, sep = ",") out << sep << format_double(samples.points(i, k));
    for (Index k = 0; k < d; ++k) out << ',' << format_double(samples.gradients(i, k));
    for (const auto& f : samples.integrands) out << ',' << format_double(f.values[i]);
    out << '\n';
  }
}

void write_samples(const std::string& path, const SampleSet& samples) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_samples(out, samples);
}

CjsData load_cjs_data(const std::string& path) {
  auto in = open_input(path);
  const Table t = read_table(in, path, true);
  const auto cohorts = static_cast<Index>(t.rows.size());
  if (t.header.size() != static_cast<std::size_t>(cohorts + 1)) {
    throw InputError(path + ": " + std::to_string(cohorts) + " cohorts need " + std::to_string(cohorts + 1) +
                     " columns (release count plus recaptures at occasions 2.." +
                     std::to_string(cohorts + 1) + ")");
  }
  CjsData data;
  data.released.resize(cohorts);
  data.recaptured.resize(cohorts, cohorts);
  for (Index i = 0; i < cohorts; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    data.released[i] = row[0];
    for (Index c = 0; c < cohorts; ++c) data.recaptured(i, c) = row[static_cast<std::size_t>(c + 1)];
  }
  data.validate();
  return data;
}

LogisticTable load_logistic_table(const std::string& path) {
  auto in = open_input(path);
  const Table t = read_table(in, path, true);
  const auto n = static_cast<Index>(t.rows.size());
  const auto p = static_cast<Index>(t.header.size()) - 1;
  if (p < 1) throw InputError(path + ": need at least one covariate and a response column");
  LogisticTable out;
  out.covariates.resize(n, p);
  out.response.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    for (Index j = 0; j < p; ++j) out.covariates(i, j) = row[static_cast<std::size_t>(j)];
    out.response[i] = row[static_cast<std::size_t>(p)];
    if (out.response[i] != 0.0 && out.response[i] != 1.0) {
      throw InputError(path + ": response in data row " + std::to_string(i + 1) + " is not 0 or 1");
    }
  }
  return out;
}

Matrix load_matrix_csv(const std::string& path) {
  auto in = open_input(path);
  const Table t = read_table(in, path, false);
  Matrix m(static_cast<Index>(t.rows.size()), static_cast<Index>(t.rows[0].size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = t.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

namespace {

void dump_into(std::string& out, const Json& v, int indent, int depth) {
  const auto newline = [&](int level) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * level), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_into(out, e, indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        return;
      }
      std::string s = format_double(d);
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::string out;
  dump_into(out, value, indent, 0);
  return out;
}

void write_json(const std::string& path, const Json& value) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << dump_json(value) << '\n';
}

}  // namespace secf
