#include "secf/types.hpp"

#include "secf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace secf {

const Vector& SampleSet::integrand(const std::string& name) const {
  for (const auto& col : integrands) {
    if (col.name == name) return col.values;
  }
  throw InputError("no integrand column named '" + name + "'");
}

bool SampleSet::has_integrand(const std::string& name) const {
  return std::any_of(integrands.begin(), integrands.end(),
                     [&](const Integrand& col) { return col.name == name; });
}

void SampleSet::add_integrand(std::string name, Vector values) {
  for (auto& col : integrands) {
    if (col.name == name) {
      col.values = std::move(values);
      return;
    }
  }
  integrands.push_back({std::move(name), std::move(values)});
}

void SampleSet::validate() const {
  if (gradients.rows() != points.rows() || gradients.cols() != points.cols()) {
    throw InputError("points and gradients must have the same shape");
  }
  for (const auto& col : integrands) {
    if (col.values.size() != points.rows()) {
      throw InputError("integrand '" + col.name + "' has " + std::to_string(col.values.size()) +
                       " rows, expected " + std::to_string(points.rows()));
    }
  }
  for (Index i = 0; i < points.rows(); ++i) {
    bool ok = points.row(i).allFinite() && gradients.row(i).allFinite();
    for (const auto& col : integrands) ok = ok && std::isfinite(col.values[i]);
    if (!ok) throw InputError("non-finite entry in sample row " + std::to_string(i + 1));
  }
}

SampleSet SampleSet::select(const std::vector<Index>& rows) const {
  SampleSet out;
  const auto n = static_cast<Index>(rows.size());
  out.points.resize(n, dim());
  out.gradients.resize(n, dim());
  for (Index r = 0; r < n; ++r) {
    out.points.row(r) = points.row(rows[r]);
    out.gradients.row(r) = gradients.row(rows[r]);
  }
  for (const auto& col : integrands) {
    Vector v(n);
    for (Index r = 0; r < n; ++r) v[r] = col.values[rows[r]];
    out.integrands.push_back({col.name, std::move(v)});
  }
  return out;
}

}  // namespace secf
