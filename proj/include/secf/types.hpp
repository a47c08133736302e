#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace secf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Named integrand column, e.g. ("benchmark", f(x^(1..n))).
struct Integrand {
  std::string name;
  Vector values;
};

/// Sampler output: n states in d dimensions, the score grad log p at each
/// state and any number of integrand columns.
///
/// Points and gradients are stored n x d in Eigen's default column-major
/// layout, so each coordinate is a contiguous run over samples.
struct SampleSet {
  Matrix points;
  Matrix gradients;
  std::vector<Integrand> integrands;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }

  /// Throws InputError when no column has this name.
  const Vector& integrand(const std::string& name) const;
  bool has_integrand(const std::string& name) const;
  void add_integrand(std::string name, Vector values);

  /// Throws InputError on row-count mismatch or non-finite entries.
  void validate() const;

  /// Rows in the given order (used for subsets, folds and permutations).
  SampleSet select(const std::vector<Index>& rows) const;
};

}  // namespace secf
