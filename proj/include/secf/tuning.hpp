#pragma once

#include "secf/basis.hpp"
#include "secf/kernel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace secf {

/// sqrt(Med{||x_i - x_j||^2 / 2}) over all pairs i < j. Even-length medians
/// average the two central order statistics.
/// Throws InputError for fewer than two points or when every point coincides.
double median_heuristic(const Matrix& points);

/// 10^{-1.5, -1, -0.5, 0, 0.5, 1}.
std::vector<double> default_lambda_grid();

/// Seeded shuffle split into `folds` groups; the first n % folds groups get
/// one extra index. Indices within a fold are ascending.
std::vector<std::vector<Index>> make_folds(Index n, int folds, std::uint64_t seed);

struct CvReport {
  double lambda = 0.0;
  /// Total held-out squared error per grid entry (grid order as given);
  /// +inf where some fold failed to factorise or solve.
  std::vector<double> errors;
  std::vector<std::string> failures;
};

/// Cross-validated lengthscale: for each grid value, fit the semi-exact
/// interpolant on each fold's complement and sum the squared prediction errors
/// on the fold. The minimiser is returned; errors within 1e-10 * sum(f^2) of
/// the minimum count as ties and the smallest such lambda wins.
///
/// Expects distinct points. Throws InputError when n < folds * (m + 1) and
/// NumericalError when every grid value fails.
CvReport cv_scan(const SampleSet& samples, const Vector& fvals, const KernelConfig& kernel,
                 const PolynomialBasis& basis, const std::vector<double>& grid, int folds,
                 std::uint64_t seed);

double cv_select_lambda(const SampleSet& samples, const Vector& fvals, const KernelConfig& kernel,
                        const PolynomialBasis& basis, const std::vector<double>& grid,
                        int folds = 5, std::uint64_t seed = 0);

}  // namespace secf
