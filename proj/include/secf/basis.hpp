#pragma once

#include "secf/types.hpp"

#include <span>
#include <vector>

namespace secf {

using MultiIndex = std::vector<int>;

/// Monomial basis of polynomials of total degree 1..r in d variables.
/// Constants are excluded (they are in the null space of the Stein operator);
/// the constant column of the Vandermonde matrix accounts for them.
struct PolynomialBasis {
  int dim = 1;
  int order = 0;
  /// Graded-lexicographic: ascending total degree, and within a degree
  /// descending lexicographic, e.g. (2,0), (1,1), (0,2).
  std::vector<MultiIndex> indices;

  /// Number of Vandermonde columns, 1 + indices.size().
  Index m() const { return 1 + static_cast<Index>(indices.size()); }
};

PolynomialBasis enumerate_basis(int d, int r);

/// Langevin Stein operator applied to x^alpha:
///   Laplacian(x^alpha) + grad(x^alpha) . u,  with u = grad log p(x).
double stein_poly_eval(const MultiIndex& alpha, std::span<const double> x,
                       std::span<const double> u);

/// n x m matrix [1, L phi_1(x_i), ..., L phi_{m-1}(x_i)].
Matrix vandermonde(const PolynomialBasis& basis, const Matrix& points, const Matrix& grads);
Matrix vandermonde(const PolynomialBasis& basis, const SampleSet& samples);

}  // namespace secf
