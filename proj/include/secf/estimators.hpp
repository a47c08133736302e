#pragma once

#include "secf/basis.hpp"
#include "secf/kernel.hpp"
#include "secf/result.hpp"

#include <span>

namespace secf {

/// Plain sample average with equal weights 1/n.
EstimatorResult mc_estimate(const Vector& fvals);

/// Zero-variance polynomial control variate: the constant coefficient of the
/// least-squares fit of f on the columns of P.
EstimatorResult zv_estimate(const Matrix& vandermonde, const Vector& fvals);

/// Control functional (1^T K0^{-1} 1)^{-1} 1^T K0^{-1} f.
EstimatorResult cf_estimate(const SteinKernelMatrix& k0, const Vector& fvals);

struct InterpolantCoefficients {
  Vector a;  // kernel part, length n
  Vector b;  // parametric part, length m; b[0] is the integral estimate
};

enum class SolveRoute {
  /// Cholesky of K0, then the m x m system (P^T K0^{-1} P) b = P^T K0^{-1} f.
  Schur,
  /// LU of the full (n + m) saddle-point matrix; for cross-checking only.
  DirectIndefinite,
};

/// Coefficients of the interpolant with K0 a + P b = f and P^T a = 0.
/// Throws UnisolvencyError when n < m or P^T K0^{-1} P is singular.
InterpolantCoefficients secf_solve(const SteinKernelMatrix& k0, const Matrix& vandermonde,
                                   const Vector& fvals, SolveRoute route = SolveRoute::Schur);

/// Semi-exact control functional: estimate b_1, cubature weights
/// w = K0^{-1} P (P^T K0^{-1} P)^{-1} e_1, both coefficient vectors and the
/// error diagnostic.
EstimatorResult secf_estimate(const SteinKernelMatrix& k0, const Matrix& vandermonde,
                              const Vector& fvals);

/// f_n(x) = b_1 + sum_j b_{j+1} L phi_j(x) + sum_i a_i k0(x, x_i) at each
/// query row, where (x_i, u_i) are the training points the coefficients
/// were fitted on.
Vector evaluate_interpolant(const KernelConfig& cfg, const PolynomialBasis& basis,
                            const SampleSet& train, const InterpolantCoefficients& coeffs,
                            const Matrix& query_points, const Matrix& query_grads);

}  // namespace secf
