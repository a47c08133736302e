#pragma once

#include "secf/basis.hpp"
#include "secf/kernel.hpp"
#include "secf/result.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace secf {

enum class NystromSolver {
  /// Preconditioned conjugate gradient on the (n0 + m) normal equations.
  ConjugateGradient,
  /// Column-pivoted QR of the stacked least-squares problem whose normal
  /// equations are the (n0 + m) system; no CG truncation.
  Direct,
};

struct NystromConfig {
  /// Subset size; nullopt means ceil(sqrt(n)), raised to m if that is smaller.
  std::optional<Index> n0;
  double cg_tolerance = 1e-5;
  /// Defaults to 10 (n0 + m). Zero is allowed and returns the starting point.
  std::optional<int> cg_max_iters;
  std::uint64_t seed = 0;
  NystromSolver solver = NystromSolver::ConjugateGradient;
};

/// Effective subset size for n points and m basis functions.
/// Throws InputError unless m <= n0 <= n.
Index resolve_n0(Index n, Index m, const NystromConfig& cfg);

/// n0 distinct indices drawn uniformly without replacement, sorted ascending.
/// Deterministic in the seed.
std::vector<Index> select_subset(Index n, Index n0, std::uint64_t seed);
std::vector<Index> select_subset(Index n, const NystromConfig& cfg);

struct NystromSystem {
  Matrix lhs;
  Vector rhs;
};

/// Normal equations for the Nystrom coefficients, with the subset occupying the
/// first n0 rows:
///   [K_{n0,n} K_{n,n0} + P_{n0} P_{n0}^T   K_{n0,n} P] [a~]   [K_{n0,n} f]
///   [P^T K_{n,n0}                          P^T P     ] [b~] = [P^T f     ]
/// `k_sub` is the n0 x n block K_{0,n0,n}, `p` the full n x m Vandermonde matrix.
NystromSystem asecf_system(const Matrix& k_sub, const Matrix& p, const Vector& fvals);

/// Block-diagonal preconditioner factors: lower-triangular B1 and B2 with
///   B1 B1^T = ((n / n0) K_{n0,n0}^2 + P_{n0} P_{n0}^T)^{-1},  B2 B2^T = (P^T P)^{-1}.
struct Preconditioner {
  Matrix b1;
  Matrix b2;
  double jitter_b1 = 0.0;
  double jitter_b2 = 0.0;
};

Preconditioner build_preconditioner(const Matrix& k_sub_sub, const Matrix& p_sub, const Matrix& ptp,
                                    Index n, Index n0);

struct CgResult {
  Vector x;
  int iterations = 0;
  /// ||A x - b|| / ||b|| at exit.
  double residual = 0.0;
  bool converged = false;
  /// Relative residual after each iteration, starting with the initial guess.
  std::vector<double> residual_history;
};

/// Conjugate gradient for symmetric positive (semi-)definite A. Hitting
/// max_iters is reported through `converged`, not thrown; a NaN raises
/// NumericalError.
CgResult cg_solve(const Matrix& a, const Vector& rhs, const Vector& x0, double tol, int max_iters);

/// Approximate SECF estimate b~_1 from a uniform Nystrom subset. The subset
/// is moved to the front internally; reported a~ is scattered back to the
/// original sample order (zero outside the subset).
EstimatorResult asecf_estimate(const KernelConfig& kernel, const SampleSet& samples,
                               const PolynomialBasis& basis, const Vector& fvals,
                               const NystromConfig& cfg);

}  // namespace secf
