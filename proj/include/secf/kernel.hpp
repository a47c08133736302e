#pragma once

#include "secf/types.hpp"

#include <Eigen/Cholesky>

#include <span>
#include <string>

namespace secf {

enum class KernelFamily { RationalQuadratic, Gaussian, Matern };

std::string to_string(KernelFamily family);
/// Accepts "rq", "gaussian", "matern" (CLI spelling).
KernelFamily parse_kernel_family(const std::string& name);

/// Radial base kernel k(x, y) = Psi(||x - y||^2).
struct KernelConfig {
  KernelFamily family = KernelFamily::RationalQuadratic;
  double lambda = 1.0;
  /// Matern smoothness; ignored by the other families.
  double nu = 4.5;

  /// Throws InputError unless lambda > 0 and, for Matern, ceil(nu) > 2.
  void validate() const;
};

/// Psi^(j)(z) for j in 0..4, z >= 0.
///
/// For the Matern family at z below 1e-12 the right limit is returned; when
/// that limit is infinite (nu <= j, only possible for j in {3, 4}) the value is
/// 0, since the radial Stein kernel only uses z * Psi'''(z) and z^2 * Psi''''(z),
/// which vanish there.
double psi_derivative(const KernelConfig& cfg, double z, int j);

/// Stein kernel k0(x, y) = L_x L_y k(x, y) for a radial base kernel, where
/// ux = grad log p(x) and uy = grad log p(y).
double stein_kernel_eval(const KernelConfig& cfg, std::span<const double> x,
                         std::span<const double> y, std::span<const double> ux,
                         std::span<const double> uy);

/// Assembled K0 together with the Cholesky factor of its (possibly jittered)
/// values.
struct SteinKernelMatrix {
  Matrix values;
  bool regularization_applied = false;
  double jitter = 0.0;
  Eigen::LLT<Matrix> cholesky;

  Index size() const { return values.rows(); }
  Vector solve(const Vector& rhs) const { return cholesky.solve(rhs); }
  Matrix solve(const Matrix& rhs) const { return cholesky.solve(rhs); }
};

/// Jitter escalation used for every kernel-type factorisation in the library.
struct JitterSchedule {
  double initial_relative = 1e-10;
  double growth = 10.0;
  int max_retries = 5;
};

/// Cholesky with the jitter schedule. The unjittered factor is accepted only
/// when the pivot-ratio condition estimate stays below 1 / (100 eps). Adds
/// jitter * I to `matrix` in place when needed and reports what was applied.
/// Throws ConditioningError naming the largest jitter tried.
Eigen::LLT<Matrix> regularized_cholesky(Matrix& matrix, bool& regularized, double& jitter,
                                        const JitterSchedule& schedule = {});

/// Condition number proxy (max L_ii / min L_ii)^2 of a successful factor.
double cholesky_condition_estimate(const Eigen::LLT<Matrix>& llt);

/// Symmetric n x n Stein kernel matrix over the sample's points and
/// gradients, regularised so that it admits a Cholesky factorisation.
SteinKernelMatrix assemble_stein_matrix(const KernelConfig& cfg, const SampleSet& samples);

/// Raw (unregularised) rectangular block [k0(a_i, b_j)].
Matrix stein_cross_matrix(const KernelConfig& cfg, const Matrix& points_a, const Matrix& grads_a,
                          const Matrix& points_b, const Matrix& grads_b);

/// Raw symmetric block [k0(x_i, x_j)] without regularisation.
Matrix stein_gram_matrix(const KernelConfig& cfg, const Matrix& points, const Matrix& grads);

}  // namespace secf
