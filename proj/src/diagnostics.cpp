#include "secf/diagnostics.hpp"

#include "secf/errors.hpp"

#include <cmath>
#include <sstream>

namespace secf {

namespace {

constexpr double kNegativeLimit = -1e-12;

double checked_sqrt(double quad, const char* what) {
  if (quad < kNegativeLimit) {
    std::ostringstream msg;
    msg << what << " quadratic form is negative (" << quad << "); K0 is not positive semi-definite";
    throw ConditioningError(msg.str());
  }
  // Small negative values are round-off from a jittered PSD matrix.
  return quad > 0.0 ? std::sqrt(quad) : 0.0;
}

}  // namespace

double ksd_of_weights(const Matrix& k0, const Vector& weights) {
  if (k0.rows() != weights.size() || k0.cols() != weights.size()) {
    throw InputError("ksd_of_weights: size mismatch");
  }
  return checked_sqrt(weights.dot(k0 * weights), "w^T K0 w");
}

double ksd_of_weights(const SteinKernelMatrix& k0, const Vector& weights) {
  return ksd_of_weights(k0.values, weights);
}

DiagnosticReport error_bound(const EstimatorResult& result, const SteinKernelMatrix& k0) {
  if (!result.weights || !result.coeff_a) {
    throw InputError("error diagnostic is unsupported for method '" + to_string(result.method) +
                     "' (needs cubature weights and kernel coefficients)");
  }
  DiagnosticReport report;
  report.ksd = ksd_of_weights(k0, *result.weights);
  report.seminorm_proxy = checked_sqrt(result.coeff_a->dot(k0.values * *result.coeff_a), "a^T K0 a");
  report.bound_product = report.ksd * report.seminorm_proxy;
  return report;
}

}  // namespace secf
