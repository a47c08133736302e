#pragma once

#include "secf/kernel.hpp"
#include "secf/result.hpp"

namespace secf {

/// sqrt(w^T K0 w). Quadratic forms in [-1e-12, 0] are round-off and give 0;
/// anything more negative raises ConditioningError.
double ksd_of_weights(const Matrix& k0, const Vector& weights);
double ksd_of_weights(const SteinKernelMatrix& k0, const Vector& weights);

/// Diagnostic from a result carrying weights and kernel coefficients.
/// Throws InputError for methods that provide neither (MC, ZV, ASECF).
DiagnosticReport error_bound(const EstimatorResult& result, const SteinKernelMatrix& k0);

}  // namespace secf
