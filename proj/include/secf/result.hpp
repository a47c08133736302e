#pragma once

#include "secf/types.hpp"

#include <optional>
#include <string>

namespace secf {

enum class Method { MC, ZV, CF, SECF, ASECF };

std::string to_string(Method method);
/// Accepts "mc", "zv", "cf", "secf", "asecf".
Method parse_method(const std::string& name);

/// Computable error diagnostic for kernel cubature weights.
///
/// ksd is the kernel Stein discrepancy (w^T K0 w)^{1/2} of the weighted
/// sample; seminorm_proxy = (a^T K0 a)^{1/2} stands in for the unobservable
/// semi-norm of f, so bound_product is an estimate of the error, not a
/// guaranteed bound.
struct DiagnosticReport {
  double ksd = 0.0;
  double seminorm_proxy = 0.0;
  double bound_product = 0.0;
};

struct NystromInfo {
  Index n0 = 0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool direct = false;
};

struct EstimatorResult {
  double estimate = 0.0;
  Method method = Method::MC;
  std::optional<Vector> weights;
  std::optional<Vector> coeff_a;
  std::optional<Vector> coeff_b;
  std::optional<DiagnosticReport> diagnostics;
  std::optional<NystromInfo> nystrom;
  double wall_time = 0.0;
};

}  // namespace secf
