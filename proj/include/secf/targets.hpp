#pragma once

#include "secf/samplers.hpp"

#include <optional>

namespace secf {

/// Standard normal on R^d: log p = -||x||^2 / 2, grad = -x. For d >= 3 the
/// target also records "benchmark", 1 + x2 + 0.1 x1 x2 x3 + sin(x1) exp(-(x2 x3)^2),
/// whose integral is 1.
TargetModel gaussian_target(Index d);

double gaussian_benchmark_integrand(const Vector& x);

/// Capture-recapture counts over T occasions. Row i (0-based, i < T - 1) is
/// the cohort released at occasion i + 1: `released[i]` birds, of which
/// `recaptured(i, k - 1)` were first recaptured at occasion k + 1 (so only
/// entries with k > i are meaningful; the rest must be zero).
struct CjsData {
  Vector released;
  Matrix recaptured;

  Index occasions() const { return released.size() + 1; }
  /// Throws InputError on negative counts, non-zero lower entries or
  /// cohorts with more recaptures than releases.
  void validate() const;
};

/// Cormack-Jolly-Seber posterior in logit coordinates. Parameters are
/// (phi_1 .. phi_{T-2}, p_2 .. p_{T-1}, phi_{T-1} p_T), d = 2T - 3, each with a
/// uniform prior on (0, 1) carried through the logit Jacobian. Integrands
/// "theta1".."theta<d>" record the parameters on the probability scale.
TargetModel cjs_target(const CjsData& data);

/// Log-likelihood of the CJS model at logit-scale parameters.
double cjs_log_likelihood(const CjsData& data, const Vector& xt);

struct LogisticData {
  /// N x d design; column 0 is the intercept.
  Matrix design;
  /// Binary responses.
  Vector response;
  /// Prior standard deviation per coefficient.
  Vector prior_sd;

  void validate() const;
};

/// Appends an intercept column, rescales every other column to mean zero and
/// standard deviation 0.5, and sets priors N(0, 20^2) on the intercept and
/// N(0, 5^2) elsewhere.
LogisticData make_logistic_data(const Matrix& covariates, const Vector& response);

double logistic_log_likelihood(const LogisticData& data, const Vector& beta);

/// Logistic regression posterior. When `predict_row` is set, the target
/// records "pred", the fitted probability 1 / (1 + exp(-x~ beta)) at that
/// design row.
TargetModel logistic_target(const LogisticData& data, std::optional<Index> predict_row = 0);

/// log(1 + exp(t)) without overflow.
double softplus(double t);
/// 1 / (1 + exp(-t)) without overflow.
double sigmoid(double t);

}  // namespace secf
