#include "secf/targets.hpp"

#include "secf/errors.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace secf {

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double gaussian_benchmark_integrand(const Vector& x) {
  const double x23 = x[1] * x[2];
  return 1.0 + x[1] + 0.1 * x[0] * x23 + std::sin(x[0]) * std::exp(-x23 * x23);
}

TargetModel gaussian_target(Index d) {
  if (d <= 0) throw InputError("gaussian target needs d >= 1");
  TargetModel t;
  t.name = "gaussian";
  t.dim = d;
  t.log_density = [](const Vector& x) { return -0.5 * x.squaredNorm(); };
  t.gradient = [](const Vector& x) -> Vector { return -x; };
  if (d >= 3) t.integrands.emplace_back("benchmark", gaussian_benchmark_integrand);
  return t;
}

// ---------------------------------------------------------------------------
// Cormack-Jolly-Seber

void CjsData::validate() const {
  const Index rows = released.size();
  if (rows < 2) throw InputError("capture-recapture data needs at least three occasions");
  if (recaptured.rows() != rows || recaptured.cols() != rows) {
    throw InputError("recapture table must be " + std::to_string(rows) + " x " + std::to_string(rows) +
                     " for " + std::to_string(rows) + " release cohorts");
  }
  for (Index i = 0; i < rows; ++i) {
    const std::string where = "cohort " + std::to_string(i + 1);
    if (!std::isfinite(released[i]) || released[i] < 0.0) {
      throw InputError(where + ": release count must be a non-negative number");
    }
    double caught = 0.0;
    for (Index c = 0; c < rows; ++c) {
      const double y = recaptured(i, c);
      if (!std::isfinite(y) || y < 0.0) throw InputError(where + ": recapture counts must be non-negative");
      if (c < i && y != 0.0) {
        throw InputError(where + ": recapture before release at occasion " + std::to_string(c + 2));
      }
      caught += y;
    }
    if (released[i] - caught < 0.0) {
      throw InputError(where + ": more recaptures than releases (d_i < 0)");
    }
  }
}

namespace {

// A cell probability is a product of theta_j (positive) or 1 - theta_j factors.
struct Factor {
  Index param;
  bool positive;
};

struct CjsCell {
  double count;
  std::vector<Factor> factors;
};

struct CjsCohort {
  double never_seen;  // d_i
  std::vector<CjsCell> cells;
};

std::vector<CjsCohort> cjs_layout(const CjsData& data) {
  const Index T = data.occasions();
  // 1-based occasion indices mapped to parameter slots.
  const auto phi = [&](Index j) { return j - 1; };
  const auto cap = [&](Index j) { return (T - 2) + (j - 2); };
  const Index last = 2 * T - 4;  // phi_{T-1} p_T

  std::vector<CjsCohort> out;
  for (Index i = 1; i <= T - 1; ++i) {
    CjsCohort cohort;
    double caught = 0.0;
    for (Index k = i + 1; k <= T; ++k) {
      CjsCell cell;
      cell.count = data.recaptured(i - 1, k - 2);
      caught += cell.count;
      if (k < T) {
        cell.factors.push_back({phi(i), true});
        cell.factors.push_back({cap(k), true});
        for (Index m = i + 1; m <= k - 1; ++m) {
          cell.factors.push_back({phi(m), true});
          cell.factors.push_back({cap(m), false});
        }
      } else {
        if (i <= T - 2) cell.factors.push_back({phi(i), true});
        for (Index m = i + 1; m <= T - 1; ++m) {
          if (m <= T - 2) cell.factors.push_back({phi(m), true});
          cell.factors.push_back({cap(m), false});
        }
        cell.factors.push_back({last, true});
      }
      cohort.cells.push_back(std::move(cell));
    }
    cohort.never_seen = data.released[i - 1] - caught;
    out.push_back(std::move(cohort));
  }
  return out;
}

double log_factor(const Factor& f, const Vector& xt) {
  return f.positive ? -softplus(-xt[f.param]) : -softplus(xt[f.param]);
}

// d log(factor) / d logit(theta)
double dlog_factor(const Factor& f, double theta) { return f.positive ? 1.0 - theta : -theta; }

double cjs_loglik_impl(const std::vector<CjsCohort>& layout, const Vector& xt, Vector* grad) {
  const Index d = xt.size();
  Vector theta(d);
  for (Index j = 0; j < d; ++j) theta[j] = sigmoid(xt[j]);
  if (grad) grad->setZero(d);

  double total = 0.0;
  Vector dchi(d);
  for (const auto& cohort : layout) {
    double seen = 0.0;
    dchi.setZero();
    for (const auto& cell : cohort.cells) {
      double lp = 0.0;
      for (const auto& f : cell.factors) lp += log_factor(f, xt);
      const double prob = std::exp(lp);
      seen += prob;
      if (cell.count > 0.0) total += cell.count * lp;
      if (grad) {
        for (const auto& f : cell.factors) {
          const double dl = dlog_factor(f, theta[f.param]);
          (*grad)[f.param] += cell.count * dl;
          dchi[f.param] -= prob * dl;
        }
      }
    }
    if (cohort.never_seen > 0.0) {
      const double chi = 1.0 - seen;
      if (!(chi > 0.0)) return -std::numeric_limits<double>::infinity();
      total += cohort.never_seen * std::log1p(-seen);
      if (grad) *grad += (cohort.never_seen / chi) * dchi;
    }
  }
  return total;
}

}  // namespace

double cjs_log_likelihood(const CjsData& data, const Vector& xt) {
  data.validate();
  if (xt.size() != 2 * data.occasions() - 3) throw InputError("cjs: parameter vector has the wrong length");
  return cjs_loglik_impl(cjs_layout(data), xt, nullptr);
}

TargetModel cjs_target(const CjsData& data) {
  data.validate();
  const Index d = 2 * data.occasions() - 3;
  auto layout = std::make_shared<const std::vector<CjsCohort>>(cjs_layout(data));

  TargetModel t;
  t.name = "cjs";
  t.dim = d;
  t.log_density = [layout](const Vector& xt) {
    double prior = 0.0;
    for (Index j = 0; j < xt.size(); ++j) prior += xt[j] - 2.0 * softplus(xt[j]);
    return prior + cjs_loglik_impl(*layout, xt, nullptr);
  };
  t.gradient = [layout](const Vector& xt) -> Vector {
    Vector g;
    cjs_loglik_impl(*layout, xt, &g);
    for (Index j = 0; j < xt.size(); ++j) g[j] += 1.0 - 2.0 * sigmoid(xt[j]);
    return g;
  };
  for (Index j = 0; j < d; ++j) {
    t.integrands.emplace_back("theta" + std::to_string(j + 1),
                              [j](const Vector& xt) { return sigmoid(xt[j]); });
  }
  return t;
}

// ---------------------------------------------------------------------------
// Logistic regression

void LogisticData::validate() const {
  const Index n = design.rows();
  const Index d = design.cols();
  if (n == 0 || d == 0) throw InputError("logistic data is empty");
  if (response.size() != n) throw InputError("logistic data: response length differs from design rows");
  if (prior_sd.size() != d) throw InputError("logistic data: one prior sd per coefficient is required");
  if (!design.allFinite()) throw InputError("logistic data: non-finite design entry");
  for (Index i = 0; i < n; ++i) {
    if (response[i] != 0.0 && response[i] != 1.0) {
      throw InputError("logistic data: response in row " + std::to_string(i + 1) + " is not 0 or 1");
    }
  }
  for (Index j = 0; j < d; ++j) {
    if (!(prior_sd[j] > 0.0) || !std::isfinite(prior_sd[j])) {
      throw InputError("logistic data: prior sd must be positive");
    }
  }
}

LogisticData make_logistic_data(const Matrix& covariates, const Vector& response) {
  const Index n = covariates.rows();
  const Index p = covariates.cols();
  if (n < 2) throw InputError("logistic data needs at least two rows");
  LogisticData out;
  out.design.resize(n, p + 1);
  out.design.col(0).setOnes();
  for (Index j = 0; j < p; ++j) {
    const Vector col = covariates.col(j);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw InputError("covariate column " + std::to_string(j + 1) + " is constant");
    out.design.col(j + 1) = (col.array() - mean) * (0.5 / sd);
  }
  out.response = response;
  out.prior_sd = Vector::Constant(p + 1, 5.0);
  out.prior_sd[0] = 20.0;
  out.validate();
  return out;
}

double logistic_log_likelihood(const LogisticData& data, const Vector& beta) {
  const Vector eta = data.design * beta;
  double total = 0.0;
  for (Index i = 0; i < eta.size(); ++i) total += data.response[i] * eta[i] - softplus(eta[i]);
  return total;
}

TargetModel logistic_target(const LogisticData& data, std::optional<Index> predict_row) {
  data.validate();
  if (predict_row && (*predict_row < 0 || *predict_row >= data.design.rows())) {
    throw InputError("prediction row " + std::to_string(*predict_row) + " is outside the design");
  }
  auto shared = std::make_shared<const LogisticData>(data);

  TargetModel t;
  t.name = "logistic";
  t.dim = data.design.cols();
  t.log_density = [shared](const Vector& beta) {
    const double prior = -0.5 * beta.cwiseQuotient(shared->prior_sd).squaredNorm();
    return prior + logistic_log_likelihood(*shared, beta);
  };
  t.gradient = [shared](const Vector& beta) -> Vector {
    const Vector eta = shared->design * beta;
    Vector resid(eta.size());
    for (Index i = 0; i < eta.size(); ++i) resid[i] = shared->response[i] - sigmoid(eta[i]);
    return shared->design.transpose() * resid -
           beta.cwiseQuotient(shared->prior_sd.cwiseProduct(shared->prior_sd));
  };
  if (predict_row) {
    const Vector row = data.design.row(*predict_row).transpose();
    t.integrands.emplace_back("pred", [row](const Vector& beta) { return sigmoid(row.dot(beta)); });
  }
  return t;
}

}  // namespace secf
