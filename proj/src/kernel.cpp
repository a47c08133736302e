#include "secf/kernel.hpp"

#include "secf/errors.hpp"
#include "secf/simd/stein_row.hpp"
#include "simd/radial.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace secf {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::RationalQuadratic:
      return "rq";
    case KernelFamily::Gaussian:
      return "gaussian";
    case KernelFamily::Matern:
      return "matern";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "rq") return KernelFamily::RationalQuadratic;
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "matern") return KernelFamily::Matern;
  throw InputError("unknown kernel family '" + name + "' (expected rq|gaussian|matern)");
}

void KernelConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InputError("kernel lengthscale must be positive and finite");
  }
  if (family == KernelFamily::Matern) {
    if (!(nu > 0.0) || !std::isfinite(nu) || std::ceil(nu) <= 2.0) {
      throw InputError("Matern smoothness must satisfy ceil(nu) > 2 so that k0 is defined");
    }
  }
}

namespace {

double matern_psi(const KernelConfig& cfg, double z, int j) {
  const double nu = cfg.nu;
  const double c = std::sqrt(2.0 * nu) / cfg.lambda;
  const double log_b = (1.0 - nu) * std::log(2.0) - std::lgamma(nu);
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  const double order = nu - j;

  if (z < detail::kMaternZeroCutoff) {
    if (order <= 0.0) return 0.0;
    // z^{v/2} K_v(c sqrt z) -> Gamma(v) 2^{v-1} c^{-v} as z -> 0+.
    const double log_val = log_b + 2.0 * j * std::log(c) + std::lgamma(order) +
                           (nu - 2.0 * j - 1.0) * std::log(2.0);
    return sign * std::exp(log_val);
  }

  const double arg = c * std::sqrt(z);
  const double bessel = std::cyl_bessel_k(std::abs(order), arg);
  if (bessel == 0.0) return 0.0;
  const double log_val = log_b + (nu + j) * std::log(c) - j * std::log(2.0) +
                         0.5 * order * std::log(z) + std::log(bessel);
  return sign * std::exp(log_val);
}

}  // namespace

double psi_derivative(const KernelConfig& cfg, double z, int j) {
  if (j < 0 || j > 4) throw InputError("psi_derivative: derivative order must be in 0..4");
  if (!(z >= 0.0) || !std::isfinite(z)) throw InputError("psi_derivative: z must be finite and >= 0");
  cfg.validate();

  const double a = 1.0 / (cfg.lambda * cfg.lambda);
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  switch (cfg.family) {
    case KernelFamily::RationalQuadratic: {
      double factorial = 1.0;
      for (int i = 2; i <= j; ++i) factorial *= i;
      return sign * std::pow(a, j) * factorial * std::pow(1.0 + a * z, -(j + 1));
    }
    case KernelFamily::Gaussian:
      return sign * std::pow(a, j) * std::exp(-a * z);
    case KernelFamily::Matern:
      return matern_psi(cfg, z, j);
  }
  return 0.0;
}

double stein_kernel_eval(const KernelConfig& cfg, std::span<const double> x,
                         std::span<const double> y, std::span<const double> ux,
                         std::span<const double> uy) {
  const std::size_t d = x.size();
  if (y.size() != d || ux.size() != d || uy.size() != d) {
    throw InputError("stein_kernel_eval: dimension mismatch");
  }
  for (std::size_t k = 0; k < d; ++k) {
    if (!std::isfinite(x[k]) || !std::isfinite(y[k]) || !std::isfinite(ux[k]) ||
        !std::isfinite(uy[k])) {
      throw InputError("stein_kernel_eval: non-finite input");
    }
  }
  cfg.validate();

  simd::SteinRowArgs args;
  args.x = x.data();
  args.ux = ux.data();
  args.ys = y.data();
  args.uys = uy.data();
  args.stride = 1;
  args.count = 1;
  args.dim = d;
  double out = 0.0;
  simd::stein_row_scalar(cfg, args, &out);
  return out;
}

double cholesky_condition_estimate(const Eigen::LLT<Matrix>& llt) {
  const Matrix& l = llt.matrixLLT();
  if (l.rows() == 0) return 1.0;
  const Vector diag = l.diagonal().cwiseAbs();
  const double lo = diag.minCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = diag.maxCoeff() / lo;
  return ratio * ratio;
}

Eigen::LLT<Matrix> regularized_cholesky(Matrix& matrix, bool& regularized, double& jitter,
                                        const JitterSchedule& schedule) {
  regularized = false;
  jitter = 0.0;
  const double cond_limit = 1.0 / (100.0 * std::numeric_limits<double>::epsilon());

  Eigen::LLT<Matrix> llt(matrix);
  if (llt.info() == Eigen::Success && cholesky_condition_estimate(llt) <= cond_limit) {
    return llt;
  }

  double scale = matrix.diagonal().cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  double target = schedule.initial_relative * scale;
  for (int attempt = 0; attempt < schedule.max_retries; ++attempt) {
    matrix.diagonal().array() += target - jitter;
    jitter = target;
    llt.compute(matrix);
    if (llt.info() == Eigen::Success) {
      regularized = true;
      return llt;
    }
    target *= schedule.growth;
  }
  std::ostringstream msg;
  msg << "Cholesky factorisation failed after " << schedule.max_retries
      << " jitter retries (largest jitter tried " << jitter << ", relative "
      << jitter / scale << ")";
  throw ConditioningError(msg.str());
}

Matrix stein_cross_matrix(const KernelConfig& cfg, const Matrix& points_a, const Matrix& grads_a,
                          const Matrix& points_b, const Matrix& grads_b) {
  cfg.validate();
  const Index d = points_a.cols();
  if (points_b.cols() != d || grads_a.cols() != d || grads_b.cols() != d ||
      grads_a.rows() != points_a.rows() || grads_b.rows() != points_b.rows()) {
    throw InputError("stein_cross_matrix: dimension mismatch");
  }
  const Index na = points_a.rows();
  const Index nb = points_b.rows();
  Matrix out(na, nb);
  std::vector<double> x(d), ux(d), row(nb);
  for (Index i = 0; i < na; ++i) {
    for (Index k = 0; k < d; ++k) {
      x[k] = points_a(i, k);
      ux[k] = grads_a(i, k);
    }
    simd::SteinRowArgs args;
    args.x = x.data();
    args.ux = ux.data();
    args.ys = points_b.data();
    args.uys = grads_b.data();
    args.stride = static_cast<std::size_t>(nb);
    args.count = static_cast<std::size_t>(nb);
    args.dim = static_cast<std::size_t>(d);
    simd::stein_row(cfg, args, row.data());
    for (Index j = 0; j < nb; ++j) out(i, j) = row[j];
  }
  return out;
}

Matrix stein_gram_matrix(const KernelConfig& cfg, const Matrix& points, const Matrix& grads) {
  cfg.validate();
  const Index n = points.rows();
  const Index d = points.cols();
  if (grads.rows() != n || grads.cols() != d) {
    throw InputError("stein_gram_matrix: points and gradients differ in shape");
  }
  Matrix out(n, n);
  std::vector<double> x(d), ux(d), row(n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) {
      x[k] = points(i, k);
      ux[k] = grads(i, k);
    }
    // Upper triangle only: columns i..n-1, mirrored below.
    simd::SteinRowArgs args;
    args.x = x.data();
    args.ux = ux.data();
    args.ys = points.data() + i;
    args.uys = grads.data() + i;
    args.stride = static_cast<std::size_t>(n);
    args.count = static_cast<std::size_t>(n - i);
    args.dim = static_cast<std::size_t>(d);
    simd::stein_row(cfg, args, row.data());
    for (Index j = i; j < n; ++j) {
      out(i, j) = row[j - i];
      out(j, i) = row[j - i];
    }
  }
  return out;
}

SteinKernelMatrix assemble_stein_matrix(const KernelConfig& cfg, const SampleSet& samples) {
  cfg.validate();
  if (samples.size() == 0) throw InputError("cannot assemble a kernel matrix for zero samples");
  if (!samples.points.allFinite() || !samples.gradients.allFinite()) {
    throw InputError("non-finite point or gradient in sample set");
  }
  SteinKernelMatrix k0;
  k0.values = stein_gram_matrix(cfg, samples.points, samples.gradients);
  k0.cholesky = regularized_cholesky(k0.values, k0.regularization_applied, k0.jitter);
  return k0;
}

}  // namespace secf
