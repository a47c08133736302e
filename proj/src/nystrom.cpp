#include "secf/nystrom.hpp"

#include "secf/errors.hpp"
#include "rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace secf {

Index resolve_n0(Index n, Index m, const NystromConfig& cfg) {
  Index n0;
  if (cfg.n0) {
    n0 = *cfg.n0;
  } else {
    n0 = static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(n))));
    n0 = std::max(n0, m);
  }
  if (n0 < m || n0 > n) {
    throw InputError("Nystrom subset size n0 = " + std::to_string(n0) + " must satisfy m (" +
                     std::to_string(m) + ") <= n0 <= n (" + std::to_string(n) + ")");
  }
  return n0;
}

std::vector<Index> select_subset(Index n, Index n0, std::uint64_t seed) {
  if (n0 < 0 || n0 > n) {
    throw InputError("cannot select " + std::to_string(n0) + " of " + std::to_string(n) + " points");
  }
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first n0 slots are a uniform draw without replacement.
  for (Index i = 0; i < n0; ++i) {
    const auto j = i + static_cast<Index>(detail::uniform_below(rng, static_cast<std::uint64_t>(n - i)));
    std::swap(perm[i], perm[j]);
  }
  perm.resize(static_cast<std::size_t>(n0));
  std::sort(perm.begin(), perm.end());
  return perm;
}

std::vector<Index> select_subset(Index n, const NystromConfig& cfg) {
  return select_subset(n, resolve_n0(n, 1, cfg), cfg.seed);
}

NystromSystem asecf_system(const Matrix& k_sub, const Matrix& p, const Vector& fvals) {
  const Index n0 = k_sub.rows();
  const Index n = k_sub.cols();
  const Index m = p.cols();
  if (p.rows() != n || fvals.size() != n || n0 > n) {
    throw InputError("asecf_system: inconsistent block dimensions");
  }
  const auto p_sub = p.topRows(n0);
  NystromSystem sys;
  sys.lhs.resize(n0 + m, n0 + m);
  sys.lhs.topLeftCorner(n0, n0) = k_sub * k_sub.transpose() + p_sub * p_sub.transpose();
  const Matrix kp = k_sub * p;
  sys.lhs.topRightCorner(n0, m) = kp;
  sys.lhs.bottomLeftCorner(m, n0) = kp.transpose();
  sys.lhs.bottomRightCorner(m, m) = p.transpose() * p;
  sys.rhs.resize(n0 + m);
  sys.rhs.head(n0) = k_sub * fvals;
  sys.rhs.tail(m) = p.transpose() * fvals;
  return sys;
}

namespace {

// Lower-triangular B with B B^T = M^{-1}: factor the index-reversed matrix,
// invert the transpose of its factor and reverse back.
Matrix lower_inverse_factor(const Matrix& m, double& jitter) {
  Matrix reversed = m.reverse();
  reversed = 0.5 * (reversed + reversed.transpose()).eval();
  bool regularized = false;
  const auto llt = regularized_cholesky(reversed, regularized, jitter);
  const Index k = m.rows();
  const Matrix upper_inv =
      llt.matrixU().solve(Matrix::Identity(k, k));  // (L^T)^{-1}, upper triangular
  return upper_inv.reverse();
}

}  // namespace

Preconditioner build_preconditioner(const Matrix& k_sub_sub, const Matrix& p_sub, const Matrix& ptp,
                                    Index n, Index n0) {
  if (k_sub_sub.rows() != n0 || k_sub_sub.cols() != n0 || p_sub.rows() != n0 ||
      ptp.rows() != p_sub.cols() || ptp.cols() != p_sub.cols() || n0 <= 0 || n < n0) {
    throw InputError("build_preconditioner: inconsistent dimensions");
  }
  const double scale = static_cast<double>(n) / static_cast<double>(n0);
  const Matrix m1 = scale * (k_sub_sub * k_sub_sub) + p_sub * p_sub.transpose();
  Preconditioner pre;
  pre.b1 = lower_inverse_factor(m1, pre.jitter_b1);
  pre.b2 = lower_inverse_factor(ptp, pre.jitter_b2);
  return pre;
}

CgResult cg_solve(const Matrix& a, const Vector& rhs, const Vector& x0, double tol, int max_iters) {
  if (a.rows() != a.cols() || a.rows() != rhs.size() || x0.size() != rhs.size()) {
    throw InputError("cg_solve: dimension mismatch");
  }
  if (max_iters < 0) throw InputError("cg_solve: max_iters must be non-negative");
  const double rhs_norm = rhs.norm();
  const double denom = rhs_norm > 0.0 ? rhs_norm : 1.0;

  CgResult out;
  out.x = x0;
  Vector r = rhs - a * out.x;
  double rr = r.squaredNorm();
  out.residual = std::sqrt(rr) / denom;
  out.residual_history.push_back(out.residual);
  if (out.residual <= tol) {
    out.converged = true;
    return out;
  }
  Vector dir = r;
  Vector ad(rhs.size());
  for (int it = 0; it < max_iters; ++it) {
    ad.noalias() = a * dir;
    const double curvature = dir.dot(ad);
    if (!std::isfinite(curvature)) throw NumericalError("cg_solve: NaN encountered");
    if (curvature <= 0.0) break;  // direction of zero curvature: nothing left to gain
    const double step = rr / curvature;
    out.x += step * dir;
    r -= step * ad;
    const double rr_next = r.squaredNorm();
    if (!std::isfinite(rr_next) || !out.x.allFinite()) throw NumericalError("cg_solve: NaN encountered");
    out.iterations = it + 1;
    out.residual = std::sqrt(rr_next) / denom;
    out.residual_history.push_back(out.residual);
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
    dir = r + (rr_next / rr) * dir;
    rr = rr_next;
  }
  return out;
}

EstimatorResult asecf_estimate(const KernelConfig& kernel, const SampleSet& samples,
                               const PolynomialBasis& basis, const Vector& fvals,
                               const NystromConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Index n = samples.size();
  const Index m = basis.m();
  if (fvals.size() != n) throw InputError("asecf_estimate: f and samples differ in length");
  if (!fvals.allFinite()) throw InputError("asecf_estimate: non-finite function value");
  const Index n0 = resolve_n0(n, m, cfg);
  const auto subset = select_subset(n, n0, cfg.seed);

  // Subset first, then the remaining points in their original order.
  std::vector<Index> order = subset;
  {
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    for (Index i : subset) taken[static_cast<std::size_t>(i)] = 1;
    for (Index i = 0; i < n; ++i) {
      if (!taken[static_cast<std::size_t>(i)]) order.push_back(i);
    }
  }
  const SampleSet perm = samples.select(order);
  Vector f(n);
  for (Index i = 0; i < n; ++i) f[i] = fvals[order[i]];

  const Matrix p = vandermonde(basis, perm);
  const Matrix k_sub = stein_cross_matrix(kernel, perm.points.topRows(n0), perm.gradients.topRows(n0),
                                          perm.points, perm.gradients);

  Vector a_sub;
  Vector b;
  NystromInfo info;
  info.n0 = n0;
  if (cfg.solver == NystromSolver::Direct) {
    // [K_{n,n0} P; P_{n0}^T 0] [a; b] ~ [f; 0] in least squares; its normal
    // equations are exactly asecf_system.
    Matrix stacked = Matrix::Zero(n + m, n0 + m);
    stacked.topLeftCorner(n, n0) = k_sub.transpose();
    stacked.topRightCorner(n, m) = p;
    stacked.bottomLeftCorner(m, n0) = p.topRows(n0).transpose();
    Vector target = Vector::Zero(n + m);
    target.head(n) = f;
    Eigen::ColPivHouseholderQR<Matrix> qr(stacked);
    if (qr.rank() < n0 + m) {
      throw UnisolvencyError("Nystrom least-squares system is rank deficient (rank " +
                             std::to_string(qr.rank()) + " < " + std::to_string(n0 + m) +
                             "); try a lower polynomial order r or a larger n0");
    }
    const Vector sol = qr.solve(target);
    a_sub = sol.head(n0);
    b = sol.tail(m);
    const NystromSystem sys = asecf_system(k_sub, p, f);
    const double rhs_norm = sys.rhs.norm();
    info.residual = (sys.lhs * sol - sys.rhs).norm() / (rhs_norm > 0.0 ? rhs_norm : 1.0);
    info.converged = true;
    info.direct = true;
  } else {
    const NystromSystem sys = asecf_system(k_sub, p, f);
    const Matrix ptp = sys.lhs.bottomRightCorner(m, m);
    const Preconditioner pre =
        build_preconditioner(k_sub.leftCols(n0), p.topRows(n0), ptp, n, n0);

    Matrix block = Matrix::Zero(n0 + m, n0 + m);
    block.topLeftCorner(n0, n0) = pre.b1;
    block.bottomRightCorner(m, m) = pre.b2;
    Matrix pre_lhs = block.transpose() * sys.lhs * block;
    pre_lhs = 0.5 * (pre_lhs + pre_lhs.transpose()).eval();
    const Vector pre_rhs = block.transpose() * sys.rhs;

    // Start from the coefficients that reproduce the plain sample mean.
    Vector x0 = Vector::Zero(n0 + m);
    Vector e1 = Vector::Zero(m);
    e1[0] = f.mean();
    x0.tail(m) = pre.b2.triangularView<Eigen::Lower>().solve(e1);

    const int max_iters = cfg.cg_max_iters.value_or(static_cast<int>(10 * (n0 + m)));
    const CgResult cg = cg_solve(pre_lhs, pre_rhs, x0, cfg.cg_tolerance, max_iters);
    a_sub = pre.b1 * cg.x.head(n0);
    b = pre.b2 * cg.x.tail(m);
    info.iterations = cg.iterations;
    info.residual = cg.residual;
    info.converged = cg.converged;
  }

  EstimatorResult r;
  r.method = Method::ASECF;
  r.estimate = b[0];
  Vector a_full = Vector::Zero(n);
  for (Index i = 0; i < n0; ++i) a_full[order[i]] = a_sub[i];
  r.coeff_a = std::move(a_full);
  r.coeff_b = std::move(b);
  r.nystrom = info;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace secf
