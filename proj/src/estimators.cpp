#include "secf/estimators.hpp"

#include "secf/diagnostics.hpp"
#include "secf/errors.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <chrono>
#include <sstream>

namespace secf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_finite(const Vector& fvals, const char* who) {
  if (fvals.size() == 0) throw InputError(std::string(who) + ": no function values");
  if (!fvals.allFinite()) throw InputError(std::string(who) + ": non-finite function value");
}

[[noreturn]] void throw_unisolvent(Index m, Index n, const std::string& detail) {
  std::ostringstream msg;
  msg << "sample is not unisolvent for the polynomial basis (m = " << m << ", n = " << n
      << "): " << detail << "; try a lower polynomial order r";
  throw UnisolvencyError(msg.str());
}

// Schur-complement pieces shared by secf_solve and secf_estimate.
struct SchurSystem {
  Matrix kinv_p;
  Eigen::LLT<Matrix> schur;
};

SchurSystem factor_schur(const SteinKernelMatrix& k0, const Matrix& p) {
  const Index n = p.rows();
  const Index m = p.cols();
  if (n < m) throw_unisolvent(m, n, "fewer points than basis functions");
  Eigen::ColPivHouseholderQR<Matrix> qr(p);
  if (qr.rank() < m) throw_unisolvent(m, n, "Vandermonde matrix has rank " + std::to_string(qr.rank()));

  SchurSystem sys;
  sys.kinv_p = k0.solve(p);
  Matrix s = p.transpose() * sys.kinv_p;
  s = 0.5 * (s + s.transpose()).eval();
  sys.schur.compute(s);
  if (sys.schur.info() != Eigen::Success) {
    throw_unisolvent(m, n, "P^T K0^{-1} P is numerically singular");
  }
  return sys;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::MC:
      return "mc";
    case Method::ZV:
      return "zv";
    case Method::CF:
      return "cf";
    case Method::SECF:
      return "secf";
    case Method::ASECF:
      return "asecf";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "mc") return Method::MC;
  if (name == "zv") return Method::ZV;
  if (name == "cf") return Method::CF;
  if (name == "secf") return Method::SECF;
  if (name == "asecf") return Method::ASECF;
  throw InputError("unknown method '" + name + "' (expected mc|zv|cf|secf|asecf)");
}

EstimatorResult mc_estimate(const Vector& fvals) {
  const auto start = Clock::now();
  require_finite(fvals, "mc_estimate");
  EstimatorResult r;
  r.method = Method::MC;
  r.estimate = fvals.mean();
  r.weights = Vector::Constant(fvals.size(), 1.0 / static_cast<double>(fvals.size()));
  r.wall_time = seconds_since(start);
  return r;
}

EstimatorResult zv_estimate(const Matrix& vandermonde, const Vector& fvals) {
  const auto start = Clock::now();
  require_finite(fvals, "zv_estimate");
  const Index n = vandermonde.rows();
  const Index m = vandermonde.cols();
  if (fvals.size() != n) throw InputError("zv_estimate: f and P differ in length");
  if (n < m) throw_unisolvent(m, n, "fewer points than basis functions");
  Eigen::ColPivHouseholderQR<Matrix> qr(vandermonde);
  if (qr.rank() < m) throw_unisolvent(m, n, "Vandermonde matrix has rank " + std::to_string(qr.rank()));

  EstimatorResult r;
  r.method = Method::ZV;
  const Vector coeffs = qr.solve(fvals);
  r.estimate = coeffs[0];
  r.coeff_b = coeffs;
  r.wall_time = seconds_since(start);
  return r;
}

EstimatorResult cf_estimate(const SteinKernelMatrix& k0, const Vector& fvals) {
  const auto start = Clock::now();
  require_finite(fvals, "cf_estimate");
  const Index n = k0.size();
  if (fvals.size() != n) throw InputError("cf_estimate: f and K0 differ in size");

  const Vector kinv_one = k0.solve(Vector(Vector::Ones(n)));
  const double denom = kinv_one.sum();
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw ConditioningError("cf_estimate: 1^T K0^{-1} 1 is not positive");
  }
  EstimatorResult r;
  r.method = Method::CF;
  Vector w = kinv_one / denom;
  r.estimate = w.dot(fvals);
  r.coeff_a = k0.solve(Vector(fvals.array() - r.estimate));
  r.coeff_b = Vector::Constant(1, r.estimate);
  r.weights = std::move(w);
  r.diagnostics = error_bound(r, k0);
  r.wall_time = seconds_since(start);
  return r;
}

InterpolantCoefficients secf_solve(const SteinKernelMatrix& k0, const Matrix& vandermonde,
                                   const Vector& fvals, SolveRoute route) {
  require_finite(fvals, "secf_solve");
  const Index n = vandermonde.rows();
  const Index m = vandermonde.cols();
  if (k0.size() != n || fvals.size() != n) throw InputError("secf_solve: size mismatch");

  InterpolantCoefficients out;
  if (route == SolveRoute::DirectIndefinite) {
    if (n < m) throw_unisolvent(m, n, "fewer points than basis functions");
    Matrix block = Matrix::Zero(n + m, n + m);
    block.topLeftCorner(n, n) = k0.values;
    block.topRightCorner(n, m) = vandermonde;
    block.bottomLeftCorner(m, n) = vandermonde.transpose();
    Vector rhs = Vector::Zero(n + m);
    rhs.head(n) = fvals;
    Eigen::FullPivLU<Matrix> lu(block);
    if (!lu.isInvertible()) throw_unisolvent(m, n, "saddle-point matrix is singular");
    const Vector sol = lu.solve(rhs);
    out.a = sol.head(n);
    out.b = sol.tail(m);
    return out;
  }

  const SchurSystem sys = factor_schur(k0, vandermonde);
  const Vector kinv_f = k0.solve(fvals);
  out.b = sys.schur.solve(Vector(vandermonde.transpose() * kinv_f));
  out.a = kinv_f - sys.kinv_p * out.b;
  return out;
}

EstimatorResult secf_estimate(const SteinKernelMatrix& k0, const Matrix& vandermonde,
                              const Vector& fvals) {
  const auto start = Clock::now();
  require_finite(fvals, "secf_estimate");
  const Index n = vandermonde.rows();
  const Index m = vandermonde.cols();
  if (k0.size() != n || fvals.size() != n) throw InputError("secf_estimate: size mismatch");

  const SchurSystem sys = factor_schur(k0, vandermonde);
  const Vector kinv_f = k0.solve(fvals);
  Vector b = sys.schur.solve(Vector(vandermonde.transpose() * kinv_f));
  Vector a = kinv_f - sys.kinv_p * b;
  Vector e1 = Vector::Zero(m);
  e1[0] = 1.0;
  Vector w = sys.kinv_p * sys.schur.solve(e1);

  EstimatorResult r;
  r.method = Method::SECF;
  r.estimate = b[0];
  r.coeff_a = std::move(a);
  r.coeff_b = std::move(b);
  r.weights = std::move(w);
  r.diagnostics = error_bound(r, k0);
  r.wall_time = seconds_since(start);
  return r;
}

Vector evaluate_interpolant(const KernelConfig& cfg, const PolynomialBasis& basis,
                            const SampleSet& train, const InterpolantCoefficients& coeffs,
                            const Matrix& query_points, const Matrix& query_grads) {
  if (coeffs.a.size() != train.size() || coeffs.b.size() != basis.m()) {
    throw InputError("evaluate_interpolant: coefficient sizes do not match training set/basis");
  }
  const Matrix kq = stein_cross_matrix(cfg, query_points, query_grads, train.points, train.gradients);
  const Matrix pq = vandermonde(basis, query_points, query_grads);
  return pq * coeffs.b + kq * coeffs.a;
}

}  // namespace secf
