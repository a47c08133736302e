#include "secf/basis.hpp"

#include "secf/errors.hpp"

#include <algorithm>
#include <functional>
#include <string>

namespace secf {

namespace {

double ipow(double x, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= x;
  return out;
}

// All alpha with |alpha| == degree, in descending lexicographic order.
void compositions(int d, int degree, std::vector<MultiIndex>& out) {
  MultiIndex cur(d, 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == d - 1) {
      cur[pos] = remaining;
      out.push_back(cur);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      cur[pos] = v;
      rec(pos + 1, remaining - v);
    }
  };
  rec(0, degree);
}

}  // namespace

PolynomialBasis enumerate_basis(int d, int r) {
  if (d < 1) throw InputError("polynomial basis needs dimension >= 1");
  if (r < 0) throw InputError("polynomial order must be non-negative");
  PolynomialBasis basis;
  basis.dim = d;
  basis.order = r;
  for (int degree = 1; degree <= r; ++degree) compositions(d, degree, basis.indices);
  return basis;
}

double stein_poly_eval(const MultiIndex& alpha, std::span<const double> x,
                       std::span<const double> u) {
  const std::size_t d = alpha.size();
  if (x.size() != d || u.size() != d) throw InputError("stein_poly_eval: dimension mismatch");
  if (std::all_of(alpha.begin(), alpha.end(), [](int a) { return a == 0; })) {
    throw InputError("stein_poly_eval: the zero multi-index is not part of the basis");
  }

  double laplacian = 0.0;
  double drift = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const int ai = alpha[i];
    if (ai == 0) continue;
    double others = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (j != i) others *= ipow(x[j], alpha[j]);
    }
    // Negative exponents never arise: the factors a_i and (a_i - 1) vanish first.
    if (ai >= 2) laplacian += ai * (ai - 1) * ipow(x[i], ai - 2) * others;
    drift += ai * ipow(x[i], ai - 1) * others * u[i];
  }
  return laplacian + drift;
}

Matrix vandermonde(const PolynomialBasis& basis, const Matrix& points, const Matrix& grads) {
  const Index n = points.rows();
  const Index d = points.cols();
  if (d != basis.dim) {
    throw InputError("vandermonde: basis dimension " + std::to_string(basis.dim) +
                     " does not match sample dimension " + std::to_string(d));
  }
  if (grads.rows() != n || grads.cols() != d) throw InputError("vandermonde: gradients missing");
  Matrix p(n, basis.m());
  std::vector<double> x(d), u(d);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) {
      x[k] = points(i, k);
      u[k] = grads(i, k);
    }
    p(i, 0) = 1.0;
    for (std::size_t j = 0; j < basis.indices.size(); ++j) {
      p(i, static_cast<Index>(j) + 1) = stein_poly_eval(basis.indices[j], x, u);
    }
  }
  return p;
}

Matrix vandermonde(const PolynomialBasis& basis, const SampleSet& samples) {
  return vandermonde(basis, samples.points, samples.gradients);
}

}  // namespace secf
