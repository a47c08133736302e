#include "secf/tuning.hpp"

#include "secf/errors.hpp"
#include "secf/estimators.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace secf {

double median_heuristic(const Matrix& points) {
  const Index n = points.rows();
  if (n < 2) throw InputError("median heuristic needs at least two points");
  std::vector<double> sq;
  sq.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) sq.push_back((points.row(i) - points.row(j)).squaredNorm());
  }
  const std::size_t half = sq.size() / 2;
  std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(half), sq.end());
  double median = sq[half];
  if (sq.size() % 2 == 0) {
    const double lower = *std::max_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(half));
    median = 0.5 * (lower + median);
  }
  const double lambda = std::sqrt(0.5 * median);
  if (!(lambda > 0.0)) {
    throw InputError("median heuristic is degenerate: the median pairwise distance is zero");
  }
  return lambda;
}

std::vector<double> default_lambda_grid() {
  return {std::pow(10.0, -1.5), std::pow(10.0, -1.0), std::pow(10.0, -0.5),
          1.0,                  std::pow(10.0, 0.5),  10.0};
}

std::vector<std::vector<Index>> make_folds(Index n, int folds, std::uint64_t seed) {
  if (folds < 2) throw InputError("cross-validation needs at least two folds");
  if (n < folds) throw InputError("fewer points than folds");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(detail::uniform_below(rng, static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[i], perm[j]);
  }
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(folds));
  const Index base = n / folds;
  const Index extra = n % folds;
  Index pos = 0;
  for (Index f = 0; f < folds; ++f) {
    const Index size = base + (f < extra ? 1 : 0);
    auto& fold = out[static_cast<std::size_t>(f)];
    fold.assign(perm.begin() + pos, perm.begin() + pos + size);
    std::sort(fold.begin(), fold.end());
    pos += size;
  }
  return out;
}

CvReport cv_scan(const SampleSet& samples, const Vector& fvals, const KernelConfig& kernel,
                 const PolynomialBasis& basis, const std::vector<double>& grid, int folds,
                 std::uint64_t seed) {
  const Index n = samples.size();
  const Index m = basis.m();
  if (grid.empty()) throw InputError("lambda grid is empty");
  if (fvals.size() != n) throw InputError("cv: f and samples differ in length");
  if (n < static_cast<Index>(folds) * (m + 1)) {
    std::ostringstream msg;
    msg << "cross-validation needs n >= folds * (m + 1) = " << folds * (m + 1) << " points, got " << n;
    throw InputError(msg.str());
  }

  const auto fold_sets = make_folds(n, folds, seed);
  std::vector<std::vector<Index>> train_sets;
  for (const auto& held : fold_sets) {
    std::vector<char> out_of_fold(static_cast<std::size_t>(n), 1);
    for (Index i : held) out_of_fold[static_cast<std::size_t>(i)] = 0;
    std::vector<Index> train;
    for (Index i = 0; i < n; ++i) {
      if (out_of_fold[static_cast<std::size_t>(i)]) train.push_back(i);
    }
    assert(train.size() + held.size() == static_cast<std::size_t>(n));
    train_sets.push_back(std::move(train));
  }

  const Matrix p_all = vandermonde(basis, samples);
  CvReport report;
  report.errors.assign(grid.size(), std::numeric_limits<double>::infinity());

  for (std::size_t g = 0; g < grid.size(); ++g) {
    KernelConfig cfg = kernel;
    cfg.lambda = grid[g];
    try {
      cfg.validate();
      // One Gram matrix per lambda; folds use sub-blocks of it.
      const Matrix gram = stein_gram_matrix(cfg, samples.points, samples.gradients);
      double total = 0.0;
      for (std::size_t f = 0; f < fold_sets.size(); ++f) {
        const auto& train = train_sets[f];
        const auto& held = fold_sets[f];
        SteinKernelMatrix k0;
        k0.values = gram(train, train);
        k0.cholesky = regularized_cholesky(k0.values, k0.regularization_applied, k0.jitter);
        const Matrix p_train = p_all(train, Eigen::all);
        const Vector f_train = fvals(train);
        const auto coeffs = secf_solve(k0, p_train, f_train);
        const Vector pred = p_all(held, Eigen::all) * coeffs.b + gram(held, train) * coeffs.a;
        total += (fvals(held) - pred).squaredNorm();
      }
      if (!std::isfinite(total)) throw NumericalError("non-finite cross-validation error");
      report.errors[g] = total;
    } catch (const std::runtime_error& e) {
      std::ostringstream msg;
      msg << "lambda = " << grid[g] << ": " << e.what();
      report.failures.push_back(msg.str());
    }
  }

  const double best = *std::min_element(report.errors.begin(), report.errors.end());
  if (!std::isfinite(best)) {
    std::ostringstream msg;
    msg << "cross-validation failed for every lambda:";
    for (const auto& f : report.failures) msg << "\n  " << f;
    throw NumericalError(msg.str());
  }
  const double tie = 1e-10 * fvals.squaredNorm();
  report.lambda = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (report.errors[g] <= best + tie) report.lambda = std::min(report.lambda, grid[g]);
  }
  return report;
}

double cv_select_lambda(const SampleSet& samples, const Vector& fvals, const KernelConfig& kernel,
                        const PolynomialBasis& basis, const std::vector<double>& grid, int folds,
                        std::uint64_t seed) {
  return cv_scan(samples, fvals, kernel, basis, grid, folds, seed).lambda;
}

}  // namespace secf
