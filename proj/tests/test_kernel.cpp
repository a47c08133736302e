#include "oracles.hpp"

#include "secf/errors.hpp"
#include "secf/kernel.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <random>
#include <vector>

using namespace secf;

namespace {

KernelConfig make(KernelFamily family, double lambda, double nu = 4.5) {
  KernelConfig cfg;
  cfg.family = family;
  cfg.lambda = lambda;
  cfg.nu = nu;
  return cfg;
}

double k0(const KernelConfig& cfg, const std::vector<double>& x, const std::vector<double>& y,
          const std::vector<double>& ux, const std::vector<double>& uy) {
  return stein_kernel_eval(cfg, x, y, ux, uy);
}

SampleSet normal_sample(Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SampleSet s;
  s.points.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) s.points(i, k) = normal(rng);
  }
  s.gradients = -s.points;
  return s;
}

}  // namespace

TEST(SteinKernel, RationalQuadraticAtCoincidentPoints) {
  const auto cfg = make(KernelFamily::RationalQuadratic, 1.0);
  EXPECT_NEAR(k0(cfg, {0.0}, {0.0}, {0.0}, {0.0}), 24.0, 1e-12);
  EXPECT_NEAR(k0(cfg, {0.3}, {0.3}, {-1.0}, {-1.0}), 26.0, 1e-12);
}

TEST(SteinKernel, SymmetricInItsArguments) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (auto family : {KernelFamily::RationalQuadratic, KernelFamily::Gaussian, KernelFamily::Matern}) {
    const auto cfg = make(family, 1.3);
    std::vector<double> x(3), y(3), ux(3), uy(3);
    for (int k = 0; k < 3; ++k) {
      x[k] = normal(rng);
      y[k] = normal(rng);
      ux[k] = normal(rng);
      uy[k] = normal(rng);
    }
    EXPECT_NEAR(k0(cfg, x, y, ux, uy), k0(cfg, y, x, uy, ux), 1e-12 * std::abs(k0(cfg, x, y, ux, uy)) + 1e-300);
  }
}

class SteinKernelFiniteDifference : public ::testing::TestWithParam<KernelFamily> {};

TEST_P(SteinKernelFiniteDifference, MatchesNestedDifferences) {
  std::mt19937_64 rng(1000 + static_cast<int>(GetParam()));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> lam(0.6, 2.0);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_real_distribution<double> nus(3.5, 6.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cfg = make(GetParam(), lam(rng), nus(rng));
    const int d = dim(rng);
    secf::Vector x(d), y(d), ux(d), uy(d);
    for (int k = 0; k < d; ++k) {
      x[k] = normal(rng);
      y[k] = x[k] + 0.7 * normal(rng);
      ux[k] = normal(rng);
      uy[k] = normal(rng);
    }
    const double got = stein_kernel_eval(cfg, {x.data(), static_cast<std::size_t>(d)},
                                         {y.data(), static_cast<std::size_t>(d)},
                                         {ux.data(), static_cast<std::size_t>(d)},
                                         {uy.data(), static_cast<std::size_t>(d)});
    const auto want = static_cast<double>(
        oracle::stein_kernel_fd(cfg, oracle::to_long(x), oracle::to_long(y), oracle::to_long(ux),
                                oracle::to_long(uy)));
    EXPECT_LE(std::abs(got - want), 1e-4 * std::abs(want))
        << "trial " << trial << " lambda " << cfg.lambda << " d " << d << " got " << got << " want " << want;
  }
}

INSTANTIATE_TEST_SUITE_P(Families, SteinKernelFiniteDifference,
                         ::testing::Values(KernelFamily::RationalQuadratic, KernelFamily::Gaussian,
                                           KernelFamily::Matern));

TEST(PsiDerivative, MatchesDifferencesOfTheProfile) {
  for (auto family : {KernelFamily::RationalQuadratic, KernelFamily::Gaussian, KernelFamily::Matern}) {
    const auto cfg = make(family, 0.9, 5.5);
    for (double z : {0.05, 0.4, 1.7, 4.0}) {
      const long double h = std::min(2e-3L, static_cast<long double>(z) / 20.0L);
      std::function<long double(long double)> f = [&](long double t) { return oracle::psi(cfg, t); };
      for (int j = 1; j <= 4; ++j) {
        // j-th derivative by repeated central differencing of the previous one.
        std::function<long double(long double)> g = f;
        for (int r = 0; r < j; ++r) {
          g = [g, h](long double t) { return (g(t - 2 * h) - 8 * g(t - h) + 8 * g(t + h) - g(t + 2 * h)) / (12 * h); };
        }
        const double want = static_cast<double>(g(z));
        EXPECT_NEAR(psi_derivative(cfg, z, j), want, 1e-6 * std::max(1.0, std::abs(want)))
            << to_string(family) << " z " << z << " j " << j;
      }
      EXPECT_NEAR(psi_derivative(cfg, z, 0), static_cast<double>(oracle::psi(cfg, z)), 1e-13);
    }
  }
}

TEST(PsiDerivative, MaternLimitIsContinuousAtZero) {
  const auto cfg = make(KernelFamily::Matern, 1.0, 4.5);
  for (int j = 0; j <= 4; ++j) {
    const double at0 = psi_derivative(cfg, 0.0, j);
    const double near0 = psi_derivative(cfg, 1e-9, j);
    EXPECT_NEAR(at0, near0, 1e-3 * std::abs(at0)) << "j " << j;
  }
  EXPECT_NEAR(psi_derivative(cfg, 0.0, 0), 1.0, 1e-12);
}

TEST(PsiDerivative, RejectsBadInput) {
  const auto cfg = make(KernelFamily::RationalQuadratic, 1.0);
  EXPECT_THROW(psi_derivative(cfg, -1.0, 1), InputError);
  EXPECT_THROW(psi_derivative(cfg, 1.0, 5), InputError);
  EXPECT_THROW(psi_derivative(make(KernelFamily::RationalQuadratic, 0.0), 1.0, 1), InputError);
  EXPECT_THROW(psi_derivative(make(KernelFamily::Matern, 1.0, 1.5), 1.0, 1), InputError);
}

TEST(SteinKernel, IntegratesToZeroAgainstTheTarget) {
  const auto cfg = make(KernelFamily::RationalQuadratic, 1.0);
  for (double y : {-1.0, 0.0, 1.0, 2.0}) {
    const long double integral = oracle::normal_expectation_1d([&](long double x) {
      const double xv = static_cast<double>(x);
      return static_cast<long double>(k0(cfg, {xv}, {y}, {-xv}, {-y}));
    });
    EXPECT_LE(std::abs(static_cast<double>(integral)), 1e-4) << "y = " << y;
  }
}

TEST(SteinKernel, NonFiniteInputIsRejected) {
  const auto cfg = make(KernelFamily::Gaussian, 1.0);
  EXPECT_THROW(k0(cfg, {NAN}, {0.0}, {0.0}, {0.0}), InputError);
  EXPECT_THROW(k0(cfg, {0.0, 1.0}, {0.0}, {0.0}, {0.0}), InputError);
}

TEST(SteinMatrix, GramIsExactlySymmetricAndPositiveSemidefinite) {
  for (auto family : {KernelFamily::RationalQuadratic, KernelFamily::Gaussian, KernelFamily::Matern}) {
    const SampleSet s = normal_sample(60, 3, 5);
    const Matrix k = stein_gram_matrix(make(family, 1.2), s.points, s.gradients);
    EXPECT_EQ((k - k.transpose()).cwiseAbs().maxCoeff(), 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(k);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10 * eig.eigenvalues().maxCoeff()) << to_string(family);
  }
}

TEST(SteinMatrix, CrossMatrixAgreesWithPointwiseEvaluation) {
  const SampleSet a = normal_sample(7, 2, 1);
  const SampleSet b = normal_sample(5, 2, 2);
  const auto cfg = make(KernelFamily::Matern, 0.8, 3.5);
  const Matrix c = stein_cross_matrix(cfg, a.points, a.gradients, b.points, b.gradients);
  for (Index i = 0; i < 7; ++i) {
    for (Index j = 0; j < 5; ++j) {
      const secf::Vector x = a.points.row(i), ux = a.gradients.row(i);
      const secf::Vector y = b.points.row(j), uy = b.gradients.row(j);
      const double want = stein_kernel_eval(cfg, {x.data(), 2}, {y.data(), 2}, {ux.data(), 2}, {uy.data(), 2});
      EXPECT_NEAR(c(i, j), want, 1e-12 * std::abs(want) + 1e-300);
    }
  }
}

TEST(SteinMatrix, WellConditionedMatrixIsNotJittered) {
  const SampleSet s = normal_sample(20, 2, 3);
  const SteinKernelMatrix k = assemble_stein_matrix(make(KernelFamily::RationalQuadratic, 1.0), s);
  EXPECT_FALSE(k.regularization_applied);
  EXPECT_EQ(k.jitter, 0.0);
  const secf::Vector rhs = secf::Vector::LinSpaced(20, -1.0, 1.0);
  EXPECT_LE((k.values * k.solve(rhs) - rhs).norm(), 1e-8 * rhs.norm());
}

TEST(SteinMatrix, DuplicatedPointsAreRescuedByJitter) {
  SampleSet s = normal_sample(10, 2, 4);
  s.points.row(9) = s.points.row(0);
  s.gradients.row(9) = s.gradients.row(0);
  const SteinKernelMatrix k = assemble_stein_matrix(make(KernelFamily::Gaussian, 1.0), s);
  EXPECT_TRUE(k.regularization_applied);
  EXPECT_GT(k.jitter, 0.0);
  EXPECT_LE(k.jitter, 1e-5 * k.values.diagonal().maxCoeff());
}

TEST(SteinMatrix, ExhaustedJitterRaisesConditioningError) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  m(2, 2) = 1.0;
  bool regularized = false;
  double jitter = 0.0;
  EXPECT_THROW(regularized_cholesky(m, regularized, jitter), ConditioningError);
}
