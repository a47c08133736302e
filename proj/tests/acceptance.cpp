// Acceptance checks C1..C10. Prints one PASS/FAIL line per criterion with its
// runtime; exits non-zero if any criterion fails. Pass criterion ids (e.g.
// "C7 C9") to run a subset.
//
// Optional data-supplied runs: SECF_SONAR_CSV (covariates plus 0/1 response)
// adds a chain benchmark of the predictive probability against 0.4971;
// SECF_RECAPTURE_CSV adds a MALA run on the capture-recapture posterior.

#include "oracles.hpp"

#include "secf/basis.hpp"
#include "secf/errors.hpp"
#include "secf/estimators.hpp"
#include "secf/harness.hpp"
#include "secf/io.hpp"
#include "secf/nystrom.hpp"
#include "secf/samplers.hpp"
#include "secf/targets.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace secf;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

struct Criterion {
  std::string id;
  std::string title;
  double time_limit_s;
  std::function<void(Outcome&)> run;
};

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

Vector monomial_values(const Matrix& pts, const MultiIndex& alpha) {
  Vector f = Vector::Ones(pts.rows());
  for (Index i = 0; i < pts.rows(); ++i) {
    for (Index k = 0; k < pts.cols(); ++k) f[i] *= std::pow(pts(i, k), alpha[static_cast<std::size_t>(k)]);
  }
  return f;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

double max_gradient_error(const TargetModel& t, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(t.dim);
    for (Index k = 0; k < t.dim; ++k) x[k] = scale * normal(rng);
    const Vector fd = oracle::fd_gradient(t.log_density, x);
    worst = std::max(worst, (t.gradient(x) - fd).norm() / std::max(1.0, fd.norm()));
  }
  return worst;
}

CjsData synthetic_cjs(Index T, double released) {
  std::vector<double> phi(static_cast<std::size_t>(T)), p(static_cast<std::size_t>(T + 1));
  for (Index j = 1; j < T; ++j) phi[static_cast<std::size_t>(j)] = 0.55 + 0.04 * static_cast<double>(j);
  for (Index j = 2; j <= T; ++j) p[static_cast<std::size_t>(j)] = 0.45 + 0.05 * static_cast<double>(j % 3);
  CjsData data;
  data.released = Vector::Constant(T - 1, released);
  data.recaptured = Matrix::Zero(T - 1, T - 1);
  for (Index i = 1; i < T; ++i) {
    for (Index k = i + 1; k <= T; ++k) {
      double cell = phi[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(k)];
      for (Index m = i + 1; m < k; ++m) cell *= phi[static_cast<std::size_t>(m)] * (1.0 - p[static_cast<std::size_t>(m)]);
      data.recaptured(i - 1, k - 2) = std::round(released * cell);
    }
  }
  return data;
}

LogisticData synthetic_logistic(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  Matrix x(n, p);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = unif(rng) < 1.0 / (1.0 + std::exp(-x(i, 0))) ? 1.0 : 0.0;
  return make_logistic_data(x, y);
}

// Empirical covariance from a short small-step pilot chain, used as the
// preconditioner for the data-supplied runs.
Matrix pilot_covariance(const TargetModel& target) {
  ChainConfig pilot;
  pilot.step = 0.1;
  pilot.n = 4000;
  pilot.burn_in = 2000;
  pilot.seed = 99;
  const Matrix pts = mala_chain(target, pilot).points;
  const Matrix centred = pts.rowwise() - pts.colwise().mean();
  return centred.transpose() * centred / static_cast<double>(pts.rows() - 1) +
         1e-8 * Matrix::Identity(pts.cols(), pts.cols());
}

BenchmarkConfig gaussian_experiment(const std::string& methods, Index replicates) {
  BenchmarkConfig cfg;
  cfg.methods = parse_method_list(methods);
  cfg.kernel.family = KernelFamily::RationalQuadratic;
  cfg.lambda_mode = LambdaMode::AutoCV;
  cfg.replicates = replicates;
  cfg.seed = 1;
  return cfg;
}

void c1_semi_exactness(Outcome& out) {
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    for (int r = 1; r <= 2; ++r) {
      const SampleSet s = normal_sample(50, d, static_cast<std::uint64_t>(100 + 10 * d + r));
      const auto basis = enumerate_basis(d, r);
      KernelConfig kc;
      const SteinKernelMatrix k0 = assemble_stein_matrix(kc, s);
      const Matrix p = vandermonde(basis, s);
      std::vector<MultiIndex> alphas = basis.indices;
      alphas.emplace_back(static_cast<std::size_t>(d), 0);
      for (const auto& alpha : alphas) {
        const double err = std::abs(secf_estimate(k0, p, monomial_values(s.points, alpha)).estimate -
                                    oracle::gaussian_moment(alpha));
        worst = std::max(worst, err);
      }
    }
  }
  out.detail << "max |error| " << fmt(worst);
  out.require(worst <= 1e-6, "error above 1e-6");
}

void c2_constructed_exactness(Outcome& out) {
  const SampleSet s = normal_sample(40, 2, 77);
  const Matrix p = vandermonde(enumerate_basis(2, 2), s);
  KernelConfig kc;
  const SteinKernelMatrix k0 = assemble_stein_matrix(kc, s);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  double worst_secf = 0.0, worst_zv = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Vector beta(p.cols());
    for (Index j = 0; j < beta.size(); ++j) beta[j] = normal(rng);
    beta[0] = 1.0;
    const Vector f = p * beta;
    worst_secf = std::max(worst_secf, std::abs(secf_estimate(k0, p, f).estimate - 1.0));
    worst_zv = std::max(worst_zv, std::abs(zv_estimate(p, f).estimate - 1.0));
  }
  out.detail << "secf " << fmt(worst_secf) << ", zv " << fmt(worst_zv);
  out.require(worst_secf <= 1e-8, "secf above 1e-8");
  out.require(worst_zv <= 1e-8, "zv above 1e-8");
}

void c3_equivalences(Outcome& out) {
  KernelConfig kc;
  const SampleSet s = normal_sample(60, 3, 41);
  Vector f(60);
  for (Index i = 0; i < 60; ++i) f[i] = gaussian_benchmark_integrand(s.points.row(i).transpose());
  const SteinKernelMatrix k0 = assemble_stein_matrix(kc, s);

  const double secf0 = secf_estimate(k0, vandermonde(enumerate_basis(3, 0), s), f).estimate;
  const double cf = cf_estimate(k0, f).estimate;
  const double e1 = std::abs(secf0 - cf);

  const auto basis = enumerate_basis(3, 2);
  NystromConfig direct;
  direct.n0 = 60;
  direct.solver = NystromSolver::Direct;
  const double e2 = std::abs(asecf_estimate(kc, s, basis, f, direct).estimate -
                             secf_estimate(k0, vandermonde(basis, s), f).estimate);

  NystromConfig none;
  none.cg_max_iters = 0;
  const double e3 = std::abs(asecf_estimate(kc, s, enumerate_basis(3, 1), f, none).estimate - f.mean());

  out.detail << "secf0-cf " << fmt(e1) << ", asecf-secf " << fmt(e2) << ", asecf0-mc " << fmt(e3);
  out.require(e1 <= 1e-10, "secf(r=0) vs cf");
  out.require(e2 <= 1e-6, "asecf(n0=n) vs secf");
  out.require(e3 <= 1e-12, "asecf(0 iterations) vs mc");
}

void c4_zero_mean(Outcome& out) {
  // Library values of L x^alpha on a fine grid, integrated by the oracle rule.
  const int nodes = 8001;
  const double half = 14.0;
  SampleSet grid;
  grid.points.resize(nodes, 1);
  for (int i = 0; i < nodes; ++i) grid.points(i, 0) = -half + 2.0 * half * i / (nodes - 1);
  grid.gradients = -grid.points;
  const Matrix p = vandermonde(enumerate_basis(1, 3), grid);
  double worst_op = 0.0;
  for (Index j = 1; j < p.cols(); ++j) {
    const long double integral = oracle::normal_expectation_1d([&](long double x) {
      const auto i = static_cast<Index>(std::llround((x + half) / (2.0 * half) * (nodes - 1)));
      return static_cast<long double>(p(i, j));
    });
    worst_op = std::max(worst_op, std::abs(static_cast<double>(integral)));
  }

  KernelConfig kc;
  kc.lambda = 1.0;
  double worst_k = 0.0;
  for (double y : {-1.0, 0.0, 1.0, 2.0}) {
    const long double integral = oracle::normal_expectation_1d([&](long double x) {
      const double xv = static_cast<double>(x), uv = -xv, un = -y;
      return static_cast<long double>(stein_kernel_eval(kc, {&xv, 1}, {&y, 1}, {&uv, 1}, {&un, 1}));
    });
    worst_k = std::max(worst_k, std::abs(static_cast<double>(integral)));
  }
  out.detail << "operator " << fmt(worst_op) << ", kernel " << fmt(worst_k);
  out.require(worst_op <= 1e-6, "operator integral above 1e-6");
  out.require(worst_k <= 1e-4, "kernel integral above 1e-4");
}

void c5_optimality(Outcome& out) {
  const SampleSet s = normal_sample(40, 2, 31);
  const Matrix p = vandermonde(enumerate_basis(2, 1), s);
  KernelConfig kc;
  const SteinKernelMatrix k0 = assemble_stein_matrix(kc, s);
  const Vector w = *secf_estimate(k0, p, Vector::Ones(40)).weights;
  const double base = w.dot(k0.values * w);
  Eigen::HouseholderQR<Matrix> qr(p);
  const Matrix q = qr.householderQ();
  const Matrix null = q.rightCols(40 - p.cols());
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Vector z(null.cols());
    for (Index j = 0; j < z.size(); ++j) z[j] = normal(rng);
    const Vector v = w + (0.1 / (trial + 1)) * (null * z);
    if (v.dot(k0.values * v) < base - 1e-10) ++violations;
  }
  Vector e1 = Vector::Zero(p.cols());
  e1[0] = 1.0;
  const double constraint = (p.transpose() * w - e1).cwiseAbs().maxCoeff();
  out.detail << violations << "/100 perturbations lower, |P^T w - e1| " << fmt(constraint);
  out.require(violations == 0, "perturbation beat the weights");
  out.require(constraint <= 1e-8, "constraint residual");
}

void c6_differentiation(Outcome& out) {
  double worst_kernel = 0.0;
  for (auto family : {KernelFamily::RationalQuadratic, KernelFamily::Gaussian, KernelFamily::Matern}) {
    std::mt19937_64 rng(1000 + static_cast<int>(family));
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> lam(0.6, 2.0);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_real_distribution<double> nus(3.5, 6.0);
    for (int trial = 0; trial < 20; ++trial) {
      KernelConfig cfg;
      cfg.family = family;
      cfg.lambda = lam(rng);
      cfg.nu = nus(rng);
      const int d = dim(rng);
      Vector x(d), y(d), ux(d), uy(d);
      for (int k = 0; k < d; ++k) {
        x[k] = normal(rng);
        y[k] = x[k] + 0.7 * normal(rng);
        ux[k] = normal(rng);
        uy[k] = normal(rng);
      }
      const auto sd = static_cast<std::size_t>(d);
      const double got = stein_kernel_eval(cfg, {x.data(), sd}, {y.data(), sd}, {ux.data(), sd}, {uy.data(), sd});
      const auto want = static_cast<double>(oracle::stein_kernel_fd(cfg, oracle::to_long(x), oracle::to_long(y),
                                                                    oracle::to_long(ux), oracle::to_long(uy)));
      worst_kernel = std::max(worst_kernel, std::abs(got - want) / std::abs(want));
    }
  }
  const double g_gauss = max_gradient_error(gaussian_target(4), 1, 1.0);
  const double g_cjs = max_gradient_error(cjs_target(synthetic_cjs(7, 80.0)), 2, 1.0);
  const double g_lr = max_gradient_error(logistic_target(synthetic_logistic(208, 60, 3)), 3, 0.3);
  out.detail << "kernel rel " << fmt(worst_kernel) << ", gradients gaussian " << fmt(g_gauss) << " cjs "
             << fmt(g_cjs) << " logistic " << fmt(g_lr);
  out.require(worst_kernel <= 1e-4, "stein kernel vs nested differences");
  out.require(std::max({g_gauss, g_cjs, g_lr}) <= 1e-5, "target gradient vs finite differences");
}

void c7_gaussian_efficiency(Outcome& out) {
  const EfficiencyReport r = gaussian_benchmark(4, 1000, gaussian_experiment("zv:2,secf:2", 20));
  const double e_secf = r.method("secf:2").statistical_efficiency;
  const double e_zv = r.method("zv:2").statistical_efficiency;
  out.detail << "E(secf:2) " << fmt(e_secf) << ", E(zv:2) " << fmt(e_zv);
  out.require(e_secf >= 10.0, "secf efficiency below 10");
  out.require(e_zv >= 2.0, "zv efficiency below 2");
}

void c8_diagnostic(Outcome& out) {
  for (Index n : {100, 500}) {
    const EfficiencyReport r = gaussian_benchmark(4, n, gaussian_experiment("secf:2", 20));
    const MethodSummary& m = r.method("secf:2");
    int covered = 0;
    for (std::size_t i = 0; i < m.errors.size(); ++i) {
      if (m.bound_products[i] >= std::abs(m.errors[i])) ++covered;
    }
    const double frac = static_cast<double>(covered) / static_cast<double>(m.errors.size());
    out.detail << "n=" << n << " " << covered << "/" << m.errors.size() << " ";
    out.require(frac >= 0.9, "coverage below 90% at n=" + std::to_string(n));
  }
}

void c9_error_trend(Outcome& out) {
  double prev = std::numeric_limits<double>::infinity();
  for (Index n : {100, 300, 1000}) {
    const EfficiencyReport r = gaussian_benchmark(4, n, gaussian_experiment("secf:2", 20));
    std::vector<double> abs_err;
    for (double e : r.method("secf:2").errors) abs_err.push_back(std::abs(e));
    const double med = median(abs_err);
    out.detail << "n=" << n << " " << fmt(med) << " ";
    out.require(med <= prev, "median error increased at n=" + std::to_string(n));
    prev = med;
  }
}

void c10_chain_sanity(Outcome& out) {
  ChainConfig tiny;
  tiny.step = 1e-6;
  tiny.n = 1000;
  tiny.seed = 1;
  ChainStats stats;
  mala_chain(gaussian_target(1), tiny, &stats);
  out.detail << "acceptance(h=1e-6) " << fmt(stats.acceptance_rate());
  out.require(stats.acceptance_rate() >= 0.99, "tiny-step acceptance below 0.99");

  ChainConfig c;
  c.step = 1.4;
  c.n = 10000;
  c.burn_in = 100;
  c.seed = 7;
  const Vector v = mala_chain(gaussian_target(1), c).points.col(0);
  const Index batches = 50, len = v.size() / batches;
  Vector means(batches);
  for (Index b = 0; b < batches; ++b) means[b] = v.segment(b * len, len).mean();
  const double se = std::sqrt((means.array() - means.mean()).square().sum() / (batches - 1) / batches);
  out.detail << ", mean " << fmt(v.mean()) << " (se " << fmt(se) << ")";
  out.require(std::abs(v.mean()) <= 4.0 * se, "chain mean outside 4 standard errors");

  const double g = std::max(max_gradient_error(cjs_target(synthetic_cjs(7, 80.0)), 12, 1.0),
                            max_gradient_error(logistic_target(synthetic_logistic(208, 60, 13)), 13, 0.3));
  out.detail << ", gradients " << fmt(g);
  out.require(g <= 1e-5, "target gradients");

  if (const char* path = std::getenv("SECF_SONAR_CSV")) {
    const LogisticTable t = load_logistic_table(path);
    const TargetModel target = logistic_target(make_logistic_data(t.covariates, t.response));
    ChainConfig chain;
    chain.step = 0.3;
    chain.n = 1000;
    chain.preconditioner = pilot_covariance(target);
    BenchmarkConfig cfg;
    cfg.methods = parse_method_list("zv:1,secf:1");
    cfg.lambda_mode = LambdaMode::AutoMedian;
    cfg.replicates = 5;
    const auto reports = chain_benchmark(target, chain, {{"pred", 0.4971}}, cfg);
    out.detail << ", sonar E(secf:1) " << fmt(reports[0].method("secf:1").statistical_efficiency) << " (informational)";
  }
  if (const char* path = std::getenv("SECF_RECAPTURE_CSV")) {
    const TargetModel target = cjs_target(load_cjs_data(path));
    ChainConfig chain;
    chain.step = 0.72;
    chain.n = 2000;
    chain.preconditioner = pilot_covariance(target);
    ChainStats cjs_stats;
    mala_chain(target, chain, &cjs_stats);
    out.detail << ", recapture acceptance " << fmt(cjs_stats.acceptance_rate()) << " (informational)";
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"C1", "semi-exactness on low-order monomials", 10, c1_semi_exactness},
      {"C2", "exactness on the parametric family", 5, c2_constructed_exactness},
      {"C3", "estimator equivalences", 10, c3_equivalences},
      {"C4", "zero-mean Stein operator and kernel", 5, c4_zero_mean},
      {"C5", "weights minimise the kernel quadratic form", 10, c5_optimality},
      {"C6", "derivatives match finite differences", 30, c6_differentiation},
      {"C7", "Gaussian experiment efficiency", 300, c7_gaussian_efficiency},
      {"C8", "error diagnostic is conservative", 180, c8_diagnostic},
      {"C9", "median error does not grow with n", 300, c9_error_trend},
      {"C10", "chain and target sanity", 60, c10_chain_sanity},
  };
  std::vector<std::string> only(argv + 1, argv + argc);

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.time_limit_s) {
      out.pass = false;
      out.detail << " [fail: runtime above " << c.time_limit_s << " s]";
    }
    std::printf("%-4s %s  %-45s %7.2fs  %s\n", c.id.c_str(), out.pass ? "PASS" : "FAIL", c.title.c_str(), secs,
                out.detail.str().c_str());
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
