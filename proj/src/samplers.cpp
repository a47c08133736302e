#include "secf/samplers.hpp"

#include "secf/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <unordered_set>

namespace secf {

SamplerKind parse_sampler(const std::string& name) {
  if (name == "mala") return SamplerKind::MALA;
  if (name == "ula") return SamplerKind::ULA;
  throw InputError("unknown sampler '" + name + "' (expected mala|ula)");
}

std::string to_string(SamplerKind kind) { return kind == SamplerKind::MALA ? "mala" : "ula"; }

namespace {

struct ChainSetup {
  Matrix sigma;
  Matrix chol;  // lower factor of sigma
  Vector start;
};

ChainSetup prepare(const TargetModel& target, const ChainConfig& cfg) {
  const Index d = target.dim;
  if (d <= 0) throw InputError("target has no dimension");
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) throw InputError("step size h must be positive");
  if (cfg.n <= 0) throw InputError("chain length n must be positive");
  if (cfg.burn_in < 0) throw InputError("burn-in must be non-negative");

  ChainSetup s;
  s.sigma = cfg.preconditioner.size() == 0 ? Matrix::Identity(d, d) : cfg.preconditioner;
  if (s.sigma.rows() != d || s.sigma.cols() != d) {
    throw InputError("preconditioner must be " + std::to_string(d) + " x " + std::to_string(d));
  }
  Eigen::LLT<Matrix> llt(s.sigma);
  if (llt.info() != Eigen::Success) throw InputError("preconditioner is not positive definite");
  s.chol = llt.matrixL();
  s.start = cfg.initial.size() == 0 ? Vector::Zero(d) : cfg.initial;
  if (s.start.size() != d) throw InputError("initial point has the wrong dimension");
  return s;
}

SampleSet allocate(const TargetModel& target, Index n) {
  SampleSet out;
  out.points.resize(n, target.dim);
  out.gradients.resize(n, target.dim);
  for (const auto& [name, fn] : target.integrands) out.integrands.push_back({name, Vector(n)});
  return out;
}

void record(const TargetModel& target, SampleSet& out, Index row, const Vector& x, const Vector& g) {
  out.points.row(row) = x.transpose();
  out.gradients.row(row) = g.transpose();
  for (std::size_t c = 0; c < target.integrands.size(); ++c) {
    out.integrands[c].values[row] = target.integrands[c].second(x);
  }
}

Vector standard_normal(std::mt19937_64& rng, std::normal_distribution<double>& normal, Index d) {
  Vector z(d);
  for (Index k = 0; k < d; ++k) z[k] = normal(rng);
  return z;
}

}  // namespace

SampleSet mala_chain(const TargetModel& target, const ChainConfig& cfg, ChainStats* stats) {
  const ChainSetup s = prepare(target, cfg);
  const Index d = target.dim;
  const double h = cfg.step;
  const double h2 = h * h;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Vector x = s.start;
  double logp = target.log_density(x);
  if (!std::isfinite(logp)) throw InputError("log density is not finite at the initial point");
  Vector g = target.gradient(x);
  Vector drift = x + 0.5 * h2 * (s.sigma * g);

  // log q(to | from) up to a constant, with `mean` the drifted `from`.
  const auto log_q = [&](const Vector& to, const Vector& mean) {
    const Vector white = s.chol.triangularView<Eigen::Lower>().solve(to - mean);
    return -white.squaredNorm() / (2.0 * h2);
  };

  SampleSet out = allocate(target, cfg.n);
  ChainStats local;
  const Index total = cfg.burn_in + cfg.n;
  for (Index it = 0; it < total; ++it) {
    const Vector y = drift + h * (s.chol * standard_normal(rng, normal, d));
    const double logp_y = target.log_density(y);
    const double u = uniform(rng);
    ++local.proposals;
    if (std::isfinite(logp_y)) {
      const Vector g_y = target.gradient(y);
      const Vector drift_y = y + 0.5 * h2 * (s.sigma * g_y);
      const double log_alpha = logp_y - logp + log_q(x, drift_y) - log_q(y, drift);
      if (g_y.allFinite() && std::log(u) < log_alpha) {
        x = y;
        logp = logp_y;
        g = g_y;
        drift = drift_y;
        ++local.accepted;
      }
    }
    if (it >= cfg.burn_in) record(target, out, it - cfg.burn_in, x, g);
  }
  if (stats) *stats = local;
  return out;
}

SampleSet ula_chain(const TargetModel& target, const ChainConfig& cfg) {
  const ChainSetup s = prepare(target, cfg);
  const Index d = target.dim;
  const double h = cfg.step;
  const double h2 = h * h;
  constexpr double kDivergence = 1e8;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Vector x = s.start;
  Vector g = target.gradient(x);
  if (!g.allFinite()) throw InputError("gradient is not finite at the initial point");

  SampleSet out = allocate(target, cfg.n);
  const Index total = cfg.burn_in + cfg.n;
  for (Index it = 0; it < total; ++it) {
    x += 0.5 * h2 * (s.sigma * g);
    if (cfg.inject_noise) x += h * (s.chol * standard_normal(rng, normal, d));
    if (!x.allFinite() || x.norm() > kDivergence) {
      throw NumericalError("unadjusted Langevin chain diverged at iteration " + std::to_string(it + 1) +
                           "; reduce the step size");
    }
    g = target.gradient(x);
    if (!g.allFinite()) {
      throw NumericalError("gradient became non-finite at iteration " + std::to_string(it + 1));
    }
    if (it >= cfg.burn_in) record(target, out, it - cfg.burn_in, x, g);
  }
  return out;
}

SampleSet run_chain(const TargetModel& target, const ChainConfig& cfg, ChainStats* stats) {
  if (cfg.sampler == SamplerKind::MALA) return mala_chain(target, cfg, stats);
  if (stats) *stats = ChainStats{};
  return ula_chain(target, cfg);
}

SampleSet dedupe(const SampleSet& samples) {
  const Index n = samples.size();
  const Index d = samples.dim();
  std::unordered_set<std::string> seen;
  std::vector<Index> keep;
  std::string key(static_cast<std::size_t>(d) * sizeof(double), '\0');
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) {
      const double v = samples.points(i, k);
      std::memcpy(key.data() + k * sizeof(double), &v, sizeof(double));
    }
    if (seen.insert(key).second) keep.push_back(i);
  }
  if (static_cast<Index>(keep.size()) == n) return samples;
  return samples.select(keep);
}

}  // namespace secf
