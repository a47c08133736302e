#include "secf/harness.hpp"

#include "secf/basis.hpp"
#include "secf/errors.hpp"
#include "secf/estimators.hpp"
#include "secf/targets.hpp"
#include "secf/tuning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace secf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr double kExactMse = 1e-20;

}  // namespace

LambdaMode parse_lambda(const std::string& text, KernelConfig& kernel) {
  if (text == "auto-cv") return LambdaMode::AutoCV;
  if (text == "auto-median") return LambdaMode::AutoMedian;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw InputError("lambda must be auto-cv, auto-median or a positive number, got '" + text + "'");
  }
  kernel.lambda = v;
  return LambdaMode::Fixed;
}

std::string to_string(LambdaMode mode) {
  switch (mode) {
    case LambdaMode::AutoCV:
      return "auto-cv";
    case LambdaMode::AutoMedian:
      return "auto-median";
    case LambdaMode::Fixed:
      break;
  }
  return "fixed";
}

bool uses_kernel(Method method) {
  return method == Method::CF || method == Method::SECF || method == Method::ASECF;
}

namespace {

EstimationRun run_unwrapped(const SampleSet& samples, const Vector& fvals, const EstimationConfig& cfg) {
  const auto start = Clock::now();
  if (fvals.size() != samples.size()) {
    throw InputError("integrand has " + std::to_string(fvals.size()) + " values for " +
                     std::to_string(samples.size()) + " samples");
  }
  if (cfg.order < 0) throw InputError("polynomial order must be non-negative");

  EstimationRun run;
  run.kernel = cfg.kernel;
  run.d = samples.dim();
  run.n = samples.size();
  run.order = cfg.method == Method::CF ? 0 : cfg.method == Method::MC ? 0 : cfg.order;

  if (cfg.method == Method::MC) {
    run.result = mc_estimate(fvals);
  } else if (cfg.method == Method::ZV) {
    const PolynomialBasis basis = enumerate_basis(static_cast<int>(samples.dim()), run.order);
    run.result = zv_estimate(vandermonde(basis, samples), fvals);
  } else {
    // Kernel methods: drop duplicated states, carrying f along.
    SampleSet work;
    work.points = samples.points;
    work.gradients = samples.gradients;
    work.integrands.push_back({"f", fvals});
    work.validate();
    work = dedupe(work);
    const Vector f = work.integrands.front().values;
    run.n = work.size();
    run.duplicates_removed = samples.size() - run.n;

    const PolynomialBasis basis = enumerate_basis(static_cast<int>(work.dim()), run.order);
    if (cfg.lambda_mode == LambdaMode::AutoMedian) {
      run.kernel.lambda = median_heuristic(work.points);
    } else if (cfg.lambda_mode == LambdaMode::AutoCV) {
      const auto grid = cfg.cv_grid.empty() ? default_lambda_grid() : cfg.cv_grid;
      run.kernel.lambda = cv_select_lambda(work, f, cfg.kernel, basis, grid, cfg.cv_folds, cfg.seed);
    }
    run.kernel.validate();

    if (cfg.method == Method::ASECF) {
      run.result = asecf_estimate(run.kernel, work, basis, f, cfg.nystrom);
    } else {
      const SteinKernelMatrix k0 = assemble_stein_matrix(run.kernel, work);
      run.result = cfg.method == Method::CF ? cf_estimate(k0, f)
                                            : secf_estimate(k0, vandermonde(basis, work), f);
    }
  }
  run.result.wall_time = seconds_since(start);
  return run;
}

}  // namespace

EstimationRun run_estimation(const SampleSet& samples, const Vector& fvals, const EstimationConfig& cfg) {
  const std::string who = to_string(cfg.method) + ": ";
  try {
    return run_unwrapped(samples, fvals, cfg);
  } catch (const UnisolvencyError& e) {
    throw UnisolvencyError(who + e.what());
  } catch (const ConditioningError& e) {
    throw ConditioningError(who + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(who + e.what());
  } catch (const InputError& e) {
    throw InputError(who + e.what());
  }
}

EstimationRun run_estimation(const SampleSet& samples, const std::string& integrand,
                             const EstimationConfig& cfg) {
  return run_estimation(samples, samples.integrand(integrand), cfg);
}

std::string MethodSpec::label() const {
  if (method == Method::MC || method == Method::CF) return to_string(method);
  return to_string(method) + ":" + std::to_string(order);
}

std::vector<MethodSpec> parse_method_list(const std::string& text) {
  std::vector<MethodSpec> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    MethodSpec spec;
    const auto colon = item.find(':');
    spec.method = parse_method(item.substr(0, colon));
    const bool takes_order = spec.method == Method::ZV || spec.method == Method::SECF ||
                             spec.method == Method::ASECF;
    spec.order = takes_order ? 1 : 0;
    if (colon != std::string::npos) {
      if (!takes_order) throw InputError("method '" + item.substr(0, colon) + "' takes no order");
      const std::string digits = item.substr(colon + 1);
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
        throw InputError("bad polynomial order in '" + item + "'");
      }
      spec.order = std::stoi(digits);
    }
    out.push_back(spec);
  }
  if (out.empty()) throw InputError("method list is empty");
  return out;
}

const MethodSummary& EfficiencyReport::method(const std::string& label) const {
  for (const auto& m : methods) {
    if (m.spec.label() == label) return m;
  }
  throw InputError("report has no method '" + label + "'");
}

std::uint64_t replicate_seed(std::uint64_t seed, Index replicate) {
  return seed ^ static_cast<std::uint64_t>(replicate);
}

SampleSet gaussian_sample(Index d, Index n, std::uint64_t seed) {
  const TargetModel target = gaussian_target(d);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SampleSet s;
  s.points.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) s.points(i, k) = normal(rng);
  }
  s.gradients = -s.points;
  for (const auto& [name, fn] : target.integrands) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = fn(s.points.row(i).transpose());
    s.add_integrand(name, std::move(v));
  }
  return s;
}

namespace {

// Per-method accumulation over paired replicates.
struct Accumulator {
  MethodSpec spec;
  std::vector<double> estimates, errors, bounds, lambdas, times;
};

std::vector<MethodSpec> with_mc_first(std::vector<MethodSpec> methods) {
  methods.erase(std::remove_if(methods.begin(), methods.end(),
                               [](const MethodSpec& s) { return s.method == Method::MC; }),
                methods.end());
  methods.insert(methods.begin(), MethodSpec{Method::MC, 0});
  return methods;
}

EstimationConfig estimation_for(const MethodSpec& spec, const BenchmarkConfig& cfg, std::uint64_t seed) {
  EstimationConfig ec;
  ec.method = spec.method;
  ec.order = spec.order;
  ec.kernel = cfg.kernel;
  ec.lambda_mode = cfg.lambda_mode;
  ec.nystrom = cfg.nystrom;
  ec.nystrom.seed = seed;
  ec.seed = seed;
  return ec;
}

void accumulate(Accumulator& acc, const EstimationRun& run, double truth, double sampling_time) {
  acc.estimates.push_back(run.result.estimate);
  acc.errors.push_back(run.result.estimate - truth);
  acc.bounds.push_back(run.result.diagnostics ? run.result.diagnostics->bound_product
                                              : std::numeric_limits<double>::quiet_NaN());
  acc.lambdas.push_back(uses_kernel(run.result.method) ? run.kernel.lambda
                                                        : std::numeric_limits<double>::quiet_NaN());
  acc.times.push_back(run.result.wall_time + sampling_time);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

void summarise(EfficiencyReport& report, const std::vector<Accumulator>& accs) {
  std::vector<double> mses;
  for (const auto& acc : accs) {
    double s = 0.0;
    for (double e : acc.errors) s += e * e;
    mses.push_back(s / static_cast<double>(acc.errors.size()));
  }
  const double mse_mc = mses.front();
  const double time_mc = mean(accs.front().times);
  for (std::size_t k = 0; k < accs.size(); ++k) {
    MethodSummary m;
    m.spec = accs[k].spec;
    m.mse = mses[k];
    m.mean_wall_time = mean(accs[k].times);
    if (k == 0) {
      m.statistical_efficiency = 1.0;
    } else if (m.mse <= kExactMse) {
      m.statistical_efficiency = std::numeric_limits<double>::infinity();
    } else {
      m.statistical_efficiency = mse_mc / m.mse;
    }
    m.computational_efficiency =
        m.mean_wall_time > 0.0 ? m.statistical_efficiency * time_mc / m.mean_wall_time : m.statistical_efficiency;
    if (k == 0) m.computational_efficiency = 1.0;
    m.estimates = accs[k].estimates;
    m.errors = accs[k].errors;
    m.bound_products = accs[k].bounds;
    m.lambdas = accs[k].lambdas;
    report.methods.push_back(std::move(m));
  }
}

}  // namespace

EfficiencyReport gaussian_benchmark(Index d, Index n, const BenchmarkConfig& cfg,
                                    const std::function<double(const Vector&)>& integrand, double truth) {
  if (d < 3) throw InputError("the Gaussian benchmark integrand needs d >= 3");
  if (n < 2) throw InputError("the Gaussian benchmark needs n >= 2");
  if (cfg.replicates < 1) throw InputError("need at least one replicate");
  const auto methods = with_mc_first(cfg.methods);

  EfficiencyReport report;
  report.experiment = "gaussian";
  report.integrand = integrand ? "custom" : "benchmark";
  report.truth = integrand ? truth : 1.0;
  report.n = n;
  report.d = d;
  report.replicates = cfg.replicates;
  report.seed = cfg.seed;

  std::vector<Accumulator> accs;
  for (const auto& m : methods) accs.push_back({m, {}, {}, {}, {}, {}});
  double sampling_total = 0.0;
  for (Index r = 0; r < cfg.replicates; ++r) {
    const std::uint64_t seed = replicate_seed(cfg.seed, r);
    const auto t0 = Clock::now();
    const SampleSet s = gaussian_sample(d, n, seed);
    Vector f;
    if (integrand) {
      f.resize(n);
      for (Index i = 0; i < n; ++i) f[i] = integrand(s.points.row(i).transpose());
    } else {
      f = s.integrand("benchmark");
    }
    const double sampling = seconds_since(t0);
    sampling_total += sampling;
    for (auto& acc : accs) {
      accumulate(acc, run_estimation(s, f, estimation_for(acc.spec, cfg, seed)), report.truth, sampling);
    }
  }
  report.mean_sampling_time = sampling_total / static_cast<double>(cfg.replicates);
  summarise(report, accs);
  return report;
}

std::vector<EfficiencyReport> chain_benchmark(const TargetModel& target, const ChainConfig& chain,
                                              const std::vector<std::pair<std::string, double>>& golds,
                                              const BenchmarkConfig& cfg) {
  if (golds.empty()) throw InputError("chain benchmark needs at least one integrand with a gold standard");
  if (cfg.replicates < 1) throw InputError("need at least one replicate");
  for (const auto& [name, gold] : golds) {
    const bool known = std::any_of(target.integrands.begin(), target.integrands.end(),
                                   [&](const auto& it) { return it.first == name; });
    if (!known) throw InputError("target '" + target.name + "' has no integrand '" + name + "'");
    if (!std::isfinite(gold)) throw InputError("gold standard for '" + name + "' is not finite");
  }
  const auto methods = with_mc_first(cfg.methods);

  std::vector<std::vector<Accumulator>> accs(golds.size());
  for (auto& per : accs) {
    for (const auto& m : methods) per.push_back({m, {}, {}, {}, {}, {}});
  }
  double sampling_total = 0.0;
  Index n_used = chain.n;
  for (Index r = 0; r < cfg.replicates; ++r) {
    ChainConfig cc = chain;
    cc.seed = replicate_seed(chain.seed ^ cfg.seed, r);
    const auto t0 = Clock::now();
    const SampleSet s = run_chain(target, cc);
    const double sampling = seconds_since(t0);
    sampling_total += sampling;
    n_used = s.size();
    for (std::size_t g = 0; g < golds.size(); ++g) {
      const Vector& f = s.integrand(golds[g].first);
      for (auto& acc : accs[g]) {
        accumulate(acc, run_estimation(s, f, estimation_for(acc.spec, cfg, cc.seed)), golds[g].second,
                   sampling);
      }
    }
  }

  std::vector<EfficiencyReport> out;
  for (std::size_t g = 0; g < golds.size(); ++g) {
    EfficiencyReport report;
    report.experiment = target.name + "-" + to_string(chain.sampler);
    report.integrand = golds[g].first;
    report.truth = golds[g].second;
    report.n = n_used;
    report.d = target.dim;
    report.replicates = cfg.replicates;
    report.seed = cfg.seed;
    report.mean_sampling_time = sampling_total / static_cast<double>(cfg.replicates);
    summarise(report, accs[g]);
    out.push_back(std::move(report));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json doubles_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) {
    if (std::isfinite(x)) {
      a.push_back(x);
    } else {
      a.push_back(nullptr);
    }
  }
  return a;
}

Json efficiency_json(double e) {
  if (std::isinf(e)) return "exact";
  return e;
}

}  // namespace

Json diagnostic_to_json(const DiagnosticReport& report) {
  Json j = Json::object();
  j["ksd"] = report.ksd;
  j["seminorm_proxy"] = report.seminorm_proxy;
  j["bound_product"] = report.bound_product;
  return j;
}

Json result_to_json(const EstimationRun& run, const ResultJsonOptions& opts) {
  const EstimatorResult& r = run.result;
  Json j = Json::object();
  j["method"] = to_string(r.method);
  j["estimate"] = r.estimate;
  j["n"] = run.n;
  j["d"] = run.d;
  if (uses_kernel(r.method)) {
    Json k = Json::object();
    k["family"] = to_string(run.kernel.family);
    k["lambda"] = run.kernel.lambda;
    k["nu"] = run.kernel.nu;
    k["lambda_mode"] = to_string(opts.lambda_mode);
    j["kernel"] = k;
  }
  if (r.method != Method::MC) j["basis_order"] = run.order;
  if (opts.emit_weights && r.weights) j["weights"] = vector_json(*r.weights);
  if (r.diagnostics) j["diagnostics"] = diagnostic_to_json(*r.diagnostics);
  if (r.nystrom) {
    Json ny = Json::object();
    ny["n0"] = r.nystrom->n0;
    ny["iterations"] = r.nystrom->iterations;
    ny["residual"] = r.nystrom->residual;
    ny["converged"] = r.nystrom->converged;
    ny["solver"] = r.nystrom->direct ? "direct" : "cg";
    j["nystrom"] = ny;
  }
  if (run.duplicates_removed > 0) j["duplicates_removed"] = run.duplicates_removed;
  j["wall_time_s"] = r.wall_time;
  j["seed"] = opts.seed;
  j["timing"] = "estimation-only";
  return j;
}

Json report_to_json(const EfficiencyReport& report) {
  Json j = Json::object();
  j["experiment"] = report.experiment;
  j["integrand"] = report.integrand;
  j["truth"] = report.truth;
  j["n"] = report.n;
  j["d"] = report.d;
  j["replicates"] = report.replicates;
  j["seed"] = report.seed;
  j["timing"] = "includes-sampling";
  j["mean_sampling_time_s"] = report.mean_sampling_time;
  Json methods = Json::array();
  for (const auto& m : report.methods) {
    Json e = Json::object();
    e["method"] = m.spec.label();
    e["mse"] = m.mse;
    e["statistical_efficiency"] = efficiency_json(m.statistical_efficiency);
    e["computational_efficiency"] = efficiency_json(m.computational_efficiency);
    e["mean_wall_time_s"] = m.mean_wall_time;
    e["estimates"] = doubles_json(m.estimates);
    if (std::any_of(m.bound_products.begin(), m.bound_products.end(), [](double b) { return std::isfinite(b); })) {
      e["bound_products"] = doubles_json(m.bound_products);
    }
    if (uses_kernel(m.spec.method)) e["lambdas"] = doubles_json(m.lambdas);
    methods.push_back(e);
  }
  j["methods"] = methods;
  return j;
}

}  // namespace secf
