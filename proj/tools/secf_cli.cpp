// Command-line front end: estimate, sample, benchmark and diagnose.
//
// Exit codes: 0 success, 2 input or validation error, 3 numerical failure.

#include "secf/diagnostics.hpp"
#include "secf/errors.hpp"
#include "secf/harness.hpp"
#include "secf/io.hpp"
#include "secf/targets.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace secf;

struct KernelOpts {
  std::string family = "rq";
  std::string lambda = "auto-cv";
  double nu = 4.5;
};

void add_kernel_options(CLI::App* cmd, KernelOpts& k) {
  cmd->add_option("--kernel", k.family, "Base kernel: rq|gaussian|matern")->capture_default_str();
  cmd->add_option("--lambda", k.lambda, "Lengthscale: auto-cv|auto-median|FLOAT")->capture_default_str();
  cmd->add_option("--nu", k.nu, "Matern smoothness")->capture_default_str();
}

KernelConfig resolve_kernel(const KernelOpts& k, LambdaMode& mode) {
  KernelConfig cfg;
  cfg.family = parse_kernel_family(k.family);
  cfg.nu = k.nu;
  mode = parse_lambda(k.lambda, cfg);
  return cfg;
}

std::optional<Index> parse_n0(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t used = 0;
  long long v = -1;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || v <= 0) throw InputError("--n0 must be auto or a positive integer");
  return static_cast<Index>(v);
}

NystromSolver parse_solver(const std::string& text) {
  if (text == "cg") return NystromSolver::ConjugateGradient;
  if (text == "direct") return NystromSolver::Direct;
  throw InputError("--nystrom-solver must be cg or direct");
}

void emit(const std::string& path, const Json& j) {
  if (path.empty() || path == "-") {
    std::cout << dump_json(j) << '\n';
  } else {
    write_json(path, j);
  }
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw InputError(std::string(what) + ": cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError(std::string(what) + " is empty");
  return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// --- sampling options shared by `sample` and `benchmark chain` -------------

struct ChainOpts {
  std::string target = "gaussian";
  std::string data;
  Index dim = 2;
  Index pred_row = 0;
  std::string sampler = "mala";
  Index n = 1000;
  Index burn_in = 0;
  std::optional<double> step;
  std::string sigma = "identity";
  std::uint64_t seed = 0;
};

void add_chain_options(CLI::App* cmd, ChainOpts& c) {
  cmd->add_option("--target", c.target, "gaussian|cjs|logistic")->capture_default_str();
  cmd->add_option("--data", c.data, "Data CSV for cjs or logistic");
  cmd->add_option("--dim,--d", c.dim, "Dimension of the gaussian target")->capture_default_str();
  cmd->add_option("--pred-row", c.pred_row, "Design row (0-based) for the logistic predictive integrand")
      ->capture_default_str();
  cmd->add_option("--sampler", c.sampler, "mala|ula")->capture_default_str();
  cmd->add_option("--n", c.n, "Retained states")->capture_default_str();
  cmd->add_option("--burn-in", c.burn_in, "Discarded initial states")->capture_default_str();
  cmd->add_option("--step", c.step, "Step size h (default depends on target and sampler)");
  cmd->add_option("--sigma", c.sigma, "Preconditioner: identity or a d x d CSV file")->capture_default_str();
}

TargetModel build_target(const ChainOpts& c) {
  if (c.target == "gaussian") return gaussian_target(c.dim);
  if (c.target != "cjs" && c.target != "logistic") {
    throw InputError("--target must be gaussian, cjs or logistic");
  }
  if (c.data.empty()) throw InputError("--target " + c.target + " needs --data FILE");
  if (c.target == "cjs") return cjs_target(load_cjs_data(c.data));
  const LogisticTable table = load_logistic_table(c.data);
  return logistic_target(make_logistic_data(table.covariates, table.response), c.pred_row);
}

double default_step(const std::string& target, SamplerKind sampler) {
  const bool mala = sampler == SamplerKind::MALA;
  if (target == "cjs") return mala ? 0.72 : 1.1;
  if (target == "logistic") return mala ? 0.3 : 0.9;
  return mala ? 1.0 : 0.5;
}

ChainConfig build_chain(const ChainOpts& c, const TargetModel& target) {
  ChainConfig cfg;
  cfg.sampler = parse_sampler(c.sampler);
  cfg.step = c.step.value_or(default_step(c.target, cfg.sampler));
  cfg.n = c.n;
  cfg.burn_in = c.burn_in;
  cfg.seed = c.seed;
  if (c.sigma != "identity") {
    cfg.preconditioner = load_matrix_csv(c.sigma);
    if (cfg.preconditioner.rows() != target.dim || cfg.preconditioner.cols() != target.dim) {
      throw InputError("--sigma must be a " + std::to_string(target.dim) + " x " + std::to_string(target.dim) +
                       " matrix");
    }
  }
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"Semi-exact control functional estimators for MCMC output"};
  app.require_subcommand(1);

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate an integral from a sample CSV");
  std::string samples_path, integrand, method = "secf", n0_text = "auto", solver = "cg", out;
  KernelOpts kopts;
  int order = 1;
  double cg_tol = 1e-5;
  std::optional<int> cg_max;
  std::uint64_t seed = 0;
  bool emit_weights = false;
  est->add_option("--samples", samples_path, "Sample CSV (x1..xd, g1..gd, f_<name>...)")->required();
  est->add_option("--integrand", integrand, "Integrand name (column f_<name>)")->required();
  est->add_option("--method", method, "mc|zv|cf|secf|asecf")->capture_default_str();
  add_kernel_options(est, kopts);
  est->add_option("--order", order, "Polynomial order r")->capture_default_str();
  est->add_option("--n0", n0_text, "Nystrom subset size: auto|INT")->capture_default_str();
  est->add_option("--cg-tol", cg_tol, "Relative residual tolerance for CG")->capture_default_str();
  est->add_option("--cg-max-iters", cg_max, "CG iteration cap (default 10 (n0 + m))");
  est->add_option("--nystrom-solver", solver, "cg|direct")->capture_default_str();
  est->add_option("--seed", seed, "Seed for folds and subsets")->capture_default_str();
  est->add_flag("--emit-weights", emit_weights, "Include cubature weights in the output");
  est->add_option("--out", out, "Output JSON (default stdout)");

  // sample
  auto* smp = app.add_subcommand("sample", "Run a Langevin chain and write a sample CSV");
  ChainOpts copts;
  add_chain_options(smp, copts);
  smp->add_option("--seed", copts.seed, "Chain seed")->capture_default_str();
  std::string sample_out;
  smp->add_option("--out", sample_out, "Output CSV (default stdout)");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Efficiency benchmarks against Monte Carlo");
  bench->require_subcommand(1);
  std::string methods_text = "mc,zv:2,cf,secf:2,asecf:2", bench_out;
  KernelOpts bk;
  Index replicates = 20;
  std::uint64_t bench_seed = 0;

  auto* bg = bench->add_subcommand("gaussian", "i.i.d. standard normal benchmark");
  Index bd = 4, bn = 1000;
  bg->add_option("--dim,--d", bd, "Dimension (>= 3)")->capture_default_str();
  bg->add_option("--n", bn, "Points per replicate")->capture_default_str();

  auto* bc = bench->add_subcommand("chain", "Markov chain benchmark against a gold standard");
  ChainOpts bcopts;
  std::string gold_text, integrands_text;
  add_chain_options(bc, bcopts);
  bc->add_option("--gold", gold_text, "Gold standard value(s), comma separated")->required();
  bc->add_option("--integrands", integrands_text,
                 "Integrand names matching --gold (default: the target's integrands in order)");

  for (auto* cmd : {bg, bc}) {
    cmd->add_option("--replicates", replicates, "Paired replicates R")->capture_default_str();
    cmd->add_option("--methods", methods_text, "Methods, e.g. mc,zv:2,secf:2")->capture_default_str();
    cmd->add_option("--seed", bench_seed, "Base seed")->capture_default_str();
    add_kernel_options(cmd, bk);
    cmd->add_option("--out", bench_out, "Output JSON (default stdout)");
  }

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "Kernel Stein discrepancy and error diagnostic");
  std::string dsamples, dintegrand, dout;
  KernelOpts dk;
  int dorder = 1;
  std::uint64_t dseed = 0;
  diag->add_option("--samples", dsamples, "Sample CSV")->required();
  diag->add_option("--integrand", dintegrand, "Integrand name")->required();
  add_kernel_options(diag, dk);
  diag->add_option("--order", dorder, "Polynomial order r")->capture_default_str();
  diag->add_option("--seed", dseed, "Seed for cross-validation folds")->capture_default_str();
  diag->add_option("--out", dout, "Output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*est) {
    EstimationConfig cfg;
    cfg.method = parse_method(method);
    cfg.kernel = resolve_kernel(kopts, cfg.lambda_mode);
    cfg.order = order;
    cfg.seed = seed;
    cfg.nystrom.n0 = parse_n0(n0_text);
    cfg.nystrom.cg_tolerance = cg_tol;
    cfg.nystrom.cg_max_iters = cg_max;
    cfg.nystrom.seed = seed;
    cfg.nystrom.solver = parse_solver(solver);
    const SampleSet samples = load_samples(samples_path);
    const EstimationRun r = run_estimation(samples, integrand, cfg);
    emit(out, result_to_json(r, {emit_weights, seed, cfg.lambda_mode}));
    return 0;
  }

  if (*smp) {
    const TargetModel target = build_target(copts);
    const ChainConfig cfg = build_chain(copts, target);
    ChainStats stats;
    const SampleSet s = run_chain(target, cfg, &stats);
    if (sample_out.empty() || sample_out == "-") {
      write_samples(std::cout, s);
    } else {
      write_samples(sample_out, s);
    }
    if (cfg.sampler == SamplerKind::MALA) {
      std::fprintf(stderr, "acceptance rate %.4f over %lld proposals\n", stats.acceptance_rate(),
                   static_cast<long long>(stats.proposals));
    }
    return 0;
  }

  if (*bench) {
    BenchmarkConfig cfg;
    cfg.methods = parse_method_list(methods_text);
    cfg.kernel = resolve_kernel(bk, cfg.lambda_mode);
    cfg.replicates = replicates;
    cfg.seed = bench_seed;
    if (*bg) {
      emit(bench_out, report_to_json(gaussian_benchmark(bd, bn, cfg)));
      return 0;
    }
    bcopts.seed = 0;
    const TargetModel target = build_target(bcopts);
    const ChainConfig chain = build_chain(bcopts, target);
    const std::vector<double> golds = parse_double_list(gold_text, "--gold");
    std::vector<std::string> names = parse_name_list(integrands_text);
    if (names.empty()) {
      for (const auto& it : target.integrands) names.push_back(it.first);
      names.resize(std::min(names.size(), golds.size()));
    }
    if (names.size() != golds.size()) {
      throw InputError("--gold has " + std::to_string(golds.size()) + " values for " +
                       std::to_string(names.size()) + " integrands");
    }
    std::vector<std::pair<std::string, double>> pairs;
    for (std::size_t i = 0; i < names.size(); ++i) pairs.emplace_back(names[i], golds[i]);
    Json reports = Json::array();
    for (const auto& rep : chain_benchmark(target, chain, pairs, cfg)) reports.push_back(report_to_json(rep));
    emit(bench_out, reports);
    return 0;
  }

  if (*diag) {
    EstimationConfig cfg;
    cfg.method = Method::SECF;
    cfg.kernel = resolve_kernel(dk, cfg.lambda_mode);
    cfg.order = dorder;
    cfg.seed = dseed;
    const SampleSet samples = load_samples(dsamples);
    const EstimationRun r = run_estimation(samples, dintegrand, cfg);
    Json j = Json::object();
    j["n"] = r.n;
    j["d"] = r.d;
    j["kernel"] = {{"family", to_string(r.kernel.family)}, {"lambda", r.kernel.lambda}, {"nu", r.kernel.nu}};
    j["basis_order"] = r.order;
    j["estimate"] = r.result.estimate;
    j["diagnostics"] = diagnostic_to_json(*r.result.diagnostics);
    emit(dout, j);
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const secf::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const secf::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
