#pragma once

#include "secf/io.hpp"
#include "secf/kernel.hpp"
#include "secf/nystrom.hpp"
#include "secf/result.hpp"
#include "secf/samplers.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace secf {

enum class LambdaMode { Fixed, AutoCV, AutoMedian };

/// "auto-cv", "auto-median" or a positive number (written into `kernel`).
LambdaMode parse_lambda(const std::string& text, KernelConfig& kernel);
std::string to_string(LambdaMode mode);

struct EstimationConfig {
  Method method = Method::SECF;
  KernelConfig kernel;
  LambdaMode lambda_mode = LambdaMode::Fixed;
  /// Empty means the default grid.
  std::vector<double> cv_grid;
  int cv_folds = 5;
  /// Polynomial order r for ZV, SECF and ASECF. CF always uses r = 0.
  int order = 1;
  NystromConfig nystrom;
  std::uint64_t seed = 0;
};

struct EstimationRun {
  EstimatorResult result;
  /// Kernel actually used, lambda resolved.
  KernelConfig kernel;
  int order = 0;
  /// Points used after duplicate removal.
  Index n = 0;
  Index d = 0;
  Index duplicates_removed = 0;
};

bool uses_kernel(Method method);

/// Dispatches one estimator. Kernel methods drop duplicate states first and
/// tune lambda when asked; result.wall_time covers all of it. Errors are
/// rethrown with the method name prefixed, keeping their type.
EstimationRun run_estimation(const SampleSet& samples, const Vector& fvals, const EstimationConfig& cfg);
EstimationRun run_estimation(const SampleSet& samples, const std::string& integrand,
                             const EstimationConfig& cfg);

/// A method with its polynomial order, written "secf:2" ("cf" and "mc" take none).
struct MethodSpec {
  Method method = Method::MC;
  int order = 0;

  std::string label() const;
};

/// Comma-separated list. Orders default to 1 for zv, secf and asecf.
std::vector<MethodSpec> parse_method_list(const std::string& text);

struct BenchmarkConfig {
  std::vector<MethodSpec> methods;
  KernelConfig kernel;
  LambdaMode lambda_mode = LambdaMode::AutoCV;
  NystromConfig nystrom;
  Index replicates = 20;
  std::uint64_t seed = 0;
};

struct MethodSummary {
  MethodSpec spec;
  double mse = 0.0;
  /// MSE(MC) / MSE; +inf when MSE <= 1e-20 (reported as "exact").
  double statistical_efficiency = 0.0;
  /// statistical_efficiency * T_MC / T_method, times including sampling
  /// whenever the benchmark drew the samples itself.
  double computational_efficiency = 0.0;
  double mean_wall_time = 0.0;
  std::vector<double> estimates;
  std::vector<double> errors;
  /// NaN where the method provides no diagnostic.
  std::vector<double> bound_products;
  std::vector<double> lambdas;
};

struct EfficiencyReport {
  std::string experiment;
  std::string integrand;
  double truth = 0.0;
  Index n = 0;
  Index d = 0;
  Index replicates = 0;
  std::uint64_t seed = 0;
  double mean_sampling_time = 0.0;
  std::vector<MethodSummary> methods;

  const MethodSummary& method(const std::string& label) const;
};

/// Per-replicate seed.
std::uint64_t replicate_seed(std::uint64_t seed, Index replicate);

/// i.i.d. standard normal sample in R^d with score -x and the target's
/// integrand columns.
SampleSet gaussian_sample(Index d, Index n, std::uint64_t seed);

/// R paired replicates of n i.i.d. N(0, I_d) points. Every method sees the
/// same sample sets. `integrand` defaults to the benchmark function with
/// integral 1; a replacement must come with its true integral.
EfficiencyReport gaussian_benchmark(Index d, Index n, const BenchmarkConfig& cfg,
                                    const std::function<double(const Vector&)>& integrand = {},
                                    double truth = 1.0);

/// R chains (seeds derived per replicate) on `target`; one report per
/// (integrand, gold standard) pair, all sharing the same chains.
std::vector<EfficiencyReport> chain_benchmark(const TargetModel& target, const ChainConfig& chain,
                                              const std::vector<std::pair<std::string, double>>& golds,
                                              const BenchmarkConfig& cfg);

struct ResultJsonOptions {
  bool emit_weights = false;
  std::uint64_t seed = 0;
  LambdaMode lambda_mode = LambdaMode::Fixed;
};

Json result_to_json(const EstimationRun& run, const ResultJsonOptions& opts);
Json report_to_json(const EfficiencyReport& report);
Json diagnostic_to_json(const DiagnosticReport& report);

}  // namespace secf
