#pragma once

#include "secf/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace secf {

/// Unnormalised log density with its gradient, plus the integrands a chain
/// should record at every retained state.
struct TargetModel {
  using ScalarFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  std::string name;
  Index dim = 0;
  ScalarFn log_density;
  GradientFn gradient;
  std::vector<std::pair<std::string, ScalarFn>> integrands;
};

enum class SamplerKind { MALA, ULA };

SamplerKind parse_sampler(const std::string& name);
std::string to_string(SamplerKind kind);

struct ChainConfig {
  SamplerKind sampler = SamplerKind::MALA;
  double step = 0.5;
  /// Proposal preconditioner Sigma; empty means identity.
  Matrix preconditioner;
  Index n = 1000;
  Index burn_in = 0;
  std::uint64_t seed = 0;
  /// Starting state; empty means the origin.
  Vector initial;
  /// ULA only: when false the noise term is dropped (deterministic drift).
  bool inject_noise = true;
};

struct ChainStats {
  Index proposals = 0;
  Index accepted = 0;
  double acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
};

/// Metropolis-adjusted Langevin chain with proposal
/// N(x + (h^2 / 2) Sigma grad log p(x), h^2 Sigma). Burn-in states are
/// discarded; n states are retained with their gradients and integrands.
SampleSet mala_chain(const TargetModel& target, const ChainConfig& cfg, ChainStats* stats = nullptr);

/// Unadjusted Langevin chain, x <- x + (h^2 / 2) Sigma grad log p(x) + eps with
/// eps ~ N(0, h^2 Sigma). Throws NumericalError if ||x|| exceeds 1e8.
SampleSet ula_chain(const TargetModel& target, const ChainConfig& cfg);

/// Dispatches on cfg.sampler.
SampleSet run_chain(const TargetModel& target, const ChainConfig& cfg, ChainStats* stats = nullptr);

/// Keeps the first occurrence of each bitwise-identical point row.
SampleSet dedupe(const SampleSet& samples);

}  // namespace secf
