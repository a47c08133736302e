#pragma once

// Row kernels for Stein kernel assembly.
//
// A row evaluates k0(x, y_j) for one fixed (x, ux) against a block of columns
// y_j, j < count. Column data is coordinate-major: coordinate k of column j
// lives at ys[k * stride + j], which is exactly an Eigen column-major n x d
// matrix with stride = n. This keeps the inner loop over j contiguous.
//
// stein_row_scalar is the reference. stein_row_avx2 processes four columns
// per step and must agree with the reference bit for bit (no FMA contraction;
// same operation order), which the equivalence tests assert.

#include "secf/kernel.hpp"

#include <cstddef>
#include <string>

namespace secf::simd {

struct SteinRowArgs {
  const double* x = nullptr;    // dim
  const double* ux = nullptr;   // dim
  const double* ys = nullptr;   // coordinate-major block
  const double* uys = nullptr;  // coordinate-major block
  std::size_t stride = 0;
  std::size_t count = 0;
  std::size_t dim = 0;
};

enum class Level { Scalar, AVX2 };

std::string to_string(Level level);

void stein_row_scalar(const KernelConfig& cfg, const SteinRowArgs& args, double* out);

#if defined(SECF_HAVE_AVX2_TU)
void stein_row_avx2(const KernelConfig& cfg, const SteinRowArgs& args, double* out);
#endif

/// Best level supported by this build and CPU.
Level detected_level();

/// Level used by stein_row(). Defaults to detected_level(), unless the
/// SECF_SIMD environment variable is "scalar".
Level active_level();

/// Pin the level (tests, benchmarking). Requesting an unsupported level
/// throws InputError.
void set_active_level(Level level);

/// Dispatching entry point.
void stein_row(const KernelConfig& cfg, const SteinRowArgs& args, double* out);

}  // namespace secf::simd
