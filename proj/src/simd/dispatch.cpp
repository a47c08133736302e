#include "secf/errors.hpp"
#include "secf/simd/stein_row.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace secf::simd {

namespace {

Level initial_level() {
  if (const char* env = std::getenv("SECF_SIMD")) {
    if (std::string_view(env) == "scalar") return Level::Scalar;
  }
  return detected_level();
}

std::atomic<Level>& level_slot() {
  static std::atomic<Level> slot{initial_level()};
  return slot;
}

}  // namespace

std::string to_string(Level level) {
  switch (level) {
    case Level::Scalar:
      return "scalar";
    case Level::AVX2:
      return "avx2";
  }
  return "unknown";
}

Level detected_level() {
#if defined(SECF_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  if (__builtin_cpu_supports("avx2")) return Level::AVX2;
#endif
  return Level::Scalar;
}

Level active_level() { return level_slot().load(std::memory_order_relaxed); }

void set_active_level(Level level) {
  if (level == Level::AVX2 && detected_level() != Level::AVX2) {
    throw InputError("AVX2 row kernel is not available on this build/CPU");
  }
  level_slot().store(level, std::memory_order_relaxed);
}

void stein_row(const KernelConfig& cfg, const SteinRowArgs& args, double* out) {
#if defined(SECF_HAVE_AVX2_TU)
  if (active_level() == Level::AVX2) {
    stein_row_avx2(cfg, args, out);
    return;
  }
#endif
  stein_row_scalar(cfg, args, out);
}

}  // namespace secf::simd
