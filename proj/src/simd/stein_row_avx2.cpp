#include "secf/simd/stein_row.hpp"

#include "radial.hpp"

#include <immintrin.h>

namespace secf::simd {

namespace {

struct Geometry4 {
  __m256d z, dur, uxr, uyr, uxuy;
};

inline Geometry4 geometry4(const SteinRowArgs& args, std::size_t j) {
  Geometry4 g{_mm256_setzero_pd(), _mm256_setzero_pd(), _mm256_setzero_pd(),
              _mm256_setzero_pd(), _mm256_setzero_pd()};
  for (std::size_t k = 0; k < args.dim; ++k) {
    const __m256d xk = _mm256_set1_pd(args.x[k]);
    const __m256d uxk = _mm256_set1_pd(args.ux[k]);
    const __m256d yk = _mm256_loadu_pd(args.ys + k * args.stride + j);
    const __m256d uyk = _mm256_loadu_pd(args.uys + k * args.stride + j);
    const __m256d r = _mm256_sub_pd(xk, yk);
    g.z = _mm256_add_pd(g.z, _mm256_mul_pd(r, r));
    g.dur = _mm256_add_pd(g.dur, _mm256_mul_pd(_mm256_sub_pd(uxk, uyk), r));
    g.uxr = _mm256_add_pd(g.uxr, _mm256_mul_pd(uxk, r));
    g.uyr = _mm256_add_pd(g.uyr, _mm256_mul_pd(uyk, r));
    g.uxuy = _mm256_add_pd(g.uxuy, _mm256_mul_pd(uxk, uyk));
  }
  return g;
}

// Vector transcription of radial_terms (RQ branch) + radial_combine; the
// operation order matches radial.hpp exactly.
inline __m256d rq_combine4(const detail::RadialConstants& c, const Geometry4& g) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(one, _mm256_add_pd(one, _mm256_mul_pd(g.z, _mm256_set1_pd(c.a))));
  const __m256d s2 = _mm256_mul_pd(s, s);
  const __m256d s3 = _mm256_mul_pd(s2, s);
  const __m256d s4 = _mm256_mul_pd(s3, s);
  const __m256d s5 = _mm256_mul_pd(s4, s);
  const __m256d p1 = _mm256_mul_pd(_mm256_set1_pd(c.rq_c1), s2);
  const __m256d p2 = _mm256_mul_pd(_mm256_set1_pd(c.rq_c2), s3);
  const __m256d zp3 = _mm256_mul_pd(g.z, _mm256_mul_pd(_mm256_set1_pd(c.rq_c3), s4));
  const __m256d z2p4 =
      _mm256_mul_pd(_mm256_mul_pd(g.z, g.z), _mm256_mul_pd(_mm256_set1_pd(c.rq_c4), s5));

  const __m256d t1 = _mm256_mul_pd(_mm256_set1_pd(16.0), z2p4);
  const __m256d t2 = _mm256_mul_pd(_mm256_set1_pd(c.k16dp2), zp3);
  const __m256d t3 = _mm256_mul_pd(_mm256_set1_pd(c.k4dp2d), p2);
  const __m256d m = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), zp3),
                                  _mm256_mul_pd(_mm256_set1_pd(c.dp2), p2));
  const __m256d t4 = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(4.0), m), g.dur);
  const __m256d t5 =
      _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(4.0), p2), g.uxr), g.uyr);
  const __m256d t6 = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), p1), g.uxuy);

  __m256d acc = _mm256_add_pd(t1, t2);
  acc = _mm256_add_pd(acc, t3);
  acc = _mm256_add_pd(acc, t4);
  acc = _mm256_sub_pd(acc, t5);
  return _mm256_sub_pd(acc, t6);
}

}  // namespace

void stein_row_avx2(const KernelConfig& cfg, const SteinRowArgs& args, double* out) {
  const auto c = detail::make_constants(cfg, args.dim);
  std::size_t j = 0;
  const std::size_t full = args.count - args.count % 4;
  for (; j < full; j += 4) {
    const Geometry4 g = geometry4(args, j);
    if (c.family == KernelFamily::RationalQuadratic) {
      _mm256_storeu_pd(out + j, rq_combine4(c, g));
      continue;
    }
    // exp / Bessel terms stay scalar per lane; the geometry was the d-long part.
    alignas(32) double z[4], dur[4], uxr[4], uyr[4], uxuy[4];
    _mm256_store_pd(z, g.z);
    _mm256_store_pd(dur, g.dur);
    _mm256_store_pd(uxr, g.uxr);
    _mm256_store_pd(uyr, g.uyr);
    _mm256_store_pd(uxuy, g.uxuy);
    for (int lane = 0; lane < 4; ++lane) {
      const auto terms = detail::radial_terms(cfg, c, z[lane]);
      out[j + lane] = detail::radial_combine(c, terms, dur[lane], uxr[lane], uyr[lane], uxuy[lane]);
    }
  }
  if (j < args.count) {
    SteinRowArgs tail = args;
    tail.ys = args.ys + j;
    tail.uys = args.uys + j;
    tail.count = args.count - j;
    stein_row_scalar(cfg, tail, out + j);
  }
}

}  // namespace secf::simd
