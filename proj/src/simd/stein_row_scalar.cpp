#include "secf/simd/stein_row.hpp"

#include "radial.hpp"

namespace secf::simd {

void stein_row_scalar(const KernelConfig& cfg, const SteinRowArgs& args, double* out) {
  const auto c = detail::make_constants(cfg, args.dim);
  for (std::size_t j = 0; j < args.count; ++j) {
    double z = 0.0, dur = 0.0, uxr = 0.0, uyr = 0.0, uxuy = 0.0;
    for (std::size_t k = 0; k < args.dim; ++k) {
      const double yk = args.ys[k * args.stride + j];
      const double uyk = args.uys[k * args.stride + j];
      const double r = args.x[k] - yk;
      z += r * r;
      dur += (args.ux[k] - uyk) * r;
      uxr += args.ux[k] * r;
      uyr += uyk * r;
      uxuy += args.ux[k] * uyk;
    }
    const auto terms = detail::radial_terms(cfg, c, z);
    out[j] = detail::radial_combine(c, terms, dur, uxr, uyr, uxuy);
  }
}

}  // namespace secf::simd
