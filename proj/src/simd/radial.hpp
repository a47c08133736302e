#pragma once

// Shared scalar pieces of the radial Stein kernel. Both row kernels and
// stein_kernel_eval go through these so that every path rounds identically.

#include "secf/kernel.hpp"

#include <cmath>

namespace secf::detail {

/// Psi', Psi'', z Psi''' and z^2 Psi'''' at one z.
struct RadialTerms {
  double p1;
  double p2;
  double zp3;
  double z2p4;
};

/// Family constants hoisted out of the pair loop.
struct RadialConstants {
  KernelFamily family;
  double a;       // 1 / lambda^2
  double rq_c1;   // -a
  double rq_c2;   // 2 a^2
  double rq_c3;   // -6 a^3
  double rq_c4;   // 24 a^4
  double g_c2;    // a^2
  double g_c3;    // a^3
  double g_c4;    // a^4
  double dp2;     // 2 + d
  double k16dp2;  // 16 (2 + d)
  double k4dp2d;  // 4 (2 + d) d
};

inline RadialConstants make_constants(const KernelConfig& cfg, std::size_t dim) {
  RadialConstants c{};
  c.family = cfg.family;
  c.a = 1.0 / (cfg.lambda * cfg.lambda);
  c.rq_c1 = -c.a;
  c.rq_c2 = 2.0 * c.a * c.a;
  c.rq_c3 = -6.0 * c.a * c.a * c.a;
  c.rq_c4 = 24.0 * c.a * c.a * c.a * c.a;
  c.g_c2 = c.a * c.a;
  c.g_c3 = c.a * c.a * c.a;
  c.g_c4 = c.a * c.a * c.a * c.a;
  const double d = static_cast<double>(dim);
  c.dp2 = 2.0 + d;
  c.k16dp2 = 16.0 * c.dp2;
  c.k4dp2d = 4.0 * c.dp2 * d;
  return c;
}

inline constexpr double kMaternZeroCutoff = 1e-12;

inline RadialTerms radial_terms(const KernelConfig& cfg, const RadialConstants& c, double z) {
  RadialTerms t{};
  switch (c.family) {
    case KernelFamily::RationalQuadratic: {
      const double s = 1.0 / (1.0 + z * c.a);
      const double s2 = s * s;
      const double s3 = s2 * s;
      const double s4 = s3 * s;
      const double s5 = s4 * s;
      t.p1 = c.rq_c1 * s2;
      t.p2 = c.rq_c2 * s3;
      t.zp3 = z * (c.rq_c3 * s4);
      t.z2p4 = (z * z) * (c.rq_c4 * s5);
      break;
    }
    case KernelFamily::Gaussian: {
      const double e = std::exp(-(z * c.a));
      t.p1 = c.rq_c1 * e;
      t.p2 = c.g_c2 * e;
      t.zp3 = z * (-(c.g_c3 * e));
      t.z2p4 = (z * z) * (c.g_c4 * e);
      break;
    }
    case KernelFamily::Matern: {
      t.p1 = psi_derivative(cfg, z, 1);
      t.p2 = psi_derivative(cfg, z, 2);
      if (z < kMaternZeroCutoff) {
        t.zp3 = 0.0;
        t.z2p4 = 0.0;
      } else {
        t.zp3 = z * psi_derivative(cfg, z, 3);
        t.z2p4 = (z * z) * psi_derivative(cfg, z, 4);
      }
      break;
    }
  }
  return t;
}

/// k0 from the radial terms and the pair geometry
///   dur = (ux - uy).(x - y), uxr = ux.(x - y), uyr = uy.(x - y), uxuy = ux.uy.
inline double radial_combine(const RadialConstants& c, const RadialTerms& t, double dur,
                             double uxr, double uyr, double uxuy) {
  const double t1 = 16.0 * t.z2p4;
  const double t2 = c.k16dp2 * t.zp3;
  const double t3 = c.k4dp2d * t.p2;
  const double m = 2.0 * t.zp3 + c.dp2 * t.p2;
  const double t4 = (4.0 * m) * dur;
  const double t5 = ((4.0 * t.p2) * uxr) * uyr;
  const double t6 = (2.0 * t.p1) * uxuy;
  return ((((t1 + t2) + t3) + t4) - t5) - t6;
}

}  // namespace secf::detail
