#include <cmath>
#include <limits>

#include "ssd/kernels.hpp"

namespace ssd::kernels::scalar {

void stability_requirement(int scase, bool printed_sign, const ThetaGrid& grid, double gam,
                           double dgam, double ct, double st, double* out) {
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  const double sgn = printed_sign ? 1.0 : -1.0;
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double c = grid.c[k] * ct + grid.s[k] * st;   // cos(th_hat - th)
    const double sd = grid.s[k] * ct - grid.c[k] * st;  // sin(th_hat - th)
    const double sd2 = sd * sd;
    if (std::fabs(sd) < kTangentCutoff) {
      out[k] = kNone;
      continue;
    }
    double req = kNone;
    if (scase == 1) {
      const double base = gam * (c * c - sd2) + dgam * 2.0 * sd * c;
      req = (grid.g2[k] / gam - base) / sd2;
    } else if (scase == 2) {
      const double q = grid.g[k] + gam * c + sgn * dgam * sd;
      if (q > 0.0) req = (q * q - 4.0 * gam * gam) / (4.0 * gam * sd2);
    } else {
      const double f = 2.0 * c + dgam * sd;
      const double q = grid.g[k] + gam * c + dgam * sd;
      req = q > 0.0 ? (q * q / (4.0 * gam) + gam - f) / sd2 : (gam - f) / sd2;
    }
    out[k] = req;
  }
}

double volume_sum(const double* r, const double* z, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double r0 = r[j - 1], r1 = r[j], z0 = z[j - 1], z1 = z[j];
    acc += (r1 - r0) * (2.0 * r0 * z0 + 2.0 * r1 * z1 + r0 * z1 + r1 * z0) / 6.0;
  }
  return acc;
}

double fourfold_energy_sum(const double* r, const double* z, std::size_t n, double beta) {
  double acc = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double hr = r[j] - r[j - 1], hz = z[j] - z[j - 1];
    const double l2 = hr * hr + hz * hz;
    const double len = std::sqrt(l2);
    const double c2 = (hr * hr - hz * hz) / l2;  // cos 2 theta
    acc += 0.5 * (r[j] + r[j - 1]) * (len + beta * len * (2.0 * c2 * c2 - 1.0));
  }
  return acc;
}

}  // namespace ssd::kernels::scalar
