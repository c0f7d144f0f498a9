#pragma once

#include <cstddef>

// Data-parallel kernels. Each has a scalar reference and an AVX2 variant;
// the public entry points dispatch at runtime.
namespace ssd::kernels {

enum class Isa { Scalar, Avx2 };

bool avx2_available();
Isa active_isa();
// Restricts dispatch (tests). Requests for unavailable ISAs fall back to scalar.
void force_isa(Isa isa);

// Grid over theta-hat: cos, sin, gamma(theta-hat), gamma(theta-hat)^2.
struct ThetaGrid {
  const double* c;
  const double* s;
  const double* g;
  const double* g2;
  std::size_t n;
};

// Per-grid-point lower bound on S for the stability case (1, 2 or 3) at a
// fixed theta given by (ct, st) and gamma values (gam, dgam). Entries where
// |sin(th_hat - th)| < kTangentCutoff or the constraint is void get -inf.
constexpr double kTangentCutoff = 1e-5;
void stability_requirement(int scase, bool printed_sign, const ThetaGrid& grid, double gam,
                           double dgam, double ct, double st, double* out);

// Exact integral of r z r_rho over the polyline: sum over segments of
// (r1 - r0)(2 r0 z0 + 2 r1 z1 + r0 z1 + r1 z0) / 6. n = number of nodes.
double volume_sum(const double* r, const double* z, std::size_t n);

// sum over segments of rbar |h| (1 + beta cos 4 theta).
double fourfold_energy_sum(const double* r, const double* z, std::size_t n, double beta);

namespace scalar {
void stability_requirement(int scase, bool printed_sign, const ThetaGrid& grid, double gam,
                           double dgam, double ct, double st, double* out);
double volume_sum(const double* r, const double* z, std::size_t n);
double fourfold_energy_sum(const double* r, const double* z, std::size_t n, double beta);
}  // namespace scalar

namespace avx2 {
bool compiled();
void stability_requirement(int scase, bool printed_sign, const ThetaGrid& grid, double gam,
                           double dgam, double ct, double st, double* out);
double volume_sum(const double* r, const double* z, std::size_t n);
double fourfold_energy_sum(const double* r, const double* z, std::size_t n, double beta);
}  // namespace avx2

}  // namespace ssd::kernels
