#include <atomic>

#include "ssd/kernels.hpp"

namespace ssd::kernels {

namespace {

bool detect_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return avx2::compiled() && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect_avx2() ? Isa::Avx2 : Isa::Scalar};
  return isa;
}

}  // namespace

bool avx2_available() {
  static const bool ok = detect_avx2();
  return ok;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  current().store(isa == Isa::Avx2 && avx2_available() ? Isa::Avx2 : Isa::Scalar);
}

void stability_requirement(int scase, bool printed_sign, const ThetaGrid& grid, double gam,
                           double dgam, double ct, double st, double* out) {
  if (active_isa() == Isa::Avx2)
    avx2::stability_requirement(scase, printed_sign, grid, gam, dgam, ct, st, out);
  else
    scalar::stability_requirement(scase, printed_sign, grid, gam, dgam, ct, st, out);
}

double volume_sum(const double* r, const double* z, std::size_t n) {
  return active_isa() == Isa::Avx2 ? avx2::volume_sum(r, z, n) : scalar::volume_sum(r, z, n);
}

double fourfold_energy_sum(const double* r, const double* z, std::size_t n, double beta) {
  return active_isa() == Isa::Avx2 ? avx2::fourfold_energy_sum(r, z, n, beta)
                                   : scalar::fourfold_energy_sum(r, z, n, beta);
}

}  // namespace ssd::kernels
