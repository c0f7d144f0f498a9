#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "ssd/anisotropy.hpp"
#include "ssd/kernels.hpp"

using namespace ssd;
namespace k = ssd::kernels;

namespace {

struct Grid {
  std::vector<double> c, s, g, g2;
  k::ThetaGrid view() const { return {c.data(), s.data(), g.data(), g2.data(), c.size()}; }
};

Grid make_grid(std::size_t n, double beta) {
  Grid gr;
  const auto m = AnisotropyModel::four_fold(beta);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = -std::numbers::pi + 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    gr.c.push_back(std::cos(th));
    gr.s.push_back(std::sin(th));
    gr.g.push_back(m.gamma(th));
    gr.g2.push_back(gr.g.back() * gr.g.back());
  }
  return gr;
}

// The requirement divides by sin^2(th_hat - th); FMA contraction in the
// vector path changes rounding, amplified by that factor.
bool same(double a, double b, double sd) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::fabs(a - b) <= 1e-14 * (1.0 + std::fabs(a)) / std::max(sd * sd, 1e-10);
}

}  // namespace

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!k::avx2_available()) {
    MESSAGE("AVX2 not available; only the scalar path is exercised");
  }
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.1, 5.0), th(-3.1, 3.1);
  // Odd sizes exercise the vector tail.
  for (std::size_t n : {2u, 3u, 5u, 8u, 17u, 64u, 1001u}) {
    std::vector<double> r(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = u(rng);
      z[i] = u(rng) - 2.5;
    }
    const double vs = k::scalar::volume_sum(r.data(), z.data(), n);
    const double va = k::avx2::volume_sum(r.data(), z.data(), n);
    CHECK(std::fabs(vs - va) <= 1e-12 * (1.0 + std::fabs(vs)));
    const double es = k::scalar::fourfold_energy_sum(r.data(), z.data(), n, 0.07);
    const double ea = k::avx2::fourfold_energy_sum(r.data(), z.data(), n, 0.07);
    CHECK(std::fabs(es - ea) <= 1e-12 * (1.0 + std::fabs(es)));
  }
  for (std::size_t n : {256u, 257u, 513u}) {
    const Grid gr = make_grid(n, 0.1);
    std::vector<double> a(n), b(n);
    for (int scase = 1; scase <= 3; ++scase) {
      for (bool printed : {false, true}) {
        for (int trial = 0; trial < 5; ++trial) {
          const double t = th(rng);
          const auto gv = AnisotropyModel::four_fold(0.1).eval(t);
          k::scalar::stability_requirement(scase, printed, gr.view(), gv.g, gv.dg, std::cos(t), std::sin(t), a.data());
          k::avx2::stability_requirement(scase, printed, gr.view(), gv.g, gv.dg, std::cos(t), std::sin(t), b.data());
          int bad = 0;
          for (std::size_t i = 0; i < n; ++i)
            bad += !same(a[i], b[i], gr.s[i] * std::cos(t) - gr.c[i] * std::sin(t));
          CHECK(bad == 0);
        }
      }
    }
  }
}

TEST_CASE("dispatch can be forced to the scalar path") {
  const k::Isa before = k::active_isa();
  k::force_isa(k::Isa::Scalar);
  CHECK(k::active_isa() == k::Isa::Scalar);
  const double r[] = {1.0, 2.0, 3.0}, z[] = {0.0, 1.0, 0.0};
  const double s = k::volume_sum(r, z, 3);
  k::force_isa(k::Isa::Avx2);
  CHECK(k::active_isa() == (k::avx2_available() ? k::Isa::Avx2 : k::Isa::Scalar));
  CHECK(std::fabs(k::volume_sum(r, z, 3) - s) < 1e-14);
  k::force_isa(before);
}

TEST_CASE("volume kernel is exact for a trapezoid") {
  // Segments (1,0)-(1,1)-(2,1)-(2,0): int r z r_rho over the closed-up profile.
  const double r[] = {2.0, 2.0, 1.0, 1.0}, z[] = {0.0, 1.0, 1.0, 0.0};
  // Only the top edge contributes: int_{2}^{1} r dr = -3/2.
  CHECK(k::scalar::volume_sum(r, z, 4) == doctest::Approx(-1.5).epsilon(1e-15));
}
