#include <cmath>
#include <limits>

#include "ssd/kernels.hpp"

#if defined(SSD_BUILD_AVX2) && defined(__AVX2__)
#include <immintrin.h>
#define SSD_AVX2_BODY 1
#endif

namespace ssd::kernels::avx2 {

#ifdef SSD_AVX2_BODY

bool compiled() { return true; }

namespace {
inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}
}  // namespace

void stability_requirement(int scase, bool printed_sign, const ThetaGrid& grid, double gam,
                           double dgam, double ct, double st, double* out) {
  const double kNone = -std::numeric_limits<double>::infinity();
  const __m256d vct = _mm256_set1_pd(ct), vst = _mm256_set1_pd(st);
  const __m256d vg = _mm256_set1_pd(gam), vdg = _mm256_set1_pd(dgam);
  const __m256d vsdg = _mm256_set1_pd(printed_sign ? dgam : -dgam);
  const __m256d two = _mm256_set1_pd(2.0), four_g = _mm256_set1_pd(4.0 * gam);
  const __m256d four_g2 = _mm256_set1_pd(4.0 * gam * gam);
  const __m256d cutoff = _mm256_set1_pd(kTangentCutoff), zero = _mm256_setzero_pd();
  const __m256d none = _mm256_set1_pd(kNone);
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  std::size_t k = 0;
  for (; k + 4 <= grid.n; k += 4) {
    const __m256d gc = _mm256_loadu_pd(grid.c + k), gs = _mm256_loadu_pd(grid.s + k);
    const __m256d c = _mm256_add_pd(_mm256_mul_pd(gc, vct), _mm256_mul_pd(gs, vst));
    const __m256d sd = _mm256_sub_pd(_mm256_mul_pd(gs, vct), _mm256_mul_pd(gc, vst));
    const __m256d sd2 = _mm256_mul_pd(sd, sd);
    const __m256d ok = _mm256_cmp_pd(_mm256_and_pd(sd, absmask), cutoff, _CMP_GE_OQ);
    __m256d req;
    if (scase == 1) {
      const __m256d base = _mm256_add_pd(
          _mm256_mul_pd(vg, _mm256_sub_pd(_mm256_mul_pd(c, c), sd2)),
          _mm256_mul_pd(_mm256_mul_pd(vdg, two), _mm256_mul_pd(sd, c)));
      req = _mm256_div_pd(_mm256_sub_pd(_mm256_div_pd(_mm256_loadu_pd(grid.g2 + k), vg), base),
                          sd2);
    } else if (scase == 2) {
      const __m256d q = _mm256_add_pd(_mm256_add_pd(_mm256_loadu_pd(grid.g + k),
                                                    _mm256_mul_pd(vg, c)),
                                      _mm256_mul_pd(vsdg, sd));
      const __m256d val = _mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(q, q), four_g2),
                                        _mm256_mul_pd(four_g, sd2));
      req = _mm256_blendv_pd(none, val, _mm256_cmp_pd(q, zero, _CMP_GT_OQ));
    } else {
      const __m256d f = _mm256_add_pd(_mm256_mul_pd(two, c), _mm256_mul_pd(vdg, sd));
      const __m256d q = _mm256_add_pd(_mm256_add_pd(_mm256_loadu_pd(grid.g + k),
                                                    _mm256_mul_pd(vg, c)),
                                      _mm256_mul_pd(vdg, sd));
      const __m256d pos = _mm256_div_pd(
          _mm256_sub_pd(_mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(q, q), four_g), vg), f), sd2);
      const __m256d neg = _mm256_div_pd(_mm256_sub_pd(vg, f), sd2);
      req = _mm256_blendv_pd(neg, pos, _mm256_cmp_pd(q, zero, _CMP_GT_OQ));
    }
    _mm256_storeu_pd(out + k, _mm256_blendv_pd(none, req, ok));
  }
  if (k < grid.n) {
    ThetaGrid tail{grid.c + k, grid.s + k, grid.g + k, grid.g2 + k, grid.n - k};
    scalar::stability_requirement(scase, printed_sign, tail, gam, dgam, ct, st, out + k);
  }
}

double volume_sum(const double* r, const double* z, std::size_t n) {
  if (n < 2) return 0.0;
  const std::size_t segs = n - 1;
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= segs; j += 4) {
    const __m256d r0 = _mm256_loadu_pd(r + j), r1 = _mm256_loadu_pd(r + j + 1);
    const __m256d z0 = _mm256_loadu_pd(z + j), z1 = _mm256_loadu_pd(z + j + 1);
    const __m256d s = _mm256_add_pd(
        _mm256_mul_pd(two, _mm256_add_pd(_mm256_mul_pd(r0, z0), _mm256_mul_pd(r1, z1))),
        _mm256_add_pd(_mm256_mul_pd(r0, z1), _mm256_mul_pd(r1, z0)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_sub_pd(r1, r0), s));
  }
  double total = hsum(acc) / 6.0;
  if (j < segs) total += scalar::volume_sum(r + j, z + j, n - j);
  return total;
}

double fourfold_energy_sum(const double* r, const double* z, std::size_t n, double beta) {
  if (n < 2) return 0.0;
  const std::size_t segs = n - 1;
  const __m256d half = _mm256_set1_pd(0.5), one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0), vb = _mm256_set1_pd(beta);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= segs; j += 4) {
    const __m256d r0 = _mm256_loadu_pd(r + j), r1 = _mm256_loadu_pd(r + j + 1);
    const __m256d hr = _mm256_sub_pd(r1, r0);
    const __m256d hz = _mm256_sub_pd(_mm256_loadu_pd(z + j + 1), _mm256_loadu_pd(z + j));
    const __m256d hr2 = _mm256_mul_pd(hr, hr), hz2 = _mm256_mul_pd(hz, hz);
    const __m256d l2 = _mm256_add_pd(hr2, hz2);
    const __m256d len = _mm256_sqrt_pd(l2);
    const __m256d c2 = _mm256_div_pd(_mm256_sub_pd(hr2, hz2), l2);
    const __m256d aniso = _mm256_sub_pd(_mm256_mul_pd(two, _mm256_mul_pd(c2, c2)), one);
    const __m256d gl = _mm256_add_pd(len, _mm256_mul_pd(vb, _mm256_mul_pd(len, aniso)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_mul_pd(half, _mm256_add_pd(r0, r1)), gl));
  }
  double total = hsum(acc);
  if (j < segs) total += scalar::fourfold_energy_sum(r + j, z + j, n - j, beta);
  return total;
}

#else

bool compiled() { return false; }

void stability_requirement(int scase, bool printed_sign, const ThetaGrid& grid, double gam,
                           double dgam, double ct, double st, double* out) {
  scalar::stability_requirement(scase, printed_sign, grid, gam, dgam, ct, st, out);
}
double volume_sum(const double* r, const double* z, std::size_t n) {
  return scalar::volume_sum(r, z, n);
}
double fourfold_energy_sum(const double* r, const double* z, std::size_t n, double beta) {
  return scalar::fourfold_energy_sum(r, z, n, beta);
}

#endif

}  // namespace ssd::kernels::avx2
