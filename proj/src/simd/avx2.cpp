#include "fourvol/simd/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define FOURVOL_HAVE_AVX2 1
#include <immintrin.h>
#endif

#include <cmath>

namespace fourvol::simd {

#ifdef FOURVOL_HAVE_AVX2
namespace {

#define AVX2_FN __attribute__((target("avx2,fma")))

constexpr double kSinGuard = 1e-8;

AVX2_FN inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

AVX2_FN void scaled_dirichlet(double xs1, double xc1, double xsN, double xcN,
                              PhaseView y, double inv_2n1, std::size_t n,
                              double* out) {
  const __m256d vs1 = _mm256_set1_pd(xs1), vc1 = _mm256_set1_pd(xc1);
  const __m256d vsN = _mm256_set1_pd(xsN), vcN = _mm256_set1_pd(xcN);
  const __m256d scale = _mm256_set1_pd(inv_2n1);
  const __m256d guard = _mm256_set1_pd(kSinGuard);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d den = _mm256_fmsub_pd(vs1, _mm256_loadu_pd(y.c1 + i),
                                        _mm256_mul_pd(vc1, _mm256_loadu_pd(y.s1 + i)));
    const __m256d num = _mm256_fmsub_pd(vsN, _mm256_loadu_pd(y.cN + i),
                                        _mm256_mul_pd(vcN, _mm256_loadu_pd(y.sN + i)));
    const __m256d small = _mm256_cmp_pd(_mm256_and_pd(den, absmask), guard, _CMP_LT_OQ);
    const __m256d safe_den = _mm256_blendv_pd(den, one, small);
    const __m256d val = _mm256_mul_pd(_mm256_div_pd(num, safe_den), scale);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(val, one, small));
  }
  for (; i < n; ++i) {
    const double den = xs1 * y.c1[i] - xc1 * y.s1[i];
    const double num = xsN * y.cN[i] - xcN * y.sN[i];
    out[i] = std::fabs(den) < kSinGuard ? 1.0 : num / den * inv_2n1;
  }
}

AVX2_FN double weighted_dot(const double* w, const double* x, const double* y,
                            std::size_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i)),
                         _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(x + i + 4)),
                         _mm256_loadu_pd(y + i + 4), a1);
  }
  for (; i + 4 <= n; i += 4)
    a0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i)),
                         _mm256_loadu_pd(y + i), a0);
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += w[i] * x[i] * y[i];
  return acc;
}

AVX2_FN void complex_dot(const double* ar, const double* ai, const double* br,
                         const double* bi, std::size_t n, double* re, double* im) {
  __m256d sr = _mm256_setzero_pd(), si = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xr = _mm256_loadu_pd(ar + i), xi = _mm256_loadu_pd(ai + i);
    const __m256d yr = _mm256_loadu_pd(br + i), yi = _mm256_loadu_pd(bi + i);
    sr = _mm256_fmadd_pd(xr, yr, sr);
    sr = _mm256_fnmadd_pd(xi, yi, sr);
    si = _mm256_fmadd_pd(xr, yi, si);
    si = _mm256_fmadd_pd(xi, yr, si);
  }
  double r = hsum(sr), m = hsum(si);
  for (; i < n; ++i) {
    r += ar[i] * br[i] - ai[i] * bi[i];
    m += ar[i] * bi[i] + ai[i] * br[i];
  }
  *re = r;
  *im = m;
}

AVX2_FN void phasor_block(const double* delta, double* pr, double* pi,
                          const double* wr, const double* wi, std::size_t n,
                          std::size_t steps, double* out_re, double* out_im) {
  for (std::size_t k = 0; k < steps; ++k) {
    __m256d sr = _mm256_setzero_pd(), si = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      const __m256d d = _mm256_loadu_pd(delta + i);
      const __m256d xr = _mm256_loadu_pd(pr + i), xi = _mm256_loadu_pd(pi + i);
      const __m256d yr = _mm256_loadu_pd(wr + i), yi = _mm256_loadu_pd(wi + i);
      sr = _mm256_fmadd_pd(d, xr, sr);
      si = _mm256_fmadd_pd(d, xi, si);
      _mm256_storeu_pd(pr + i, _mm256_fmsub_pd(xr, yr, _mm256_mul_pd(xi, yi)));
      _mm256_storeu_pd(pi + i, _mm256_fmadd_pd(xr, yi, _mm256_mul_pd(xi, yr)));
    }
    double r = hsum(sr), m = hsum(si);
    for (; i < n; ++i) {
      r += delta[i] * pr[i];
      m += delta[i] * pi[i];
      const double t = pr[i] * wr[i] - pi[i] * wi[i];
      pi[i] = pr[i] * wi[i] + pi[i] * wr[i];
      pr[i] = t;
    }
    out_re[k] = r;
    out_im[k] = m;
  }
}

}  // namespace

const Kernels* avx2_kernels() {
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  static const Kernels k{"avx2", scaled_dirichlet, weighted_dot, complex_dot,
                         phasor_block};
  return ok ? &k : nullptr;
}

#else

const Kernels* avx2_kernels() { return nullptr; }

#endif

}  // namespace fourvol::simd
