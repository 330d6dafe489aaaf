#include "fourvol/simd/kernels.hpp"

#include <cmath>

namespace fourvol::simd {
namespace {

constexpr double kSinGuard = 1e-8;

void scaled_dirichlet(double xs1, double xc1, double xsN, double xcN,
                      PhaseView y, double inv_2n1, std::size_t n,
                      double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double den = xs1 * y.c1[i] - xc1 * y.s1[i];
    const double num = xsN * y.cN[i] - xcN * y.sN[i];
    out[i] = std::fabs(den) < kSinGuard ? 1.0 : num / den * inv_2n1;
  }
}

double weighted_dot(const double* w, const double* x, const double* y,
                    std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i] * y[i];
  return acc;
}

void complex_dot(const double* ar, const double* ai, const double* br,
                 const double* bi, std::size_t n, double* re, double* im) {
  double sr = 0.0, si = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sr += ar[i] * br[i] - ai[i] * bi[i];
    si += ar[i] * bi[i] + ai[i] * br[i];
  }
  *re = sr;
  *im = si;
}

void phasor_block(const double* delta, double* pr, double* pi,
                  const double* wr, const double* wi, std::size_t n,
                  std::size_t steps, double* out_re, double* out_im) {
  for (std::size_t k = 0; k < steps; ++k) {
    double sr = 0.0, si = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sr += delta[i] * pr[i];
      si += delta[i] * pi[i];
      const double r = pr[i] * wr[i] - pi[i] * wi[i];
      pi[i] = pr[i] * wi[i] + pi[i] * wr[i];
      pr[i] = r;
    }
    out_re[k] = sr;
    out_im[k] = si;
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar", scaled_dirichlet, weighted_dot, complex_dot,
                         phasor_block};
  return k;
}

}  // namespace fourvol::simd
