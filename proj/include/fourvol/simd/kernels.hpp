#pragma once

#include <cstddef>

namespace fourvol::simd {

/// Phase table for a set of time points y_i: sines and cosines of pi*y/T
/// and (2N+1)*pi*y/T. Lets D^N((x - y)/T) be evaluated without trig calls.
struct PhaseView {
  const double* s1;
  const double* c1;
  const double* sN;
  const double* cN;
};

/// Data-parallel inner loops. One table per instruction set; all entries
/// compute the same values up to rounding.
struct Kernels {
  const char* name;

  /// out[i] = D^N((x - y_i)/T) / (2N+1), x given by its four phase values.
  void (*scaled_dirichlet)(double xs1, double xc1, double xsN, double xcN,
                           PhaseView y, double inv_2n1, std::size_t n,
                           double* out);

  /// sum_i w[i] * x[i] * y[i]
  double (*weighted_dot)(const double* w, const double* x, const double* y,
                         std::size_t n);

  /// (re, im) of sum_i a[i] * b[i] for split complex arrays.
  void (*complex_dot)(const double* ar, const double* ai, const double* br,
                      const double* bi, std::size_t n, double* re, double* im);

  /// For k in [0, steps): out[k] = sum_i delta[i] * p[i], then p[i] *= w[i].
  /// p is updated in place.
  void (*phasor_block)(const double* delta, double* pr, double* pi,
                       const double* wr, const double* wi, std::size_t n,
                       std::size_t steps, double* out_re, double* out_im);
};

const Kernels& scalar_kernels();

/// nullptr when the CPU or the compiler lacks AVX2/FMA.
const Kernels* avx2_kernels();

/// Best table for this CPU. FOURVOL_SIMD=scalar in the environment forces
/// the reference path.
const Kernels& active_kernels();

}  // namespace fourvol::simd
