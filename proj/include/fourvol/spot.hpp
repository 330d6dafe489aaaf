#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fourvol/spectrum.hpp"

namespace fourvol {

/// Spot covariance matrices on t_h = hT/B, h = 0..B-1.
struct SpotPath {
  double T = 0.0;
  std::size_t B = 0;
  int d = 0;
  int N = 0;
  int M = 0;
  std::vector<double> t_grid;
  std::vector<Eigen::MatrixXd> values;
  /// Largest imaginary part discarded by the inversion.
  double max_imag_residue = 0.0;
  bool conditioned = false;

  /// Value at t_h for any integer h, wrapping periodically (h = B is h = 0).
  const Eigen::MatrixXd& at(long h) const;
};

/// Smallest power of two >= max(4M, 8 ceil(sqrt(N))).
std::size_t default_B(int N, int M);

/// Fejer-weighted series (1/T) sum_{|q|<M} (1-|q|/M) F_q exp(i 2 pi q t/T) on the
/// B-point grid via zero padding and one inverse FFT per entry. Throws
/// TuningError if M-1 > spec.Q and ConfigError if B < 2M-1.
SpotPath fejer_inversion(const SpectrumEstimate& spec, int M, std::size_t B);

/// Same series at an arbitrary time, evaluated directly.
Eigen::MatrixXcd fejer_series_at(const SpectrumEstimate& spec, int M, double t);

/// Symmetrize and clamp eigenvalues from below. eps <= 0 selects
/// 1e-8 * trace/d per matrix.
Eigen::MatrixXd condition_matrix(const Eigen::MatrixXd& A, double eps = -1.0);
SpotPath condition_spot(const SpotPath& path, double eps = -1.0);

/// sum_h |c_jk(t_{h+1}) - c_jk(t_h)| over the grid.
double total_variation(const SpotPath& path, int j = 0, int k = 0);

}  // namespace fourvol
