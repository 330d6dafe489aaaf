#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fourvol/trigkernels.hpp"

namespace fourvol {

/// One asset's observation times and log-prices.
struct TickSeries {
  std::string asset_id;
  ObservationGrid grid;
  std::vector<double> log_prices;

  /// Number of increments.
  std::size_t n() const { return grid.n(); }
  std::vector<double> increments() const;
  /// Throws DataError on length mismatch or non-finite prices.
  void validate() const;
};

/// F_s = sum_h delta_h exp(-i 2 pi s tau_h / T) for |s| <= S.
struct StieltjesTransform {
  std::string asset_id;
  int S = 0;
  std::vector<std::complex<double>> values;  // index s + S

  std::complex<double> at(int s) const { return values[static_cast<std::size_t>(s + S)]; }
};

enum class TransformMethod { automatic, direct, lattice };

/// Exact transform of the increments. `lattice` requires timestamps on a
/// uniform lattice of [0, T] and uses one FFT; `direct` runs the phase
/// recurrence over all ticks. Throws TuningError if s_max exceeds floor(n/2).
StieltjesTransform fourier_stieltjes(const TickSeries& ticks, double T, int s_max,
                                     TransformMethod method = TransformMethod::automatic);

/// Lattice size K with every tau*K/T an integer, or 0 if none is found.
std::size_t detect_lattice(const std::vector<double>& times, double T);

/// (1/(2N+1)) sum_{|s|<=N} Fj(q-s) Fk(s) for |q| <= q_max, index q + q_max.
/// Throws TuningError if the needed frequencies are unavailable.
std::vector<std::complex<double>> bohr_convolution(const StieltjesTransform& Fj,
                                                   const StieltjesTransform& Fk, int N,
                                                   int q_max);

/// Per-frequency d x d complex coefficient matrices for |q| <= Q.
struct SpectrumEstimate {
  double T = 0.0;
  int N = 0;
  int Q = 0;
  int d = 0;
  std::vector<std::string> asset_ids;
  std::vector<std::size_t> sample_sizes;
  std::vector<Eigen::MatrixXcd> coeffs;  // index q + Q

  const Eigen::MatrixXcd& at(int q) const { return coeffs[static_cast<std::size_t>(q + Q)]; }
  std::size_t n_min() const;
};

/// Assemble the spectrum of all pairs. q_max < 0 selects
/// Q = min_j floor(n_j/2) - N.
SpectrumEstimate spectrum_matrix(const std::vector<TickSeries>& ticks, double T, int N,
                                 int q_max = -1,
                                 TransformMethod method = TransformMethod::automatic);

}  // namespace fourvol
