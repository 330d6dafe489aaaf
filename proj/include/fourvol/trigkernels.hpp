#pragma once

#include <cstddef>
#include <vector>

#include "fourvol/simd/kernels.hpp"

namespace fourvol {

/// q-order Dirichlet kernel sum_{|s|<=q} exp(i 2 pi s x).
double dirichlet_kernel(int q, double x);

/// M-order Fejer kernel sin^2(pi M x) / (M sin^2(pi x)).
double fejer_kernel(int M, double x);

/// Strictly increasing observation times of one asset on [0, T].
class ObservationGrid {
 public:
  ObservationGrid() = default;
  /// Throws DataError when the times are unordered, duplicated, outside
  /// [0, T], or fewer than two.
  ObservationGrid(std::vector<double> times, double T);

  const std::vector<double>& times() const { return times_; }
  double T() const { return T_; }
  std::size_t size() const { return times_.size(); }
  /// Number of increments n_j.
  std::size_t n() const { return times_.size() - 1; }

  /// Smallest grid time >= t, capped at the last grid time.
  double theta_bar(double t) const;

  double min_spacing() const;
  double max_spacing() const;

 private:
  std::vector<double> times_;
  double T_ = 0.0;
};

bool same_times(const ObservationGrid& a, const ObservationGrid& b);

/// D^N((theta_j(t) - theta_k(u))/T) / (2N+1). Throws ConfigError when the
/// grids have different window lengths.
double scaled_dirichlet(const ObservationGrid& gridJ, const ObservationGrid& gridK,
                        int N, double t, double u);

/// Sines and cosines of pi*y/T and (2N+1)*pi*y/T for a set of points y,
/// laid out for the batched scaled Dirichlet kernel.
class DirichletPhases {
 public:
  DirichletPhases() = default;
  DirichletPhases(const std::vector<double>& y, int N, double T);

  simd::PhaseView view(std::size_t offset = 0) const {
    return {s1_.data() + offset, c1_.data() + offset, sN_.data() + offset,
            cN_.data() + offset};
  }
  std::size_t size() const { return s1_.size(); }

  /// out[i] = D^N((x - y_i)/T)/(2N+1), for i in [begin, end).
  void evaluate(double x, std::size_t begin, std::size_t end, double* out,
                const simd::Kernels& k = simd::active_kernels()) const;

 private:
  int N_ = 0;
  double T_ = 0.0;
  std::vector<double> s1_, c1_, sN_, cN_;
};

/// Partition of [0, t_max] into segments on which every listed step
/// function theta_bar is constant. Edges include 0, t_max, every grid time
/// below t_max, and any extra cut points.
struct Segmentation {
  std::vector<double> edges;
  std::vector<double> lengths;
  /// theta[g][i]: theta_bar of grid g on segment i.
  std::vector<std::vector<double>> theta;
};

Segmentation segment_grids(const std::vector<const ObservationGrid*>& grids,
                           double t_max,
                           const std::vector<double>& extra_cuts = {});

/// Cumulative theta-integrals on a uniform B-point grid t_h = hT/B, h=0..B.
struct ThetaIntegrals {
  std::vector<double> t_grid;
  std::vector<double> tilde, acute, check, grave;
};

/// N * int_0^t int_0^u d_jk d_lm dv du for the four kernel orientations.
/// Integrands are step functions, so the integral is computed cell by cell
/// on the merged breakpoints, with the cells refined to quad_step. B = 0
/// means t_grid = {0, T}.
ThetaIntegrals theta_integrals(const ObservationGrid& gridJ, const ObservationGrid& gridK,
                               const ObservationGrid& gridL, const ObservationGrid& gridM,
                               int N, double quad_step, std::size_t B = 0);

/// P(t) = n_min^2 int_0^t (theta_j(u) - theta_k(u))^2 du, exact.
double cubic_variation(const ObservationGrid& gridJ, const ObservationGrid& gridK,
                       int n_min, double t);

/// cubic_variation at each point of a non-decreasing sequence t.
std::vector<double> cubic_variation_curve(const ObservationGrid& gridJ,
                                          const ObservationGrid& gridK, int n_min,
                                          const std::vector<double>& t);

}  // namespace fourvol
