#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fourvol/functionals.hpp"
#include "fourvol/spectrum.hpp"
#include "fourvol/spot.hpp"

namespace fourvol {

/// Simulated log-prices and spot covariances on the fine mesh k*dt,
/// k = 0..steps. Storage is flat; use x(), c() for access.
struct LatentPath {
  double T = 0.0;
  double dt = 0.0;
  int d = 1;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  std::vector<double> X;  // (steps+1) * d
  std::vector<double> C;  // (steps+1) * d * d, column-major per step

  double x(std::size_t k, int j) const { return X[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)]; }
  Eigen::Map<const Eigen::MatrixXd> c(std::size_t k) const {
    return {C.data() + k * static_cast<std::size_t>(d * d), d, d};
  }
  double time(std::size_t k) const { return T * static_cast<double>(k) / static_cast<double>(steps); }
};

/// Per-asset CIR volatility parameters (rates per unit of time).
struct HestonParams {
  double mean_rev = 6.0;
  double long_run = 0.16;
  double volvol = 0.5;
  double drift = 0.03;
  double corr = -0.6;
  /// Initial volatility; negative means long_run.
  double c0 = -1.0;
  bool bridge = true;
};

/// Independent engine for (seed, replication, stream).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t rep, std::uint64_t stream);

/// Full-truncation Euler CIR volatility, optionally bridged so c(0) = c(T),
/// and Euler log-price driven by the bridged c.
LatentPath simulate_heston_bridge(const HestonParams& p, double T, double dt, std::uint64_t seed,
                                  std::uint64_t rep = 0);

/// d assets, each with its own CIR bridge and leverage correlation, and a
/// constant correlation matrix R between the price Brownian motions.
/// c(t) = D R D with D = diag(sqrt(c_jj)).
LatentPath simulate_multi_heston_bridge(const std::vector<HestonParams>& p,
                                        const Eigen::MatrixXd& R, double T, double dt,
                                        std::uint64_t seed, std::uint64_t rep = 0);

struct FbmVolParams {
  double H = 0.56;
  double a = -1.8325814637483102;  // log(0.16)
  double b = 0.5;
  double drift = 0.0;
};

/// Exact fBM B_H(k/K), k = 0..K, on the unit interval (circulant embedding,
/// Cholesky when the embedding is not PSD). Throws ConfigError for H
/// outside (0, 1).
std::vector<double> fbm_path(double H, std::size_t K, std::mt19937_64& rng);

/// c(t) = exp(a + b B_H(t/T)); log-price integrated against it.
LatentPath simulate_fbm_vol(const FbmVolParams& p, double T, double dt, std::uint64_t seed,
                            std::uint64_t rep = 0);

enum class SamplingKind { regular, poisson_thinning, offset_regular };

/// Sampling rule in units of fine-mesh steps.
struct SamplingScheme {
  SamplingKind kind = SamplingKind::regular;
  std::size_t mesh = 1;
  std::size_t offset = 0;
  double keep_prob = 0.5;
  /// Redraw until max/min spacing <= max_ratio; 0 disables the cap.
  double max_ratio = 0.0;
};

/// Reads each asset at its own grid; grids come from an RNG stream
/// independent of the path. Throws SamplingError on an empty grid.
std::vector<TickSeries> sample_asynchronous(const LatentPath& path,
                                            const std::vector<SamplingScheme>& schemes,
                                            std::uint64_t seed, std::uint64_t rep = 0);

/// Grid of one scheme as fine-mesh indices.
std::vector<std::size_t> sample_indices(const SamplingScheme& s, std::size_t steps,
                                        std::mt19937_64& rng);

/// Trapezoid rule of g(c(t)) on the fine mesh.
double true_functional(const LatentPath& path, const FunctionalSpec& g);

/// True c sampled at t_h = hT/B, h = 0..B-1, as a SpotPath.
SpotPath latent_to_spot(const LatentPath& path, std::size_t B);

}  // namespace fourvol
