#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fourvol/functionals.hpp"
#include "fourvol/spot.hpp"
#include "fourvol/trigkernels.hpp"

namespace fourvol {

/// Inner time integral of the variance estimator. `exact` integrates the
/// step functions segment by segment; `lattice` sums at v*delta with
/// delta the smallest observation spacing, strided to stay under budget.
enum class AvarMethod { exact, lattice };

struct AvarOptions {
  AvarMethod method = AvarMethod::exact;
  double budget = 1e8;
};

/// Per-t_h Gram matrices G[(j,k),(l,m)] = N int_0^{t_h} a_jk(v) a_lm(v) dv with
/// a_jk(v) = d_jk(t_h, v). Independent of g and of the spot values.
struct AvarKernel {
  int d = 0;
  int N = 0;
  std::size_t B = 0;
  double T = 0.0;
  std::size_t stride = 1;
  std::vector<Eigen::MatrixXd> gram;  // index h-1, h = 1..B
};

AvarKernel avar_kernel(const std::vector<ObservationGrid>& grids, int N, std::size_t B,
                       const AvarOptions& opts = {});

/// Asymptotic variance estimate on the N^{1/2} scale.
double avar_estimate(const SpotPath& path, const FunctionalSpec& g, const AvarKernel& kernel);
double avar_estimate(const SpotPath& path, const FunctionalSpec& g,
                     const std::vector<ObservationGrid>& grids, int N, std::size_t B,
                     const AvarOptions& opts = {});

/// Second-order asynchronicity bias estimate for the N^{1/2} scale with
/// N = kappa n^{4/5}. Zero on synchronous grids. Throws ConfigError if
/// kappa <= 0.
double async_bias_estimate(const SpotPath& path, const FunctionalSpec& g,
                           const std::vector<ObservationGrid>& grids, double kappa);

/// rate * (s_hat - target) / sqrt(v_hat). Throws InferenceError if v_hat <= 0.
double studentize(double s_hat, double v_hat, double rate, double target);

/// s_hat - mu_hat/rate +- z_{1-alpha/2} sqrt(v_hat)/rate.
std::pair<double, double> confidence_interval(double s_hat, double v_hat, double mu_hat,
                                              double rate, double alpha);

/// c_jk(t_h) * d_jk(t_h, t_h) entrywise.
SpotPath shrinkage_target(const SpotPath& true_c, const std::vector<ObservationGrid>& grids, int N);

enum class RateKind { sqrt_N, inv_sqrt_delta, n_two_fifths };
std::string rate_name(RateKind r);

struct EstimateReport {
  std::string functional;
  double s_hat = 0.0;
  double v_hat = 0.0;
  double v_hat_raw = 0.0;
  bool has_mu = false;
  double mu_hat = 0.0;
  RateKind rate_kind = RateKind::sqrt_N;
  double rate = 1.0;
  double level = 0.95;
  bool ci_valid = false;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;
};

}  // namespace fourvol
