#pragma once

// Naive reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fourvol/functionals.hpp"
#include "fourvol/spectrum.hpp"
#include "fourvol/spot.hpp"
#include "fourvol/trigkernels.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

inline double dirichlet_sum(int q, double x) {
  double acc = 1.0;
  for (int s = 1; s <= q; ++s) acc += 2.0 * std::cos(2.0 * kPi * s * x);
  return acc;
}

inline std::complex<double> fs_direct(const fourvol::TickSeries& t, double T, int s) {
  std::complex<double> acc = 0.0;
  const auto& tau = t.grid.times();
  for (std::size_t h = 1; h < tau.size(); ++h) {
    const double ang = -2.0 * kPi * s * tau[h] / T;
    acc += (t.log_prices[h] - t.log_prices[h - 1]) * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return acc;
}

inline std::complex<double> bohr_direct(const fourvol::TickSeries& a, const fourvol::TickSeries& b,
                                        double T, int N, int q) {
  std::complex<double> acc = 0.0;
  for (int s = -N; s <= N; ++s) acc += fs_direct(a, T, q - s) * fs_direct(b, T, s);
  return acc / (2.0 * N + 1.0);
}

inline double fejer_direct(const std::vector<std::complex<double>>& coef, int M, double T, double t) {
  // coef indexed q + (M-1)
  std::complex<double> acc = 0.0;
  for (int q = -(M - 1); q <= M - 1; ++q) {
    const double w = 1.0 - std::abs(q) / static_cast<double>(M);
    const double ang = 2.0 * kPi * q * t / T;
    acc += w * coef[static_cast<std::size_t>(q + M - 1)] * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return acc.real() / T;
}

// Variance estimator with every kernel product re-evaluated point by point on
// the merged segments; no tables, no caching.
inline double avar_brute(const fourvol::SpotPath& path, const fourvol::FunctionalSpec& g,
                         const std::vector<fourvol::ObservationGrid>& grids, int N) {
  const double T = path.T;
  const std::size_t B = path.B;
  const int d = path.d;
  std::vector<double> e{0.0, T};
  for (const auto& gr : grids)
    for (double x : gr.times()) e.push_back(x);
  for (std::size_t h = 1; h <= B; ++h) e.push_back(T * h / static_cast<double>(B));
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  double acc = 0.0;
  for (std::size_t h = 1; h <= B; ++h) {
    const double th = T * h / static_cast<double>(B);
    const Eigen::MatrixXd c = path.at(static_cast<long>(h));
    const Eigen::MatrixXd dg = g.grad(c);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          for (int m = 0; m < d; ++m) {
            double s0 = 0.0, s1 = 0.0;
            for (std::size_t i = 0; i + 1 < e.size() && e[i + 1] <= th; ++i) {
              const double v = 0.5 * (e[i] + e[i + 1]), len = e[i + 1] - e[i];
              auto D = [&](int a, int b, double x, double y) {
                return fourvol::scaled_dirichlet(grids[a], grids[b], N, x, y);
              };
              s0 += len * (D(j, k, th, v) * D(l, m, th, v) + D(j, k, v, th) * D(l, m, v, th));
              s1 += len * (D(j, k, th, v) * D(l, m, v, th) + D(j, k, v, th) * D(l, m, th, v));
            }
            acc += dg(j, k) * dg(l, m) * N * (c(j, l) * c(k, m) * s0 + c(j, m) * c(k, l) * s1);
          }
  }
  return acc * T / static_cast<double>(B);
}

inline double cubic_riemann(const fourvol::ObservationGrid& a, const fourvol::ObservationGrid& b,
                            int n_min, double t, double step) {
  double acc = 0.0;
  const auto K = static_cast<std::size_t>(std::ceil(t / step));
  for (std::size_t i = 0; i < K; ++i) {
    const double lo = i * step, hi = std::min(t, lo + step);
    const double u = 0.5 * (lo + hi);
    const double diff = a.theta_bar(u) - b.theta_bar(u);
    acc += diff * diff * (hi - lo);
  }
  return static_cast<double>(n_min) * n_min * acc;
}

inline Eigen::MatrixXd random_pd(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = nd(rng);
  return 0.05 * (A * A.transpose() / d + 0.2 * Eigen::MatrixXd::Identity(d, d));
}

inline fourvol::TickSeries random_ticks(std::size_t n, double T, std::mt19937_64& rng, bool regular,
                                        const std::string& id = "A") {
  std::uniform_real_distribution<double> u(0.2, 1.8);
  std::normal_distribution<double> nd;
  std::vector<double> times{0.0};
  for (std::size_t i = 0; i < n; ++i) times.push_back(times.back() + (regular ? 1.0 : u(rng)));
  const double scale = T / times.back();
  for (auto& t : times) t *= scale;
  times.back() = T;
  std::vector<double> lp{std::log(100.0)};
  for (std::size_t i = 1; i < times.size(); ++i)
    lp.push_back(lp.back() + 0.4 * std::sqrt(times[i] - times[i - 1]) * nd(rng));
  fourvol::TickSeries ts;
  ts.asset_id = id;
  ts.grid = fourvol::ObservationGrid(times, T);
  ts.log_prices = lp;
  return ts;
}

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace oracle
