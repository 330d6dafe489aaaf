#include "fourvol/baseline_rv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fourvol/error.hpp"

namespace fourvol {

std::size_t default_kn(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 0.45))));
}

std::vector<double> rv_spot_native(const TickSeries& ticks, std::size_t k_n) {
  ticks.validate();
  const std::size_t n = ticks.n();
  if (k_n < 1 || 2 * k_n > n)
    throw ConfigError("k_n=" + std::to_string(k_n) + " must lie in [1, n/2] with n=" + std::to_string(n));
  const auto delta = ticks.increments();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t v = 0; v < n; ++v) prefix[v + 1] = prefix[v] + delta[v] * delta[v];
  const auto& tau = ticks.grid.times();
  std::vector<double> out(n - k_n + 1);
  for (std::size_t h = 0; h + k_n <= n; ++h)
    out[h] = (prefix[h + k_n] - prefix[h]) / (tau[h + k_n] - tau[h]);
  return out;
}

SpotPath rv_spot(const TickSeries& ticks, std::size_t k_n, std::size_t B) {
  if (B < 1) throw ConfigError("B must be positive");
  const auto c = rv_spot_native(ticks, k_n);
  const auto& tau = ticks.grid.times();
  const double T = ticks.grid.T();
  SpotPath out;
  out.T = T;
  out.B = B;
  out.d = 1;
  out.t_grid.resize(B);
  out.values.resize(B);
  std::size_t h = 0;
  for (std::size_t b = 0; b < B; ++b) {
    const double t = T * static_cast<double>(b) / B;
    out.t_grid[b] = t;
    while (h + 1 < tau.size() && tau[h + 1] <= t + 1e-12 * T) ++h;
    out.values[b] = Eigen::MatrixXd::Constant(1, 1, c[std::min(h, c.size() - 1)]);
  }
  return out;
}

double rv_plug_in(const TickSeries& ticks, const FunctionalSpec& g, std::size_t k_n) {
  const auto c = rv_spot_native(ticks, k_n);
  const auto& tau = ticks.grid.times();
  const std::size_t n = ticks.n();
  const std::size_t first = k_n + 1;
  std::vector<Eigen::MatrixXd> vals;
  std::vector<double> w, t;
  for (std::size_t h = first; h <= n - k_n; ++h) {
    vals.push_back(Eigen::MatrixXd::Constant(1, 1, c[h]));
    w.push_back(tau[h] - tau[h - 1]);
    t.push_back(tau[h]);
  }
  if (vals.empty()) return 0.0;
  return weighted_functional_sum(vals, w, t, g, 0, vals.size() - 1);
}

}  // namespace fourvol
