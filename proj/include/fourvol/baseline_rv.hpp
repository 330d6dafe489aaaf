#pragma once

#include <cstddef>
#include <vector>

#include "fourvol/functionals.hpp"
#include "fourvol/spectrum.hpp"
#include "fourvol/spot.hpp"

namespace fourvol {

/// floor(n^0.45), at least 1.
std::size_t default_kn(std::size_t n);

/// Forward window estimates c(tau_h) = sum_{v=h+1}^{h+k_n} delta_v^2 /
/// (tau_{h+k_n} - tau_h) for h = 0..n-k_n. Throws ConfigError unless
/// 1 <= k_n <= n/2.
std::vector<double> rv_spot_native(const TickSeries& ticks, std::size_t k_n);

/// rv_spot_native held constant between observation times, read at
/// t_b = bT/B for b = 0..B-1.
SpotPath rv_spot(const TickSeries& ticks, std::size_t k_n, std::size_t B);

/// sum_{h=k_n+1}^{n-k_n} g(c(tau_h)) (tau_h - tau_{h-1}).
double rv_plug_in(const TickSeries& ticks, const FunctionalSpec& g, std::size_t k_n);

}  // namespace fourvol
