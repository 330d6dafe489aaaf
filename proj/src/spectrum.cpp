#include "fourvol/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fourvol/error.hpp"
#include "fourvol/fft.hpp"
#include "fourvol/simd/kernels.hpp"

namespace fourvol {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kReseed = 64;
constexpr std::size_t kMaxLattice = std::size_t{1} << 24;

std::complex<double> unit_phase(double cycles) {
  const double f = cycles - std::floor(cycles);
  return {std::cos(kTwoPi * f), -std::sin(kTwoPi * f)};
}

void direct_transform(const std::vector<double>& tau, const std::vector<double>& delta,
                      double T, int S, std::vector<std::complex<double>>& pos) {
  const std::size_t n = tau.size();
  std::vector<double> pr(n), pi(n), wr(n), wi(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = tau[i] / T;
    const auto w = unit_phase(x[i]);
    wr[i] = w.real();
    wi[i] = w.imag();
  }
  const simd::Kernels& k = simd::active_kernels();
  std::vector<double> ore(kReseed), oim(kReseed);
  for (std::size_t s0 = 0; s0 <= static_cast<std::size_t>(S); s0 += kReseed) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = unit_phase(static_cast<double>(s0) * x[i]);
      pr[i] = p.real();
      pi[i] = p.imag();
    }
    const std::size_t steps = std::min(kReseed, static_cast<std::size_t>(S) + 1 - s0);
    k.phasor_block(delta.data(), pr.data(), pi.data(), wr.data(), wi.data(), n, steps,
                   ore.data(), oim.data());
    for (std::size_t j = 0; j < steps; ++j) pos[s0 + j] = {ore[j], oim[j]};
  }
}

void lattice_transform(const std::vector<double>& tau, const std::vector<double>& delta,
                       double T, std::size_t K, int S, std::vector<std::complex<double>>& pos) {
  std::vector<std::complex<double>> a(K, 0.0);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const auto m = static_cast<std::size_t>(std::llround(tau[i] * static_cast<double>(K) / T));
    a[m % K] += delta[i];
  }
  fft::transform(a, fft::Direction::forward);
  for (int s = 0; s <= S; ++s) pos[static_cast<std::size_t>(s)] = a[static_cast<std::size_t>(s) % K];
}

}  // namespace

std::vector<double> TickSeries::increments() const {
  std::vector<double> d(log_prices.size() > 0 ? log_prices.size() - 1 : 0);
  for (std::size_t h = 0; h < d.size(); ++h) d[h] = log_prices[h + 1] - log_prices[h];
  return d;
}

void TickSeries::validate() const {
  if (log_prices.size() != grid.size())
    throw DataError("asset " + asset_id + ": price count does not match grid length");
  for (double x : log_prices)
    if (!std::isfinite(x)) throw DataError("asset " + asset_id + ": non-finite log-price");
}

std::size_t detect_lattice(const std::vector<double>& times, double T) {
  if (times.size() < 2) return 0;
  double dmin = times[1] - times[0];
  for (std::size_t i = 2; i < times.size(); ++i) dmin = std::min(dmin, times[i] - times[i - 1]);
  const double k0 = std::round(T / dmin);
  if (!(k0 >= 1.0) || k0 > static_cast<double>(kMaxLattice)) return 0;
  for (int mult = 1; mult <= 8; ++mult) {
    const double K = k0 * mult;
    if (K > static_cast<double>(kMaxLattice)) break;
    bool ok = true;
    for (double t : times) {
      const double m = t * K / T;
      if (std::fabs(m - std::round(m)) > 1e-7) {
        ok = false;
        break;
      }
    }
    if (ok) return static_cast<std::size_t>(K);
  }
  return 0;
}

StieltjesTransform fourier_stieltjes(const TickSeries& ticks, double T, int s_max,
                                     TransformMethod method) {
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  const std::size_t n = ticks.n();
  const int nyquist = static_cast<int>(n / 2);
  if (s_max < 0) throw TuningError("s_max must be non-negative");
  if (s_max > nyquist)
    throw TuningError("asset " + ticks.asset_id + ": frequency " + std::to_string(s_max) +
                      " exceeds the Nyquist bound " + std::to_string(nyquist));

  const std::vector<double> delta = ticks.increments();
  const auto& times = ticks.grid.times();
  std::vector<double> tau(times.begin() + 1, times.end());

  std::vector<std::complex<double>> pos(static_cast<std::size_t>(s_max) + 1);
  std::size_t K = 0;
  if (method != TransformMethod::direct) {
    K = detect_lattice(times, T);
    if (method == TransformMethod::lattice && K == 0)
      throw ConfigError("timestamps are not on a uniform lattice");
    if (method == TransformMethod::automatic && K > 64 * n) K = 0;
  }
  if (K > 0)
    lattice_transform(tau, delta, T, K, s_max, pos);
  else
    direct_transform(tau, delta, T, s_max, pos);

  StieltjesTransform out;
  out.asset_id = ticks.asset_id;
  out.S = s_max;
  out.values.resize(2 * static_cast<std::size_t>(s_max) + 1);
  for (int s = 0; s <= s_max; ++s) {
    out.values[static_cast<std::size_t>(s_max + s)] = pos[static_cast<std::size_t>(s)];
    out.values[static_cast<std::size_t>(s_max - s)] = std::conj(pos[static_cast<std::size_t>(s)]);
  }
  return out;
}

std::vector<std::complex<double>> bohr_convolution(const StieltjesTransform& Fj,
                                                   const StieltjesTransform& Fk, int N,
                                                   int q_max) {
  if (N < 0 || q_max < 0) throw TuningError("N and q_max must be non-negative");
  if (N > Fk.S)
    throw TuningError("N=" + std::to_string(N) + " exceeds the available frequencies of asset " +
                      Fk.asset_id + " (" + std::to_string(Fk.S) + ")");
  if (q_max + N > Fj.S)
    throw TuningError("|q|+N=" + std::to_string(q_max + N) +
                      " exceeds the available frequencies of asset " + Fj.asset_id + " (" +
                      std::to_string(Fj.S) + ")");

  // Fj reversed so that Fj(q-s) runs forward as s increases.
  const std::size_t lenJ = Fj.values.size();
  std::vector<double> jr(lenJ), ji(lenJ);
  for (std::size_t i = 0; i < lenJ; ++i) {
    jr[i] = Fj.values[lenJ - 1 - i].real();
    ji[i] = Fj.values[lenJ - 1 - i].imag();
  }
  const std::size_t width = 2 * static_cast<std::size_t>(N) + 1;
  std::vector<double> kr(width), ki(width);
  for (std::size_t i = 0; i < width; ++i) {
    const auto v = Fk.at(static_cast<int>(i) - N);
    kr[i] = v.real();
    ki[i] = v.imag();
  }

  const simd::Kernels& k = simd::active_kernels();
  const double scale = 1.0 / static_cast<double>(width);
  std::vector<std::complex<double>> out(2 * static_cast<std::size_t>(q_max) + 1);
  for (int q = -q_max; q <= q_max; ++q) {
    // reversed index of Fj(q + N) is Fj.S - q - N
    const std::size_t off = static_cast<std::size_t>(Fj.S - q - N);
    double re = 0.0, im = 0.0;
    k.complex_dot(jr.data() + off, ji.data() + off, kr.data(), ki.data(), width, &re, &im);
    out[static_cast<std::size_t>(q + q_max)] = {re * scale, im * scale};
  }
  return out;
}

std::size_t SpectrumEstimate::n_min() const {
  return sample_sizes.empty() ? 0 : *std::min_element(sample_sizes.begin(), sample_sizes.end());
}

SpectrumEstimate spectrum_matrix(const std::vector<TickSeries>& ticks, double T, int N,
                                 int q_max, TransformMethod method) {
  if (ticks.empty()) throw DataError("no assets");
  if (N < 1) throw TuningError("N must be at least 1");
  SpectrumEstimate est;
  est.T = T;
  est.N = N;
  est.d = static_cast<int>(ticks.size());
  int nyq_min = -1;
  for (const auto& t : ticks) {
    t.validate();
    if (t.grid.T() != T) throw ConfigError("asset " + t.asset_id + " has a different window length");
    est.asset_ids.push_back(t.asset_id);
    est.sample_sizes.push_back(t.n());
    const int nyq = static_cast<int>(t.n() / 2);
    nyq_min = nyq_min < 0 ? nyq : std::min(nyq_min, nyq);
  }
  const int q_auto = nyq_min - N;
  if (q_auto < 0)
    throw TuningError("N=" + std::to_string(N) + " exceeds min_j floor(n_j/2)=" +
                      std::to_string(nyq_min));
  if (q_max < 0) q_max = q_auto;
  if (q_max > q_auto)
    throw TuningError("q_max=" + std::to_string(q_max) + " with N=" + std::to_string(N) +
                      " exceeds min_j floor(n_j/2)=" + std::to_string(nyq_min));
  est.Q = q_max;

  std::vector<StieltjesTransform> F;
  F.reserve(ticks.size());
  for (const auto& t : ticks) F.push_back(fourier_stieltjes(t, T, q_max + N, method));

  const int d = est.d;
  est.coeffs.assign(2 * static_cast<std::size_t>(q_max) + 1, Eigen::MatrixXcd::Zero(d, d));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      const auto conv = bohr_convolution(F[static_cast<std::size_t>(j)],
                                         F[static_cast<std::size_t>(k)], N, q_max);
      for (std::size_t i = 0; i < conv.size(); ++i) est.coeffs[i](j, k) = conv[i];
    }
  }
  return est;
}

}  // namespace fourvol
