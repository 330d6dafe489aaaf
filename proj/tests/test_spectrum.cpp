#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fourvol/error.hpp"
#include "fourvol/simulate.hpp"
#include "fourvol/spectrum.hpp"
#include "fourvol/stats.hpp"
#include "oracles.hpp"

using namespace fourvol;
using cd = std::complex<double>;

namespace {

TickSeries unit_jump(double T) {
  TickSeries t;
  t.asset_id = "U";
  t.grid = ObservationGrid({0.0, T / 3, T}, T);
  t.log_prices = {0.0, 0.0, 1.0};
  return t;
}

}  // namespace

TEST_CASE("single unit increment at T transforms to one") {
  const double T = 2.0;
  const auto F = fourier_stieltjes(unit_jump(T), T, 1, TransformMethod::direct);
  for (int s = -1; s <= 1; ++s) CHECK(std::abs(F.at(s) - cd(1.0, 0.0)) < 1e-14);
  const auto C = bohr_convolution(F, F, 0, 1);
  for (const auto& v : C) CHECK(std::abs(v - cd(1.0, 0.0)) < 1e-14);
}

TEST_CASE("nyquist guard") {
  std::mt19937_64 rng(1);
  const auto t = oracle::random_ticks(20, 1.0, rng, false);
  CHECK_NOTHROW(fourier_stieltjes(t, 1.0, 10));
  CHECK_THROWS_AS(fourier_stieltjes(t, 1.0, 11), TuningError);
  const auto F = fourier_stieltjes(t, 1.0, 10);
  CHECK_THROWS_AS(bohr_convolution(F, F, 6, 5), TuningError);
  CHECK_NOTHROW(bohr_convolution(F, F, 5, 5));
}

TEST_CASE("transform matches naive sum with conjugate symmetry") {
  std::mt19937_64 rng(2);
  for (bool regular : {false, true}) {
    const double T = 1.7;
    const auto t = oracle::random_ticks(700, T, rng, regular);
    const int S = 350;
    for (auto method : {TransformMethod::direct, TransformMethod::automatic}) {
      const auto F = fourier_stieltjes(t, T, S, method);
      double scale = 0.0;
      for (int s = -S; s <= S; ++s) scale = std::max(scale, std::abs(F.at(s)));
      for (int s = -S; s <= S; s += 7) {
        const cd ref = oracle::fs_direct(t, T, s);
        CHECK(std::abs(F.at(s) - ref) <= 1e-10 * std::max(std::abs(ref), scale));
      }
      for (int s = 0; s <= S; ++s) CHECK(std::abs(F.at(-s) - std::conj(F.at(s))) <= 1e-12 * scale);
      CHECK(F.at(0).real() == doctest::Approx(t.log_prices.back() - t.log_prices.front()).epsilon(1e-12));
    }
    if (regular) {
      CHECK(detect_lattice(t.grid.times(), T) > 0);
      const auto Fl = fourier_stieltjes(t, T, S, TransformMethod::lattice);
      for (int s = -S; s <= S; s += 5)
        CHECK(std::abs(Fl.at(s) - oracle::fs_direct(t, T, s)) <= 1e-10);
    }
  }
}

TEST_CASE("lattice path refuses off-lattice times") {
  std::mt19937_64 rng(3);
  const auto t = oracle::random_ticks(100, 1.0, rng, false);
  CHECK(detect_lattice(t.grid.times(), 1.0) == 0);
  CHECK_THROWS(fourier_stieltjes(t, 1.0, 10, TransformMethod::lattice));
}

TEST_CASE("bohr convolution matches naive sum") {
  std::mt19937_64 rng(4);
  const double T = 1.0;
  const auto a = oracle::random_ticks(300, T, rng, false, "A");
  const auto b = oracle::random_ticks(260, T, rng, false, "B");
  const int N = 60, Q = 40;
  const auto Fa = fourier_stieltjes(a, T, 150), Fb = fourier_stieltjes(b, T, 130);
  const auto C = bohr_convolution(Fa, Fb, N, Q);
  for (int q = -Q; q <= Q; q += 3) {
    const cd ref = oracle::bohr_direct(a, b, T, N, q);
    CHECK(std::abs(C[q + Q] - ref) <= 1e-10 * std::max(1e-3, std::abs(ref)));
  }
}

TEST_CASE("spectrum matrix: auto range, hermitian, d = 1 reduction") {
  std::mt19937_64 rng(5);
  const double T = 1.0;
  std::vector<TickSeries> ticks{oracle::random_ticks(400, T, rng, false, "A"),
                                oracle::random_ticks(300, T, rng, false, "B")};
  const int N = 50;
  const auto sp = spectrum_matrix(ticks, T, N);
  CHECK(sp.Q == 150 - N);
  CHECK(sp.d == 2);
  CHECK(sp.n_min() == 300);
  for (int q = 0; q <= sp.Q; ++q) CHECK((sp.at(-q) - sp.at(q).conjugate()).cwiseAbs().maxCoeff() < 1e-12);
  const auto F0 = fourier_stieltjes(ticks[0], T, 200);
  const auto d1 = bohr_convolution(F0, F0, N, sp.Q);
  for (int q = -sp.Q; q <= sp.Q; ++q) CHECK(std::abs(sp.at(q)(0, 0) - d1[q + sp.Q]) < 1e-13);
  CHECK_THROWS_AS(spectrum_matrix(ticks, T, 151), TuningError);
}

TEST_CASE("constant bivariate covariance: mean coeffs(0) near c T") {
  const double T = 1.0;
  Eigen::Matrix2d c;
  c << 0.16, 0.08, 0.08, 0.16;
  const Eigen::Matrix2d L = c.llt().matrixL();
  const std::size_t n = 2000, reps = 200;
  const int N = 200;
  std::vector<double> s11, s12;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd;
  std::vector<double> times(n + 1);
  for (std::size_t i = 0; i <= n; ++i) times[i] = T * i / n;
  for (std::size_t r = 0; r < reps; ++r) {
    std::vector<TickSeries> ticks(2);
    for (int j = 0; j < 2; ++j) {
      ticks[j].asset_id = j ? "B" : "A";
      ticks[j].grid = ObservationGrid(times, T);
      ticks[j].log_prices.assign(n + 1, 0.0);
    }
    for (std::size_t i = 1; i <= n; ++i) {
      const Eigen::Vector2d z(nd(rng), nd(rng));
      const Eigen::Vector2d dx = std::sqrt(T / n) * (L * z);
      ticks[0].log_prices[i] = ticks[0].log_prices[i - 1] + dx(0);
      ticks[1].log_prices[i] = ticks[1].log_prices[i - 1] + dx(1);
    }
    const auto sp = spectrum_matrix(ticks, T, N, 2);
    s11.push_back(sp.at(0)(0, 0).real());
    s12.push_back(sp.at(0)(0, 1).real());
  }
  const auto a = summarize(s11), b = summarize(s12);
  CHECK(std::fabs(a.mean - 0.16 * T) < 3 * a.sd / std::sqrt(double(reps)));
  CHECK(std::fabs(b.mean - 0.08 * T) < 3 * b.sd / std::sqrt(double(reps)));
}

TEST_CASE("asynchronous cross bias grows with N") {
  // Two offset regular grids on a path with constant correlation.
  HestonParams p;
  p.volvol = 0.0;
  p.c0 = 0.16;
  p.drift = 0.0;
  Eigen::Matrix2d R;
  R << 1.0, 0.5, 0.5, 1.0;
  const double T = 1.0;
  const std::size_t steps = 4000;
  SamplingScheme a{SamplingKind::regular, 4, 0, 0.5, 0.0};
  SamplingScheme b{SamplingKind::offset_regular, 4, 2, 0.5, 0.0};
  const std::size_t n = steps / 4;
  const std::vector<int> Ns{static_cast<int>(std::pow(double(n), 0.6)), static_cast<int>(std::pow(double(n), 0.8)),
                            static_cast<int>(n / 2 - 2)};
  std::vector<double> bias(Ns.size(), 0.0);
  const int reps = 60;
  for (int r = 0; r < reps; ++r) {
    const auto path = simulate_multi_heston_bridge({p, p}, R, T, T / steps, 77, r);
    const auto ticks = sample_asynchronous(path, {a, b}, 77, r);
    for (std::size_t i = 0; i < Ns.size(); ++i) {
      const auto sp = spectrum_matrix(ticks, T, Ns[i], 1);
      bias[i] += (sp.at(0)(0, 1).real() - 0.08 * T) / reps;
    }
  }
  MESSAGE("cross bias " << bias[0] << " " << bias[1] << " " << bias[2]);
  CHECK(std::fabs(bias[0]) < std::fabs(bias[1]));
  CHECK(std::fabs(bias[1]) < std::fabs(bias[2]));
}
