#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fourvol/baseline_rv.hpp"
#include "fourvol/error.hpp"
#include "fourvol/simulate.hpp"
#include "fourvol/spectrum.hpp"
#include "fourvol/spot.hpp"
#include "oracles.hpp"

using namespace fourvol;
using cd = std::complex<double>;

namespace {

SpectrumEstimate random_hermitian(int d, int Q, double T, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  SpectrumEstimate s;
  s.T = T;
  s.N = 1;
  s.Q = Q;
  s.d = d;
  s.coeffs.assign(2 * Q + 1, Eigen::MatrixXcd::Zero(d, d));
  for (int q = 0; q <= Q; ++q) {
    Eigen::MatrixXcd m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = cd(nd(rng), q == 0 ? 0.0 : nd(rng));
    s.coeffs[Q + q] = m;
    s.coeffs[Q - q] = m.conjugate();
  }
  for (int i = 0; i < d; ++i) s.asset_ids.push_back("A" + std::to_string(i + 1));
  s.sample_sizes.assign(d, 1000);
  return s;
}

SpectrumEstimate dc_only(double v, double T, int Q) {
  SpectrumEstimate s;
  s.T = T;
  s.N = 1;
  s.Q = Q;
  s.d = 1;
  s.coeffs.assign(2 * Q + 1, Eigen::MatrixXcd::Zero(1, 1));
  s.coeffs[Q](0, 0) = v * T;
  s.asset_ids = {"A1"};
  s.sample_sizes = {100};
  return s;
}

}  // namespace

TEST_CASE("default B") {
  CHECK(default_B(1891, 20) == 512);
  CHECK(default_B(1, 2) == 8);
  CHECK(default_B(100, 50) == 256);
}

TEST_CASE("dc-only spectrum inverts to a constant path") {
  const auto p = fejer_inversion(dc_only(0.16, 3.0, 10), 8, 64);
  CHECK(p.B == 64);
  for (std::size_t h = 0; h < p.B; ++h) CHECK(p.values[h](0, 0) == doctest::Approx(0.16).epsilon(1e-13));
  CHECK(p.t_grid[1] == doctest::Approx(3.0 / 64));
}

TEST_CASE("inversion errors") {
  const auto s = dc_only(0.16, 1.0, 10);
  CHECK_THROWS_AS(fejer_inversion(s, 12, 64), TuningError);
  CHECK_THROWS_AS(fejer_inversion(s, 8, 14), ConfigError);
  CHECK_NOTHROW(fejer_inversion(s, 8, 15));
}

TEST_CASE("zero-padded inversion equals direct series, real and periodic") {
  std::mt19937_64 rng(7);
  const double T = 1.3;
  const int M = 33;
  const auto s = random_hermitian(2, 40, T, rng);
  const auto p = fejer_inversion(s, M, 256);
  CHECK(p.max_imag_residue < 1e-10);
  std::vector<cd> coef(2 * M - 1);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      for (int q = -(M - 1); q <= M - 1; ++q) coef[q + M - 1] = s.at(q)(j, k);
      for (std::size_t h = 0; h < p.B; h += 5) {
        const double ref = oracle::fejer_direct(coef, M, T, p.t_grid[h]);
        CHECK(std::fabs(p.values[h](j, k) - ref) <= 1e-10 * std::max(1.0, std::fabs(ref)));
      }
    }
  const auto a = fejer_series_at(s, M, 0.0), b = fejer_series_at(s, M, T);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p.at(static_cast<long>(p.B)) - p.values[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p.values[0] - a.real()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("conditioning") {
  Eigen::Matrix2d psd;
  psd << 0.16, 0.05, 0.05, 0.1;
  CHECK((condition_matrix(psd, 1e-8) - psd).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::Matrix2d ind;
  ind << 0.16, 0.2, 0.2, 0.16;
  const auto c = condition_matrix(ind, 1e-8);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(ind);
  Eigen::Vector2d ev = es.eigenvalues().cwiseMax(1e-8);
  const Eigen::Matrix2d ref = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  CHECK((c - ref).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(c);
  CHECK(es2.eigenvalues().minCoeff() == doctest::Approx(1e-8).epsilon(1e-6));

  Eigen::Matrix2d asym;
  asym << 0.16, 0.07, 0.03, 0.1;
  const auto s = condition_matrix(asym, 1e-8);
  CHECK((s - 0.5 * (asym + asym.transpose())).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(s(0, 1) == s(1, 0));
}

TEST_CASE("conditioned random paths are symmetric PSD") {
  std::mt19937_64 rng(8);
  const auto s = random_hermitian(3, 20, 1.0, rng);
  const auto p = condition_spot(fejer_inversion(s, 10, 64));
  CHECK(p.conditioned);
  for (const auto& m : p.values) {
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("constant-vol synchronous spot within 0.05 on 90% of replications") {
  HestonParams p;
  p.volvol = 0.0;
  p.c0 = 0.16;
  const double T = 1.0 / 252;
  const std::size_t n = 23400;
  const int N = static_cast<int>(std::pow(double(n), 0.75)), M = static_cast<int>(std::pow(double(n), 0.3));
  int good = 0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const auto path = simulate_heston_bridge(p, T, T / n, 9, r);
    const auto ticks = sample_asynchronous(path, {SamplingScheme{}}, 9, r);
    const auto sp = spectrum_matrix(ticks, T, N, M - 1);
    const auto c = fejer_inversion(sp, M, default_B(N, M));
    double sup = 0.0;
    for (const auto& m : c.values) sup = std::max(sup, std::fabs(m(0, 0) - 0.16));
    good += sup < 0.05;
  }
  MESSAGE("good replications " << good);
  CHECK(good >= 90);
}

TEST_CASE("total variation") {
  const auto p = fejer_inversion(dc_only(0.2, 1.0, 4), 3, 16);
  CHECK(total_variation(p) == doctest::Approx(0.0).epsilon(1e-12));
}
