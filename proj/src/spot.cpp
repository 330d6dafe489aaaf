#include "fourvol/spot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "fourvol/error.hpp"
#include "fourvol/fft.hpp"

namespace fourvol {

const Eigen::MatrixXd& SpotPath::at(long h) const {
  const long b = static_cast<long>(B);
  long i = h % b;
  if (i < 0) i += b;
  return values[static_cast<std::size_t>(i)];
}

std::size_t default_B(int N, int M) {
  const auto lo = std::max<std::size_t>(4 * static_cast<std::size_t>(std::max(M, 1)),
                                        8 * static_cast<std::size_t>(std::ceil(std::sqrt(std::max(N, 1)))));
  std::size_t B = 1;
  while (B < lo) B <<= 1;
  return B;
}

namespace {

void check_inversion_args(const SpectrumEstimate& spec, int M) {
  if (M < 1) throw TuningError("M must be at least 1");
  if (M - 1 > spec.Q)
    throw TuningError("M=" + std::to_string(M) + " needs frequencies up to " +
                      std::to_string(M - 1) + " but the spectrum holds " + std::to_string(spec.Q) +
                      " (M <= min_j floor(n_j/2) - N + 1)");
}

}  // namespace

SpotPath fejer_inversion(const SpectrumEstimate& spec, int M, std::size_t B) {
  check_inversion_args(spec, M);
  if (B < 2 * static_cast<std::size_t>(M) - 1)
    throw ConfigError("B=" + std::to_string(B) + " is below 2M-1=" + std::to_string(2 * M - 1));

  const int d = spec.d;
  SpotPath out;
  out.T = spec.T;
  out.B = B;
  out.d = d;
  out.N = spec.N;
  out.M = M;
  out.t_grid.resize(B);
  for (std::size_t h = 0; h < B; ++h) out.t_grid[h] = spec.T * static_cast<double>(h) / B;
  out.values.assign(B, Eigen::MatrixXd::Zero(d, d));

  std::vector<std::complex<double>> buf(B);
  const auto bl = static_cast<long>(B);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      std::fill(buf.begin(), buf.end(), std::complex<double>(0.0));
      for (int q = -(M - 1); q <= M - 1; ++q) {
        const double w = 1.0 - std::abs(q) / static_cast<double>(M);
        const long idx = ((q % bl) + bl) % bl;
        buf[static_cast<std::size_t>(idx)] += w * spec.at(q)(j, k);
      }
      fft::transform(buf, fft::Direction::backward);
      for (std::size_t h = 0; h < B; ++h) {
        out.values[h](j, k) = buf[h].real() / spec.T;
        out.max_imag_residue = std::max(out.max_imag_residue, std::fabs(buf[h].imag() / spec.T));
      }
    }
  }
  return out;
}

Eigen::MatrixXcd fejer_series_at(const SpectrumEstimate& spec, int M, double t) {
  check_inversion_args(spec, M);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(spec.d, spec.d);
  for (int q = -(M - 1); q <= M - 1; ++q) {
    const double w = 1.0 - std::abs(q) / static_cast<double>(M);
    const double ang = 2.0 * std::numbers::pi * q * t / spec.T;
    acc += (w * std::complex<double>(std::cos(ang), std::sin(ang))) * spec.at(q);
  }
  return acc / spec.T;
}

Eigen::MatrixXd condition_matrix(const Eigen::MatrixXd& A, double eps) {
  const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
  if (eps <= 0.0) {
    const double scale = std::fabs(S.trace()) / static_cast<double>(S.rows());
    eps = scale > 0.0 ? 1e-8 * scale : 1e-300;
  }
  if (S.rows() == 1) return Eigen::MatrixXd::Constant(1, 1, std::max(S(0, 0), eps));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  Eigen::VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() >= eps) return S;
  lam = lam.cwiseMax(eps);
  const Eigen::MatrixXd R = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (R + R.transpose());
}

SpotPath condition_spot(const SpotPath& path, double eps) {
  SpotPath out = path;
  for (auto& v : out.values) v = condition_matrix(v, eps);
  out.conditioned = true;
  return out;
}

double total_variation(const SpotPath& path, int j, int k) {
  double tv = 0.0;
  for (std::size_t h = 1; h < path.values.size(); ++h)
    tv += std::fabs(path.values[h](j, k) - path.values[h - 1](j, k));
  return tv;
}

}  // namespace fourvol
