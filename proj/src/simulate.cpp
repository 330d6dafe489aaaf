#include "fourvol/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Cholesky>

#include "fourvol/error.hpp"
#include "fourvol/fft.hpp"

namespace fourvol {
namespace {

constexpr double kLogPrice0 = 4.605170185988092;  // log(100)

void check_mesh(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0) || !std::isfinite(T) || !std::isfinite(dt))
    throw ConfigError("T and dt must be positive");
  if (dt > T) throw ConfigError("dt must not exceed T");
}

std::size_t step_count(double T, double dt) {
  return static_cast<std::size_t>(std::llround(T / dt));
}

// Full-truncation Euler CIR with the price shocks z1 and independent z2.
std::vector<double> cir_path(const HestonParams& p, double dt, const std::vector<double>& z1,
                             const std::vector<double>& z2) {
  const std::size_t K = z1.size();
  std::vector<double> c(K + 1);
  c[0] = p.c0 < 0.0 ? p.long_run : p.c0;
  const double sq = std::sqrt(dt), rho = p.corr, rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  for (std::size_t k = 0; k < K; ++k) {
    const double cp = std::max(c[k], 0.0);
    const double dB = sq * (rho * z1[k] + rho_c * z2[k]);
    c[k + 1] = c[k] + p.mean_rev * (p.long_run - cp) * dt + p.volvol * std::sqrt(cp) * dB;
  }
  std::vector<double> out(K + 1);
  if (p.bridge) {
    const double gap = c[K] - c[0];
    for (std::size_t k = 0; k <= K; ++k)
      out[k] = std::max(0.0, c[k] - gap * static_cast<double>(k) / static_cast<double>(K));
    out[K] = out[0];
  } else {
    for (std::size_t k = 0; k <= K; ++k) out[k] = std::max(0.0, c[k]);
  }
  return out;
}

}  // namespace

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t rep, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

LatentPath simulate_heston_bridge(const HestonParams& p, double T, double dt, std::uint64_t seed,
                                  std::uint64_t rep) {
  return simulate_multi_heston_bridge({p}, Eigen::MatrixXd::Identity(1, 1), T, dt, seed, rep);
}

LatentPath simulate_multi_heston_bridge(const std::vector<HestonParams>& p,
                                        const Eigen::MatrixXd& R, double T, double dt,
                                        std::uint64_t seed, std::uint64_t rep) {
  check_mesh(T, dt);
  const int d = static_cast<int>(p.size());
  if (d < 1) throw ConfigError("need at least one asset");
  if (R.rows() != d || R.cols() != d) throw ConfigError("correlation matrix has the wrong size");
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) throw ConfigError("correlation matrix is not positive definite");
  const Eigen::MatrixXd Lc = llt.matrixL();

  const std::size_t K = step_count(T, dt);
  auto rng = make_rng(seed, rep, 0);
  std::normal_distribution<double> nd;

  std::vector<std::vector<double>> w(static_cast<std::size_t>(d), std::vector<double>(K));
  std::vector<std::vector<double>> v(static_cast<std::size_t>(d), std::vector<double>(K));
  Eigen::VectorXd u(d);
  for (std::size_t k = 0; k < K; ++k) {
    for (int j = 0; j < d; ++j) u(j) = nd(rng);
    const Eigen::VectorXd z = Lc * u;
    for (int j = 0; j < d; ++j) {
      w[static_cast<std::size_t>(j)][k] = z(j);
      v[static_cast<std::size_t>(j)][k] = nd(rng);
    }
  }

  std::vector<std::vector<double>> cj(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    cj[static_cast<std::size_t>(j)] =
        cir_path(p[static_cast<std::size_t>(j)], T / K, w[static_cast<std::size_t>(j)],
                 v[static_cast<std::size_t>(j)]);

  LatentPath out;
  out.T = T;
  out.dt = T / static_cast<double>(K);
  out.d = d;
  out.steps = K;
  out.seed = seed;
  const auto du = static_cast<std::size_t>(d);
  out.X.resize((K + 1) * du);
  out.C.resize((K + 1) * du * du);
  for (std::size_t k = 0; k <= K; ++k)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        out.C[k * du * du + static_cast<std::size_t>(b) * du + static_cast<std::size_t>(a)] =
            R(a, b) * std::sqrt(cj[static_cast<std::size_t>(a)][k] * cj[static_cast<std::size_t>(b)][k]);
  const double sq = std::sqrt(out.dt);
  for (int j = 0; j < d; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    double x = kLogPrice0;
    out.X[ju] = x;
    for (std::size_t k = 0; k < K; ++k) {
      x += p[ju].drift * out.dt + std::sqrt(cj[ju][k]) * sq * w[ju][k];
      out.X[(k + 1) * du + ju] = x;
    }
  }
  return out;
}

std::vector<double> fbm_path(double H, std::size_t K, std::mt19937_64& rng) {
  if (!(H > 0.0 && H < 1.0)) throw ConfigError("Hurst parameter must lie in (0, 1)");
  if (K < 1) throw ConfigError("fBM needs at least one step");
  std::normal_distribution<double> nd;
  auto gamma = [H](double k) {
    return 0.5 * (std::pow(std::fabs(k + 1), 2 * H) - 2 * std::pow(std::fabs(k), 2 * H) +
                  std::pow(std::fabs(k - 1), 2 * H));
  };

  std::vector<double> fgn(K);
  const std::size_t m = 2 * K;
  std::vector<std::complex<double>> lam(m);
  for (std::size_t k = 0; k <= K; ++k) lam[k] = gamma(static_cast<double>(k));
  for (std::size_t k = K + 1; k < m; ++k) lam[k] = gamma(static_cast<double>(m - k));
  fft::transform(lam, fft::Direction::forward);
  double lmax = 0.0, lmin = 0.0;
  for (const auto& l : lam) {
    lmax = std::max(lmax, l.real());
    lmin = std::min(lmin, l.real());
  }
  if (lmin >= -1e-10 * lmax) {
    std::vector<std::complex<double>> V(m);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    V[0] = std::sqrt(std::max(lam[0].real(), 0.0)) * nd(rng);
    V[K] = std::sqrt(std::max(lam[K].real(), 0.0)) * nd(rng);
    for (std::size_t k = 1; k < K; ++k) {
      const double s = std::sqrt(std::max(lam[k].real(), 0.0) / 2.0);
      const double a = nd(rng), b = nd(rng);
      V[k] = {s * a, s * b};
      V[m - k] = {s * a, -s * b};
    }
    fft::transform(V, fft::Direction::forward);
    for (std::size_t k = 0; k < K; ++k) fgn[k] = V[k].real() * norm;
  } else {
    if (K > 4096) throw ConfigError("circulant embedding failed and the grid is too large for Cholesky");
    Eigen::MatrixXd C(K, K);
    for (std::size_t a = 0; a < K; ++a)
      for (std::size_t b = 0; b < K; ++b)
        C(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            gamma(static_cast<double>(a) - static_cast<double>(b));
    Eigen::LLT<Eigen::MatrixXd> llt(C);
    Eigen::VectorXd z(K);
    for (std::size_t k = 0; k < K; ++k) z(static_cast<Eigen::Index>(k)) = nd(rng);
    const Eigen::VectorXd x = llt.matrixL() * z;
    for (std::size_t k = 0; k < K; ++k) fgn[k] = x(static_cast<Eigen::Index>(k));
  }

  const double scale = std::pow(static_cast<double>(K), -H);
  std::vector<double> out(K + 1, 0.0);
  for (std::size_t k = 0; k < K; ++k) out[k + 1] = out[k] + scale * fgn[k];
  return out;
}

LatentPath simulate_fbm_vol(const FbmVolParams& p, double T, double dt, std::uint64_t seed,
                            std::uint64_t rep) {
  check_mesh(T, dt);
  const std::size_t K = step_count(T, dt);
  auto rng = make_rng(seed, rep, 0);
  const std::vector<double> bh = fbm_path(p.H, K, rng);
  std::normal_distribution<double> nd;

  LatentPath out;
  out.T = T;
  out.dt = T / static_cast<double>(K);
  out.d = 1;
  out.steps = K;
  out.seed = seed;
  out.X.resize(K + 1);
  out.C.resize(K + 1);
  for (std::size_t k = 0; k <= K; ++k) out.C[k] = std::exp(p.a + p.b * bh[k]);
  const double sq = std::sqrt(out.dt);
  out.X[0] = kLogPrice0;
  for (std::size_t k = 0; k < K; ++k)
    out.X[k + 1] = out.X[k] + p.drift * out.dt + std::sqrt(out.C[k]) * sq * nd(rng);
  return out;
}

std::vector<std::size_t> sample_indices(const SamplingScheme& s, std::size_t steps,
                                        std::mt19937_64& rng) {
  if (s.mesh < 1) throw SamplingError("sampling mesh must be at least one step");
  std::vector<std::size_t> idx;
  switch (s.kind) {
    case SamplingKind::regular:
    case SamplingKind::offset_regular: {
      const std::size_t start = s.kind == SamplingKind::regular ? 0 : s.offset;
      for (std::size_t k = start; k <= steps; k += s.mesh) idx.push_back(k);
      break;
    }
    case SamplingKind::poisson_thinning: {
      if (!(s.keep_prob > 0.0 && s.keep_prob <= 1.0))
        throw SamplingError("keep probability must lie in (0, 1]");
      std::bernoulli_distribution keep(s.keep_prob);
      for (int attempt = 0; attempt < 1000; ++attempt) {
        idx.clear();
        idx.push_back(0);
        const std::size_t last = (steps / s.mesh) * s.mesh;
        for (std::size_t k = s.mesh; k < last; k += s.mesh)
          if (keep(rng)) idx.push_back(k);
        if (last > 0) idx.push_back(last);
        if (s.max_ratio <= 0.0 || idx.size() < 3) break;
        std::size_t lo = idx[1] - idx[0], hi = lo;
        for (std::size_t i = 2; i < idx.size(); ++i) {
          lo = std::min(lo, idx[i] - idx[i - 1]);
          hi = std::max(hi, idx[i] - idx[i - 1]);
        }
        if (static_cast<double>(hi) <= s.max_ratio * static_cast<double>(lo)) break;
        if (attempt == 999) throw SamplingError("could not meet the spacing ratio cap");
      }
      break;
    }
  }
  if (idx.size() < 2) throw SamplingError("sampling produced fewer than two observations");
  return idx;
}

std::vector<TickSeries> sample_asynchronous(const LatentPath& path,
                                            const std::vector<SamplingScheme>& schemes,
                                            std::uint64_t seed, std::uint64_t rep) {
  if (static_cast<int>(schemes.size()) != path.d)
    throw ConfigError("need one sampling scheme per asset");
  auto rng = make_rng(seed, rep, 1);
  std::vector<TickSeries> out;
  for (int j = 0; j < path.d; ++j) {
    const auto idx = sample_indices(schemes[static_cast<std::size_t>(j)], path.steps, rng);
    std::vector<double> times(idx.size()), lp(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      times[i] = path.time(idx[i]);
      lp[i] = path.x(idx[i], j);
    }
    TickSeries ts;
    ts.asset_id = "A" + std::to_string(j + 1);
    ts.grid = ObservationGrid(std::move(times), path.T);
    ts.log_prices = std::move(lp);
    out.push_back(std::move(ts));
  }
  return out;
}

double true_functional(const LatentPath& path, const FunctionalSpec& g) {
  double acc = 0.0;
  double prev = g.eval(path.c(0));
  for (std::size_t k = 1; k <= path.steps; ++k) {
    const double cur = g.eval(path.c(k));
    acc += 0.5 * (prev + cur);
    prev = cur;
  }
  return acc * path.dt;
}

SpotPath latent_to_spot(const LatentPath& path, std::size_t B) {
  SpotPath out;
  out.T = path.T;
  out.B = B;
  out.d = path.d;
  out.t_grid.resize(B);
  out.values.resize(B);
  for (std::size_t h = 0; h < B; ++h) {
    const double t = path.T * static_cast<double>(h) / static_cast<double>(B);
    out.t_grid[h] = t;
    const double pos = t / path.dt;
    const auto k = std::min(static_cast<std::size_t>(std::floor(pos)), path.steps);
    const double f = std::min(pos - static_cast<double>(k), 1.0);
    if (k >= path.steps || f < 1e-9)
      out.values[h] = path.c(k);
    else
      out.values[h] = (1.0 - f) * path.c(k) + f * path.c(k + 1);
  }
  return out;
}

}  // namespace fourvol
