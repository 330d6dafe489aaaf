#include "fourvol/trigkernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fourvol/error.hpp"

namespace fourvol {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSinGuard = 1e-8;

double wrap_unit(double x) { return x - std::round(x); }

}  // namespace

double dirichlet_kernel(int q, double x) {
  x = wrap_unit(x);
  const double den = std::sin(kPi * x);
  if (std::fabs(den) < kSinGuard) return 2.0 * q + 1.0;
  return std::sin(kPi * (2.0 * q + 1.0) * x) / den;
}

double fejer_kernel(int M, double x) {
  x = wrap_unit(x);
  const double den = std::sin(kPi * x);
  if (std::fabs(den) < kSinGuard) return static_cast<double>(M);
  const double num = std::sin(kPi * M * x);
  return num * num / (M * den * den);
}

ObservationGrid::ObservationGrid(std::vector<double> times, double T)
    : times_(std::move(times)), T_(T) {
  if (!(T_ > 0.0) || !std::isfinite(T_))
    throw ConfigError("observation window length must be positive");
  if (times_.size() < 2) throw DataError("observation grid needs at least two times");
  if (times_.front() < 0.0 || times_.back() > T_)
    throw DataError("observation times must lie in [0, T]");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1]))
      throw DataError("observation times must be strictly increasing (index " +
                      std::to_string(i) + ")");
  }
}

double ObservationGrid::theta_bar(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return times_.back();
  return *it;
}

double ObservationGrid::min_spacing() const {
  double m = times_[1] - times_[0];
  for (std::size_t i = 2; i < times_.size(); ++i) m = std::min(m, times_[i] - times_[i - 1]);
  return m;
}

double ObservationGrid::max_spacing() const {
  double m = times_[1] - times_[0];
  for (std::size_t i = 2; i < times_.size(); ++i) m = std::max(m, times_[i] - times_[i - 1]);
  return m;
}

bool same_times(const ObservationGrid& a, const ObservationGrid& b) {
  return a.T() == b.T() && a.times() == b.times();
}

double scaled_dirichlet(const ObservationGrid& gridJ, const ObservationGrid& gridK,
                        int N, double t, double u) {
  if (gridJ.T() != gridK.T()) throw ConfigError("grids have different window lengths");
  const double x = (gridJ.theta_bar(t) - gridK.theta_bar(u)) / gridJ.T();
  return dirichlet_kernel(N, x) / (2.0 * N + 1.0);
}

DirichletPhases::DirichletPhases(const std::vector<double>& y, int N, double T)
    : N_(N), T_(T), s1_(y.size()), c1_(y.size()), sN_(y.size()), cN_(y.size()) {
  const double w1 = kPi / T, wN = (2.0 * N + 1.0) * kPi / T;
  for (std::size_t i = 0; i < y.size(); ++i) {
    s1_[i] = std::sin(w1 * y[i]);
    c1_[i] = std::cos(w1 * y[i]);
    sN_[i] = std::sin(wN * y[i]);
    cN_[i] = std::cos(wN * y[i]);
  }
}

void DirichletPhases::evaluate(double x, std::size_t begin, std::size_t end, double* out,
                               const simd::Kernels& k) const {
  if (end <= begin) return;
  const double w1 = kPi / T_, wN = (2.0 * N_ + 1.0) * kPi / T_;
  k.scaled_dirichlet(std::sin(w1 * x), std::cos(w1 * x), std::sin(wN * x), std::cos(wN * x),
                     view(begin), 1.0 / (2.0 * N_ + 1.0), end - begin, out);
}

Segmentation segment_grids(const std::vector<const ObservationGrid*>& grids, double t_max,
                           const std::vector<double>& extra_cuts) {
  Segmentation seg;
  std::vector<double>& e = seg.edges;
  e.push_back(0.0);
  e.push_back(t_max);
  for (const ObservationGrid* g : grids)
    for (double x : g->times())
      if (x > 0.0 && x < t_max) e.push_back(x);
  for (double x : extra_cuts)
    if (x > 0.0 && x < t_max) e.push_back(x);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());

  const std::size_t S = e.size() - 1;
  seg.lengths.resize(S);
  for (std::size_t i = 0; i < S; ++i) seg.lengths[i] = e[i + 1] - e[i];
  seg.theta.assign(grids.size(), std::vector<double>(S));
  for (std::size_t g = 0; g < grids.size(); ++g) {
    const auto& times = grids[g]->times();
    std::size_t p = 0;
    for (std::size_t i = 0; i < S; ++i) {
      const double mid = 0.5 * (e[i] + e[i + 1]);
      while (p < times.size() && times[p] < mid) ++p;
      seg.theta[g][i] = p < times.size() ? times[p] : times.back();
    }
  }
  return seg;
}

ThetaIntegrals theta_integrals(const ObservationGrid& gridJ, const ObservationGrid& gridK,
                               const ObservationGrid& gridL, const ObservationGrid& gridM,
                               int N, double quad_step, std::size_t B) {
  if (!(quad_step > 0.0)) throw ConfigError("quad_step must be positive");
  if (N < 1) throw ConfigError("N must be positive");
  const double T = gridJ.T();
  if (gridK.T() != T || gridL.T() != T || gridM.T() != T)
    throw ConfigError("grids have different window lengths");

  ThetaIntegrals out;
  const std::size_t nb = B == 0 ? 1 : B;
  out.t_grid.resize(nb + 1);
  for (std::size_t h = 0; h <= nb; ++h) out.t_grid[h] = T * static_cast<double>(h) / nb;

  std::vector<double> cuts(out.t_grid);
  const auto lattice = static_cast<std::size_t>(std::ceil(T / quad_step));
  if (lattice > 0 && lattice < (std::size_t{1} << 26))
    for (std::size_t i = 1; i < lattice; ++i) cuts.push_back(quad_step * static_cast<double>(i));

  const Segmentation seg = segment_grids({&gridJ, &gridK, &gridL, &gridM}, T, cuts);
  const std::size_t S = seg.lengths.size();
  const auto& tJ = seg.theta[0];
  const auto& tK = seg.theta[1];
  const auto& tL = seg.theta[2];
  const auto& tM = seg.theta[3];
  const DirichletPhases pJ(tJ, N, T), pK(tK, N, T), pL(tL, N, T), pM(tM, N, T);
  const simd::Kernels& k = simd::active_kernels();

  std::vector<double> a1(S), a2(S), a3(S), a4(S);
  std::vector<double> cum[4];
  for (auto& c : cum) c.assign(S + 1, 0.0);
  const double* w = seg.lengths.data();
  for (std::size_t a = 0; a < S; ++a) {
    const std::size_t m = a + 1;
    pK.evaluate(tJ[a], 0, m, a1.data(), k);  // d_jk(u, v)
    pM.evaluate(tL[a], 0, m, a2.data(), k);  // d_lm(u, v)
    pL.evaluate(tM[a], 0, m, a3.data(), k);  // d_lm(v, u)
    pJ.evaluate(tK[a], 0, m, a4.data(), k);  // d_jk(v, u)
    const double la = w[a];
    const double half = 0.5 * la * la;
    const double vals[4] = {
        la * k.weighted_dot(w, a1.data(), a2.data(), a) + half * a1[a] * a2[a],
        la * k.weighted_dot(w, a1.data(), a3.data(), a) + half * a1[a] * a3[a],
        la * k.weighted_dot(w, a4.data(), a2.data(), a) + half * a4[a] * a2[a],
        la * k.weighted_dot(w, a4.data(), a3.data(), a) + half * a4[a] * a3[a]};
    for (int c = 0; c < 4; ++c) cum[c][a + 1] = cum[c][a] + N * vals[c];
  }

  std::vector<double>* dst[4] = {&out.tilde, &out.acute, &out.check, &out.grave};
  for (int c = 0; c < 4; ++c) dst[c]->resize(nb + 1);
  std::size_t e = 0;
  for (std::size_t h = 0; h <= nb; ++h) {
    while (e < S && seg.edges[e] < out.t_grid[h]) ++e;
    for (int c = 0; c < 4; ++c) (*dst[c])[h] = cum[c][e];
  }
  return out;
}

std::vector<double> cubic_variation_curve(const ObservationGrid& gridJ,
                                          const ObservationGrid& gridK, int n_min,
                                          const std::vector<double>& t) {
  std::vector<double> out(t.size(), 0.0);
  if (t.empty()) return out;
  const double t_max = std::min(t.back(), gridJ.T());
  if (!(t_max > 0.0)) return out;
  const Segmentation seg = segment_grids({&gridJ, &gridK}, t_max);
  const double scale = static_cast<double>(n_min) * n_min;
  double acc = 0.0;
  std::size_t i = 0;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const double target = std::min(t[r], t_max);
    while (i < seg.lengths.size() && seg.edges[i + 1] <= target) {
      const double diff = seg.theta[0][i] - seg.theta[1][i];
      acc += diff * diff * seg.lengths[i];
      ++i;
    }
    double partial = 0.0;
    if (i < seg.lengths.size() && target > seg.edges[i]) {
      const double diff = seg.theta[0][i] - seg.theta[1][i];
      partial = diff * diff * (target - seg.edges[i]);
    }
    out[r] = scale * (acc + partial);
  }
  return out;
}

double cubic_variation(const ObservationGrid& gridJ, const ObservationGrid& gridK, int n_min,
                       double t) {
  if (!(t > 0.0)) return 0.0;
  return cubic_variation_curve(gridJ, gridK, n_min, {t})[0];
}

}  // namespace fourvol
