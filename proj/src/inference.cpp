#include "fourvol/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fourvol/error.hpp"
#include "fourvol/stats.hpp"

namespace fourvol {
namespace {

// Integration nodes shared by all t_h: weight, position (right end), and
// theta of every grid at the node.
struct Nodes {
  std::vector<double> pos;
  std::vector<double> weight;
  std::vector<std::vector<double>> theta;
};

Nodes exact_nodes(const std::vector<ObservationGrid>& grids, std::size_t B, double T) {
  std::vector<const ObservationGrid*> ptrs;
  for (const auto& g : grids) ptrs.push_back(&g);
  std::vector<double> cuts(B);
  for (std::size_t h = 1; h <= B; ++h) cuts[h - 1] = T * static_cast<double>(h) / B;
  Segmentation seg = segment_grids(ptrs, T, cuts);
  Nodes n;
  n.pos.assign(seg.edges.begin() + 1, seg.edges.end());
  n.weight = std::move(seg.lengths);
  n.theta = std::move(seg.theta);
  return n;
}

Nodes lattice_nodes(const std::vector<ObservationGrid>& grids, std::size_t B, double T,
                    double budget, std::size_t& stride) {
  double delta = grids[0].min_spacing();
  for (const auto& g : grids) delta = std::min(delta, g.min_spacing());
  if (!(delta > 0.0)) throw DataError("zero observation spacing");
  const auto count = static_cast<std::size_t>(std::floor(T / delta));
  const double total = static_cast<double>(B) * static_cast<double>(count);
  stride = total > budget ? static_cast<std::size_t>(std::ceil(total / budget)) : 1;
  Nodes n;
  for (std::size_t v = stride; v <= count; v += stride) {
    n.pos.push_back(static_cast<double>(v) * delta);
    n.weight.push_back(delta * static_cast<double>(stride));
  }
  n.theta.resize(grids.size());
  for (std::size_t g = 0; g < grids.size(); ++g) {
    n.theta[g].resize(n.pos.size());
    for (std::size_t i = 0; i < n.pos.size(); ++i) n.theta[g][i] = grids[g].theta_bar(n.pos[i]);
  }
  return n;
}

}  // namespace

AvarKernel avar_kernel(const std::vector<ObservationGrid>& grids, int N, std::size_t B,
                       const AvarOptions& opts) {
  if (grids.empty()) throw DataError("no observation grids");
  if (N < 1 || B < 1) throw ConfigError("N and B must be positive");
  const double T = grids[0].T();
  for (const auto& g : grids) {
    if (g.T() != T) throw ConfigError("grids have different window lengths");
    if (!(g.min_spacing() > 0.0)) throw DataError("duplicate timestamps");
  }
  const int d = static_cast<int>(grids.size());
  AvarKernel K;
  K.d = d;
  K.N = N;
  K.B = B;
  K.T = T;
  const Nodes nodes = opts.method == AvarMethod::exact
                          ? exact_nodes(grids, B, T)
                          : lattice_nodes(grids, B, T, opts.budget, K.stride);

  std::vector<DirichletPhases> phases;
  for (int g = 0; g < d; ++g) phases.emplace_back(nodes.theta[static_cast<std::size_t>(g)], N, T);
  const simd::Kernels& kern = simd::active_kernels();

  const int P = d * d;
  std::vector<std::vector<double>> a(static_cast<std::size_t>(P), std::vector<double>(nodes.pos.size()));
  K.gram.assign(B, Eigen::MatrixXd::Zero(P, P));
  std::size_t count = 0;
  for (std::size_t h = 1; h <= B; ++h) {
    const double th = T * static_cast<double>(h) / B;
    while (count < nodes.pos.size() && nodes.pos[count] <= th * (1.0 + 1e-14)) ++count;
    for (int j = 0; j < d; ++j) {
      const double xj = grids[static_cast<std::size_t>(j)].theta_bar(th);
      for (int k = 0; k < d; ++k)
        phases[static_cast<std::size_t>(k)].evaluate(xj, 0, count,
                                                     a[static_cast<std::size_t>(j * d + k)].data(), kern);
    }
    Eigen::MatrixXd& G = K.gram[h - 1];
    for (int p = 0; p < P; ++p)
      for (int q = p; q < P; ++q) {
        const double v = N * kern.weighted_dot(nodes.weight.data(), a[static_cast<std::size_t>(p)].data(),
                                               a[static_cast<std::size_t>(q)].data(), count);
        G(p, q) = v;
        G(q, p) = v;
      }
  }
  return K;
}

double avar_estimate(const SpotPath& path, const FunctionalSpec& g, const AvarKernel& kernel) {
  if (path.B != kernel.B || path.d != kernel.d)
    throw ConfigError("spot path does not match the variance kernel (B or d)");
  const int d = path.d;
  auto P = [d](int j, int k) { return j * d + k; };
  double acc = 0.0;
  for (std::size_t h = 1; h <= path.B; ++h) {
    const Eigen::MatrixXd& c = path.at(static_cast<long>(h));
    Eigen::MatrixXd dg;
    try {
      dg = g.grad(c);
    } catch (const DomainError& e) {
      throw EstimationError("gradient of " + g.id() + " failed at t=" +
                            std::to_string(path.T * static_cast<double>(h) / path.B) + ": " + e.what());
    }
    const Eigen::MatrixXd& G = kernel.gram[h - 1];
    double sh = 0.0;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        if (dg(j, k) == 0.0) continue;
        for (int l = 0; l < d; ++l)
          for (int m = 0; m < d; ++m) {
            if (dg(l, m) == 0.0) continue;
            const double tilde = G(P(j, k), P(l, m));
            const double grave = G(P(k, j), P(m, l));
            const double acute = G(P(j, k), P(m, l));
            const double check = G(P(k, j), P(l, m));
            sh += dg(j, k) * dg(l, m) *
                  (c(j, l) * c(k, m) * (tilde + grave) + c(j, m) * c(k, l) * (acute + check));
          }
      }
    acc += sh;
  }
  return acc * path.T / static_cast<double>(path.B);
}

double avar_estimate(const SpotPath& path, const FunctionalSpec& g,
                     const std::vector<ObservationGrid>& grids, int N, std::size_t B,
                     const AvarOptions& opts) {
  return avar_estimate(path, g, avar_kernel(grids, N, B, opts));
}

double async_bias_estimate(const SpotPath& path, const FunctionalSpec& g,
                           const std::vector<ObservationGrid>& grids, double kappa) {
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  const int d = path.d;
  if (static_cast<int>(grids.size()) != d) throw ConfigError("need one grid per asset");
  std::size_t n_min = grids[0].n();
  for (const auto& gr : grids) n_min = std::min(n_min, gr.n());
  const std::size_t B = path.B;
  std::vector<double> t(B + 1);
  for (std::size_t h = 0; h <= B; ++h) t[h] = path.T * static_cast<double>(h) / B;

  double acc = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      if (j == k || same_times(grids[static_cast<std::size_t>(j)], grids[static_cast<std::size_t>(k)]))
        continue;
      const auto Pc = cubic_variation_curve(grids[static_cast<std::size_t>(j)],
                                            grids[static_cast<std::size_t>(k)],
                                            static_cast<int>(n_min), t);
      for (std::size_t h = 1; h <= B; ++h) {
        const Eigen::MatrixXd& c = path.at(static_cast<long>(h));
        acc += g.grad(c)(j, k) * c(j, k) * (Pc[h] - Pc[h - 1]);
      }
    }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return -(2.0 * pi2 * std::pow(kappa, 2.5) / (3.0 * path.T * path.T)) * acc;
}

double studentize(double s_hat, double v_hat, double rate, double target) {
  if (!(v_hat > 0.0)) throw InferenceError("variance estimate is not positive", v_hat);
  return rate * (s_hat - target) / std::sqrt(v_hat);
}

std::pair<double, double> confidence_interval(double s_hat, double v_hat, double mu_hat,
                                              double rate, double alpha) {
  if (!(v_hat > 0.0)) throw InferenceError("variance estimate is not positive", v_hat);
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double center = s_hat - mu_hat / rate;
  const double half = z * std::sqrt(v_hat) / rate;
  return {center - half, center + half};
}

SpotPath shrinkage_target(const SpotPath& true_c, const std::vector<ObservationGrid>& grids, int N) {
  if (static_cast<int>(grids.size()) != true_c.d) throw ConfigError("need one grid per asset");
  SpotPath out = true_c;
  for (std::size_t h = 0; h < true_c.B; ++h) {
    const double t = true_c.t_grid[h];
    for (int j = 0; j < true_c.d; ++j)
      for (int k = 0; k < true_c.d; ++k)
        if (j != k)
          out.values[h](j, k) *= scaled_dirichlet(grids[static_cast<std::size_t>(j)],
                                                  grids[static_cast<std::size_t>(k)], N, t, t);
  }
  return out;
}

std::string rate_name(RateKind r) {
  switch (r) {
    case RateKind::sqrt_N: return "N^1/2";
    case RateKind::inv_sqrt_delta: return "Delta^-1/2";
    case RateKind::n_two_fifths: return "n^2/5";
  }
  return "";
}

}  // namespace fourvol
