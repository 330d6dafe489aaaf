#include "fourvol/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "fourvol/baseline_rv.hpp"
#include "fourvol/error.hpp"
#include "fourvol/io.hpp"
#include "fourvol/stats.hpp"

namespace fourvol {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int floor_pow(std::size_t n, double e) {
  return static_cast<int>(std::floor(std::pow(static_cast<double>(n), e)));
}

}  // namespace

bool grids_synchronous(const std::vector<TickSeries>& ticks) {
  for (std::size_t j = 1; j < ticks.size(); ++j)
    if (!same_times(ticks[0].grid, ticks[j].grid)) return false;
  return true;
}

double max_spacing(const std::vector<TickSeries>& ticks) {
  double m = 0.0;
  for (const auto& t : ticks) m = std::max(m, t.grid.max_spacing());
  return m;
}

TuningParams resolve_tuning(const EstimationOptions& opt, std::size_t n_min, bool synchronous,
                            std::vector<std::string>* advisories) {
  TuningParams tp;
  tp.kappa = opt.kappa;
  tp.alpha_holder = opt.alpha_holder;
  tp.M = opt.M > 0 ? opt.M : std::max(2, floor_pow(n_min, 0.3));
  const int cap = static_cast<int>(n_min / 2) - tp.M + 1;
  switch (opt.mode) {
    case Mode::general:
      tp.N = opt.N > 0 ? opt.N : std::min(floor_pow(n_min, 0.75), cap);
      break;
    case Mode::synchronous_optimal:
      if (!synchronous)
        throw ConfigError(
            "synchronous-optimal mode refused: the grids are asynchronous (curse of asynchronicity). "
            "Use mode general, or biased-optimal-rate with kappa");
      tp.N = opt.N > 0 ? opt.N : cap;
      break;
    case Mode::biased_optimal_rate:
      if (!(opt.kappa > 0.0)) throw ConfigError("biased-optimal-rate mode needs kappa > 0");
      tp.N = opt.N > 0 ? opt.N
                       : std::min(static_cast<int>(std::floor(opt.kappa * std::pow(static_cast<double>(n_min), 0.8))),
                                  cap);
      break;
  }
  tp.B = opt.B > 0 ? opt.B : default_B(tp.N, tp.M);
  tp.L = opt.L >= 0 ? static_cast<std::size_t>(opt.L) : default_L(tp.B, tp.M, opt.periodic);
  const TuningCheck chk = validate_tuning(tp, n_min, opt.periodic);
  if (advisories) *advisories = chk.advisories;
  return tp;
}

PipelineResult estimate(const std::vector<TickSeries>& ticks, double T,
                        const std::vector<FunctionalSpec>& functionals, const EstimationOptions& opt) {
  if (ticks.empty()) throw DataError("no assets");
  const int d = static_cast<int>(ticks.size());
  for (const auto& g : functionals) g.check_dimension(d);
  std::size_t n_min = ticks[0].n();
  for (const auto& t : ticks) n_min = std::min(n_min, t.n());
  const bool sync = grids_synchronous(ticks);

  PipelineResult res;
  res.tuning = resolve_tuning(opt, n_min, sync, &res.advisories);
  const TuningParams& tp = res.tuning;
  res.spectrum = spectrum_matrix(ticks, T, tp.N, tp.M - 1);
  res.raw = fejer_inversion(res.spectrum, tp.M, tp.B);
  res.spot = condition_spot(res.raw);

  std::vector<ObservationGrid> grids;
  for (const auto& t : ticks) grids.push_back(t.grid);
  AvarKernel kernel;
  if (opt.compute_variance) kernel = avar_kernel(grids, tp.N, tp.B, opt.avar);

  const double N = tp.N;
  const double delta = max_spacing(ticks);
  for (const auto& g : functionals) {
    EstimateReport r;
    r.functional = g.id();
    r.level = opt.level;
    r.s_hat = plug_in_estimate(res.spot, g, tp.L);
    r.diagnostics["N"] = tp.N;
    r.diagnostics["M"] = tp.M;
    r.diagnostics["B"] = static_cast<double>(tp.B);
    r.diagnostics["L"] = static_cast<double>(tp.L);
    r.diagnostics["n_min"] = static_cast<double>(n_min);
    r.diagnostics["synchronous"] = sync ? 1.0 : 0.0;
    r.diagnostics["max_imag_residue"] = res.raw.max_imag_residue;
    r.diagnostics["t_lo"] = T * static_cast<double>(1 + tp.L) / static_cast<double>(tp.B);
    r.diagnostics["t_hi"] = T * static_cast<double>(tp.B - tp.L) / static_cast<double>(tp.B);
    r.notes = res.advisories;
    if (!opt.compute_variance) {
      r.v_hat_raw = kNaN;
      r.v_hat = kNaN;
      res.reports.push_back(r);
      continue;
    }
    const double v_native = avar_estimate(res.spot, g, kernel);
    r.diagnostics["v_hat_sqrtN_scale"] = v_native;
    switch (opt.mode) {
      case Mode::general:
        r.rate_kind = RateKind::sqrt_N;
        r.rate = std::sqrt(N);
        r.v_hat_raw = v_native;
        break;
      case Mode::synchronous_optimal:
        r.rate_kind = RateKind::inv_sqrt_delta;
        r.rate = 1.0 / std::sqrt(delta);
        r.v_hat_raw = v_native / (N * delta);
        r.diagnostics["delta"] = delta;
        break;
      case Mode::biased_optimal_rate: {
        r.rate_kind = RateKind::n_two_fifths;
        r.rate = std::pow(static_cast<double>(n_min), 0.4);
        r.v_hat_raw = v_native * r.rate * r.rate / N;
        const double mu_native = async_bias_estimate(res.spot, g, grids, tp.kappa);
        r.diagnostics["mu_hat_sqrtN_scale"] = mu_native;
        r.has_mu = true;
        r.mu_hat = r.rate * mu_native / std::sqrt(N);
        break;
      }
    }
    r.v_hat = std::max(0.0, r.v_hat_raw);
    if (r.v_hat_raw > 0.0) {
      const auto ci = confidence_interval(r.s_hat, r.v_hat_raw, r.has_mu ? r.mu_hat : 0.0, r.rate,
                                          1.0 - opt.level);
      r.ci_valid = true;
      r.ci_lo = ci.first;
      r.ci_hi = ci.second;
    } else {
      r.notes.push_back("variance estimate is not positive; no interval");
    }
    res.reports.push_back(r);
  }
  return res;
}

LatentPath simulate_path(const SimulationConfig& sim, std::uint64_t seed, std::uint64_t rep) {
  const double dt = sim.T / static_cast<double>(sim.steps);
  if (sim.model == "fbm") return simulate_fbm_vol(sim.fbm, sim.T, dt, seed, rep);
  std::vector<HestonParams> hp;
  for (const auto& a : sim.assets) hp.push_back(a.heston);
  Eigen::MatrixXd R = sim.correlation;
  if (R.rows() != static_cast<Eigen::Index>(hp.size()))
    R = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(hp.size()), static_cast<Eigen::Index>(hp.size()));
  return simulate_multi_heston_bridge(hp, R, sim.T, dt, seed, rep);
}

std::vector<TickSeries> simulate_ticks(const SimulationConfig& sim, const LatentPath& path,
                                       std::uint64_t seed, std::uint64_t rep) {
  std::vector<SamplingScheme> schemes;
  for (int j = 0; j < path.d; ++j)
    schemes.push_back(static_cast<std::size_t>(j) < sim.assets.size() ? sim.assets[static_cast<std::size_t>(j)].sampling
                                                                       : SamplingScheme{});
  return sample_asynchronous(path, schemes, seed, rep);
}

std::vector<EstimateReport> run_estimation(const RunConfig& cfg, PipelineResult* detail) {
  if (cfg.data.empty()) throw ConfigError("estimate needs at least one data file");
  std::vector<TickSeries> ticks;
  for (const auto& f : cfg.data) {
    auto part = parse_ticks_file(f, cfg.window);
    for (auto& t : part) ticks.push_back(std::move(t));
  }
  double T = cfg.window ? *cfg.window : 0.0;
  if (!cfg.window)
    for (const auto& t : ticks) T = std::max(T, t.grid.T());
  for (auto& t : ticks)
    if (t.grid.T() != T) t.grid = ObservationGrid(t.grid.times(), T);
  for (std::size_t a = 0; a < ticks.size(); ++a)
    for (std::size_t b = a + 1; b < ticks.size(); ++b)
      if (ticks[a].asset_id == ticks[b].asset_id) throw DataError("asset " + ticks[a].asset_id + " appears twice");
  auto res = estimate(ticks, T, parse_functionals(cfg.functionals), cfg.options);
  auto reports = res.reports;
  if (detail) *detail = std::move(res);
  return reports;
}

ReplicationOutcome run_replication(const RunConfig& cfg, const std::vector<FunctionalSpec>& gs,
                                   std::size_t rep) {
  ReplicationOutcome o;
  o.rep = rep;
  o.stat.assign(gs.size(), kNaN);
  o.covered.assign(gs.size(), -1);
  o.rv_stat.assign(gs.size(), kNaN);
  try {
    const SimulationConfig& sim = *cfg.simulation;
    const LatentPath path = simulate_path(sim, cfg.seed, rep);
    const auto ticks = simulate_ticks(sim, path, cfg.seed, rep);
    for (const auto& g : gs) o.s_true.push_back(true_functional(path, g));
    const auto res = estimate(ticks, path.T, gs, cfg.options);
    o.reports = res.reports;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      const auto& r = res.reports[i];
      if (r.v_hat_raw > 0.0) {
        const double center = r.s_hat - (r.has_mu ? r.mu_hat / r.rate : 0.0);
        o.stat[i] = studentize(center, r.v_hat_raw, r.rate, o.s_true[i]);
        o.covered[i] = (r.ci_lo <= o.s_true[i] && o.s_true[i] <= r.ci_hi) ? 1 : 0;
      }
    }
    if (sim.rv_baseline && path.d == 1) {
      const TickSeries& t = ticks[0];
      const std::size_t kn = default_kn(t.n());
      const auto c = rv_spot_native(t, kn);
      const auto& tau = t.grid.times();
      const double delta = t.grid.max_spacing();
      for (std::size_t i = 0; i < gs.size(); ++i) {
        try {
          const double s = rv_plug_in(t, gs[i], kn);
          double v = 0.0;
          for (std::size_t h = kn + 1; h <= t.n() - kn; ++h) {
            const Eigen::MatrixXd ch = Eigen::MatrixXd::Constant(1, 1, c[h]);
            const double z = gs[i].grad(ch)(0, 0) * c[h];
            v += 2.0 * z * z * (tau[h] - tau[h - 1]);
          }
          if (v > 0.0) o.rv_stat[i] = (s - o.s_true[i]) / std::sqrt(delta * v);
        } catch (const Error&) {
        }
      }
    }
    o.ok = true;
  } catch (const std::exception& e) {
    o.ok = false;
    o.error = e.what();
  }
  return o;
}

MonteCarloSummary run_montecarlo(const RunConfig& cfg) {
  if (!cfg.simulation) throw ConfigError("montecarlo needs a simulation block");
  const auto gs = parse_functionals(cfg.functionals);
  for (const auto& g : gs) g.check_dimension(static_cast<int>(cfg.simulation->assets.size()));
  MonteCarloSummary s;
  s.outcomes.resize(cfg.replications);
  std::size_t threads = cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cfg.replications);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < cfg.replications; r = next++) s.outcomes[r] = run_replication(cfg, gs, r);
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& o : s.outcomes)
    if (!o.ok) ++s.failed_replications;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    FunctionalSummary f;
    f.functional = gs[i].id();
    std::vector<double> stats, rv;
    std::size_t cov = 0, cov_n = 0;
    for (const auto& o : s.outcomes) {
      if (!o.ok || !std::isfinite(o.stat[i])) {
        ++f.failures;
        continue;
      }
      stats.push_back(o.stat[i]);
      if (o.covered[i] >= 0) {
        ++cov_n;
        cov += static_cast<std::size_t>(o.covered[i]);
      }
      if (std::isfinite(o.rv_stat[i])) rv.push_back(o.rv_stat[i]);
    }
    f.used = stats.size();
    const auto sm = summarize(stats);
    f.mean = sm.mean;
    f.sd = sm.sd;
    f.skew = sm.skew;
    f.coverage = cov_n ? static_cast<double>(cov) / static_cast<double>(cov_n) : kNaN;
    const auto ks = ks_test_normal(stats);
    f.ks_statistic = ks.statistic;
    f.ks_p = ks.p_value;
    f.degenerate = stats.size() < 2 || !(sm.sd > 1e-12) || !std::isfinite(sm.sd);
    const auto rs = summarize(rv);
    f.rv_used = rv.size();
    f.rv_mean = rs.mean;
    f.rv_sd = rs.sd;
    s.functionals.push_back(f);
  }
  return s;
}

}  // namespace fourvol
