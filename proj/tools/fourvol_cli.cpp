#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fourvol/error.hpp"
#include "fourvol/io.hpp"
#include "fourvol/pipeline.hpp"
#include "fourvol/simd/kernels.hpp"
#include "fourvol/trigkernels.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw fourvol::ConfigError("cannot write " + p.string());
  return out;
}

int cmd_estimate(const std::string& config_path) {
  const auto cfg = fourvol::load_config(config_path);
  fourvol::PipelineResult detail;
  const auto reports = fourvol::run_estimation(cfg, &detail);
  json j;
  j["mode"] = fourvol::mode_name(cfg.options.mode);
  j["tuning"] = fourvol::tuning_to_json(detail.tuning);
  j["advisories"] = detail.advisories;
  j["reports"] = json::array();
  for (const auto& r : reports) j["reports"].push_back(fourvol::report_to_json(r));
  const fs::path dir(cfg.output_dir);
  open_out(dir / "report.json") << j.dump(2) << '\n';
  auto spot = open_out(dir / "spot.csv");
  fourvol::write_spot_csv(spot, detail.spot);
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_simulate(const std::string& config_path) {
  const auto cfg = fourvol::load_config(config_path);
  if (!cfg.simulation) throw fourvol::ConfigError("simulate needs a simulation block");
  const auto gs = fourvol::parse_functionals(cfg.functionals);
  const fs::path dir(cfg.output_dir);
  json truth = json::array();
  for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
    const auto path = fourvol::simulate_path(*cfg.simulation, cfg.seed, rep);
    const auto ticks = fourvol::simulate_ticks(*cfg.simulation, path, cfg.seed, rep);
    const std::string stem = cfg.replications == 1 ? "ticks.csv" : "ticks_" + std::to_string(rep) + ".csv";
    auto out = open_out(dir / stem);
    fourvol::write_ticks(out, ticks);
    json t;
    t["rep"] = rep;
    t["file"] = stem;
    t["T"] = path.T;
    t["steps"] = path.steps;
    t["d"] = path.d;
    json sizes = json::array();
    for (const auto& s : ticks) sizes.push_back(s.n());
    t["sample_sizes"] = sizes;
    double cmin = INFINITY, cmax = -INFINITY;
    for (std::size_t k = 0; k <= path.steps; ++k) {
      cmin = std::min(cmin, path.c(k)(0, 0));
      cmax = std::max(cmax, path.c(k)(0, 0));
    }
    t["c11_min"] = cmin;
    t["c11_max"] = cmax;
    json vals = json::object();
    for (const auto& g : gs) vals[g.id()] = fourvol::true_functional(path, g);
    t["true_functionals"] = vals;
    truth.push_back(t);
  }
  open_out(dir / "truth.json") << truth.dump(2) << '\n';
  std::cout << truth.dump(2) << '\n';
  return 0;
}

int cmd_montecarlo(const std::string& config_path) {
  const auto cfg = fourvol::load_config(config_path);
  const auto summary = fourvol::run_montecarlo(cfg);
  const fs::path dir(cfg.output_dir);
  json j = fourvol::montecarlo_to_json(summary);
  j["mode"] = fourvol::mode_name(cfg.options.mode);
  open_out(dir / "summary.json") << j.dump(2) << '\n';
  std::vector<std::string> ids;
  for (const auto& g : fourvol::parse_functionals(cfg.functionals)) ids.push_back(g.id());
  auto samples = open_out(dir / "samples.csv");
  fourvol::write_montecarlo_samples(samples, summary, ids);
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_kernels(int order, const std::string& out_path, std::size_t points, const std::string& theta_data,
                int theta_N, std::size_t theta_B, const std::string& theta_out) {
  if (order < 0) throw fourvol::ConfigError("order must be non-negative");
  auto out = open_out(out_path);
  fourvol::write_kernel_csv(out, order, points);
  if (!theta_out.empty()) {
    if (theta_data.empty()) throw fourvol::ConfigError("--theta-out needs --theta-data");
    const auto ticks = fourvol::parse_ticks_file(theta_data);
    const auto& gj = ticks[0].grid;
    const auto& gk = ticks.size() > 1 ? ticks[1].grid : ticks[0].grid;
    const double step = std::min(gj.min_spacing(), gk.min_spacing());
    const auto th = fourvol::theta_integrals(gj, gk, gj, gk, theta_N, step, theta_B);
    auto tout = open_out(theta_out);
    fourvol::write_theta_csv(tout, th);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-Fejer spot volatility and functional estimation"};
  app.require_subcommand(1);
  std::string config;

  auto* est = app.add_subcommand("estimate", "estimate functionals from tick files");
  est->add_option("--config", config, "JSON run configuration")->required();
  auto* sim = app.add_subcommand("simulate", "simulate paths and write tick files");
  sim->add_option("--config", config, "JSON run configuration")->required();
  auto* mc = app.add_subcommand("montecarlo", "Monte Carlo validation of the studentized estimator");
  mc->add_option("--config", config, "JSON run configuration")->required();

  int order = 8;
  std::string out_path, theta_data, theta_out;
  std::size_t points = 1001, theta_B = 64;
  int theta_N = 64;
  auto* ker = app.add_subcommand("kernels", "tabulate Dirichlet/Fejer kernels and theta-integral curves");
  ker->add_option("--order", order, "kernel order q (Dirichlet) and M (Fejer)")->required();
  ker->add_option("--out", out_path, "kernel CSV")->required();
  ker->add_option("--points", points, "number of x points on [-1/2, 1/2]");
  ker->add_option("--theta-data", theta_data, "tick CSV whose first two assets give the grids");
  ker->add_option("--theta-N", theta_N, "N for the theta-integrals");
  ker->add_option("--theta-B", theta_B, "number of evaluation intervals");
  ker->add_option("--theta-out", theta_out, "theta-integral CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*est) return cmd_estimate(config);
    if (*sim) return cmd_simulate(config);
    if (*mc) return cmd_montecarlo(config);
    if (*ker) return cmd_kernels(order, out_path, points, theta_data, theta_N, theta_B, theta_out);
  } catch (const fourvol::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
