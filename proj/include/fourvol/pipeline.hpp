#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fourvol/functionals.hpp"
#include "fourvol/inference.hpp"
#include "fourvol/simulate.hpp"
#include "fourvol/spectrum.hpp"
#include "fourvol/spot.hpp"

namespace fourvol {

enum class Mode { general, synchronous_optimal, biased_optimal_rate };

Mode parse_mode(const std::string& s);
std::string mode_name(Mode m);

/// Tuning and inference settings. Zero N/M/B and negative L mean "choose
/// by the mode's rule".
struct EstimationOptions {
  Mode mode = Mode::general;
  int N = 0;
  int M = 0;
  std::size_t B = 0;
  long L = -1;
  double kappa = 0.0;
  double alpha_holder = 0.5;
  bool periodic = false;
  double level = 0.95;
  AvarOptions avar;
  bool compute_variance = true;
};

bool grids_synchronous(const std::vector<TickSeries>& ticks);

/// Largest spacing over all grids.
double max_spacing(const std::vector<TickSeries>& ticks);

/// Fill in defaults for the mode and validate. Throws ConfigError when the
/// synchronous-optimal mode is asked for on asynchronous data and
/// TuningError on frequency violations.
TuningParams resolve_tuning(const EstimationOptions& opt, std::size_t n_min, bool synchronous,
                            std::vector<std::string>* advisories = nullptr);

struct PipelineResult {
  TuningParams tuning;
  std::vector<std::string> advisories;
  SpectrumEstimate spectrum;
  SpotPath raw;
  SpotPath spot;
  std::vector<EstimateReport> reports;
};

/// Transform, convolve, invert, condition, and report each functional.
PipelineResult estimate(const std::vector<TickSeries>& ticks, double T,
                        const std::vector<FunctionalSpec>& functionals,
                        const EstimationOptions& opt);

/// Simulation block of a run configuration.
struct AssetSimulation {
  HestonParams heston;
  SamplingScheme sampling;
};

struct SimulationConfig {
  std::string model = "heston";  // heston | fbm
  double T = 1.0 / 252.0;
  std::size_t steps = 23400;
  std::vector<AssetSimulation> assets;
  Eigen::MatrixXd correlation;
  FbmVolParams fbm;
  bool rv_baseline = true;
};

struct RunConfig {
  std::optional<double> window;
  std::vector<std::string> data;
  std::optional<SimulationConfig> simulation;
  EstimationOptions options;
  std::vector<std::string> functionals;
  std::uint64_t seed = 1;
  std::size_t replications = 1;
  std::size_t threads = 0;
  std::string output_dir = ".";
};

/// Parse and validate a JSON configuration; unknown keys are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

std::vector<FunctionalSpec> parse_functionals(const std::vector<std::string>& ids);

/// Simulate one replication and sample it.
LatentPath simulate_path(const SimulationConfig& sim, std::uint64_t seed, std::uint64_t rep);
std::vector<TickSeries> simulate_ticks(const SimulationConfig& sim, const LatentPath& path,
                                       std::uint64_t seed, std::uint64_t rep);

/// Reports for each functional on the configured data files.
std::vector<EstimateReport> run_estimation(const RunConfig& cfg, PipelineResult* detail = nullptr);

struct ReplicationOutcome {
  std::size_t rep = 0;
  bool ok = false;
  std::string error;
  std::vector<double> s_true;
  std::vector<EstimateReport> reports;
  std::vector<double> stat;     // studentized, NaN on failure
  std::vector<int> covered;     // 1/0, -1 when no interval
  std::vector<double> rv_stat;  // univariate RV baseline, NaN if absent
};

struct FunctionalSummary {
  std::string functional;
  std::size_t used = 0;
  std::size_t failures = 0;
  double mean = 0.0;
  double sd = 0.0;
  double skew = 0.0;
  double coverage = 0.0;
  double ks_statistic = 0.0;
  double ks_p = 0.0;
  bool degenerate = false;
  double rv_mean = 0.0;
  double rv_sd = 0.0;
  std::size_t rv_used = 0;
};

struct MonteCarloSummary {
  std::vector<ReplicationOutcome> outcomes;  // sorted by replication index
  std::vector<FunctionalSummary> functionals;
  std::size_t failed_replications = 0;
};

/// One replication: simulate, sample, estimate, studentize against truth.
ReplicationOutcome run_replication(const RunConfig& cfg, const std::vector<FunctionalSpec>& gs,
                                   std::size_t rep);

/// Replications run on a thread pool; failures are counted, not fatal.
MonteCarloSummary run_montecarlo(const RunConfig& cfg);

}  // namespace fourvol
