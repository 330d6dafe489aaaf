#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fourvol/error.hpp"
#include "fourvol/pipeline.hpp"

namespace fourvol {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

SamplingScheme parse_sampling(const json& j, const std::string& where) {
  reject_unknown(j, {"kind", "mesh", "offset", "keep_prob", "max_ratio"}, where);
  SamplingScheme s;
  const auto kind = get_or<std::string>(j, "kind", "regular", where);
  if (kind == "regular") s.kind = SamplingKind::regular;
  else if (kind == "poisson-thinning") s.kind = SamplingKind::poisson_thinning;
  else if (kind == "offset-regular") s.kind = SamplingKind::offset_regular;
  else throw ConfigError("unknown sampling kind '" + kind + "' in " + where);
  const auto mesh = get_or<long>(j, "mesh", 1, where);
  const auto offset = get_or<long>(j, "offset", 0, where);
  if (mesh < 1) throw ConfigError("sampling mesh must be >= 1 in " + where);
  if (offset < 0) throw ConfigError("sampling offset must be >= 0 in " + where);
  s.mesh = static_cast<std::size_t>(mesh);
  s.offset = static_cast<std::size_t>(offset);
  s.keep_prob = get_or<double>(j, "keep_prob", 0.5, where);
  s.max_ratio = get_or<double>(j, "max_ratio", 0.0, where);
  if (!(s.keep_prob > 0.0 && s.keep_prob <= 1.0)) throw ConfigError("keep_prob must lie in (0, 1] in " + where);
  return s;
}

SimulationConfig parse_simulation(const json& j) {
  const std::string where = "simulation";
  reject_unknown(j, {"model", "T", "steps", "assets", "correlation", "fbm", "rv_baseline"}, where);
  SimulationConfig s;
  s.model = get_or<std::string>(j, "model", "heston", where);
  if (s.model != "heston" && s.model != "fbm") throw ConfigError("simulation model must be heston or fbm");
  s.T = get_or<double>(j, "T", 1.0 / 252.0, where);
  const long steps = get_or<long>(j, "steps", 23400, where);
  if (!(s.T > 0.0)) throw ConfigError("simulation T must be positive");
  if (steps < 2) throw ConfigError("simulation steps must be >= 2");
  s.steps = static_cast<std::size_t>(steps);
  s.rv_baseline = get_or<bool>(j, "rv_baseline", true, where);

  if (j.contains("assets")) {
    if (!j["assets"].is_array() || j["assets"].empty()) throw ConfigError("simulation.assets must be a non-empty array");
    for (std::size_t i = 0; i < j["assets"].size(); ++i) {
      const json& a = j["assets"][i];
      const std::string w = "simulation.assets[" + std::to_string(i) + "]";
      reject_unknown(a, {"mean_rev", "long_run", "volvol", "drift", "corr", "c0", "bridge", "sampling"}, w);
      AssetSimulation as;
      as.heston.mean_rev = get_or<double>(a, "mean_rev", as.heston.mean_rev, w);
      as.heston.long_run = get_or<double>(a, "long_run", as.heston.long_run, w);
      as.heston.volvol = get_or<double>(a, "volvol", as.heston.volvol, w);
      as.heston.drift = get_or<double>(a, "drift", as.heston.drift, w);
      as.heston.corr = get_or<double>(a, "corr", as.heston.corr, w);
      as.heston.c0 = get_or<double>(a, "c0", as.heston.c0, w);
      as.heston.bridge = get_or<bool>(a, "bridge", as.heston.bridge, w);
      if (std::fabs(as.heston.corr) > 1.0) throw ConfigError("corr must lie in [-1, 1] in " + w);
      if (a.contains("sampling")) as.sampling = parse_sampling(a["sampling"], w + ".sampling");
      s.assets.push_back(as);
    }
  } else {
    s.assets.push_back(AssetSimulation{});
  }
  const int d = static_cast<int>(s.assets.size());
  s.correlation = Eigen::MatrixXd::Identity(d, d);
  if (j.contains("correlation")) {
    const json& c = j["correlation"];
    if (!c.is_array() || static_cast<int>(c.size()) != d) throw ConfigError("correlation must be a d x d array");
    for (int a = 0; a < d; ++a) {
      if (!c[a].is_array() || static_cast<int>(c[a].size()) != d) throw ConfigError("correlation must be a d x d array");
      for (int b = 0; b < d; ++b) s.correlation(a, b) = c[a][b].get<double>();
    }
  }
  if (j.contains("fbm")) {
    const json& f = j["fbm"];
    reject_unknown(f, {"H", "a", "b", "drift"}, "simulation.fbm");
    s.fbm.H = get_or<double>(f, "H", s.fbm.H, "simulation.fbm");
    s.fbm.a = get_or<double>(f, "a", s.fbm.a, "simulation.fbm");
    s.fbm.b = get_or<double>(f, "b", s.fbm.b, "simulation.fbm");
    s.fbm.drift = get_or<double>(f, "drift", s.fbm.drift, "simulation.fbm");
    if (!(s.fbm.H > 0.0 && s.fbm.H < 1.0)) throw ConfigError("Hurst parameter must lie in (0, 1)");
  }
  if (s.model == "fbm" && d != 1) throw ConfigError("the fbm model is univariate");
  return s;
}

}  // namespace

Mode parse_mode(const std::string& s) {
  if (s == "general") return Mode::general;
  if (s == "synchronous-optimal") return Mode::synchronous_optimal;
  if (s == "biased-optimal-rate") return Mode::biased_optimal_rate;
  throw ConfigError("unknown mode '" + s + "' (general, synchronous-optimal, biased-optimal-rate)");
}

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::general: return "general";
    case Mode::synchronous_optimal: return "synchronous-optimal";
    case Mode::biased_optimal_rate: return "biased-optimal-rate";
  }
  return "";
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  const std::string where = "configuration";
  reject_unknown(j, {"window", "data", "simulation", "tuning", "functionals", "mode", "periodic",
                     "level", "seed", "replications", "threads", "output_dir"},
                 where);
  RunConfig cfg;
  if (j.contains("window")) {
    cfg.window = get_or<double>(j, "window", 0.0, where);
    if (!(*cfg.window > 0.0)) throw ConfigError("window must be positive");
  }
  cfg.data = get_or<std::vector<std::string>>(j, "data", {}, where);
  if (j.contains("simulation")) cfg.simulation = parse_simulation(j["simulation"]);

  EstimationOptions& o = cfg.options;
  if (j.contains("tuning")) {
    const json& t = j["tuning"];
    reject_unknown(t, {"N", "M", "B", "L", "kappa", "alpha_holder", "avar_method", "avar_budget"}, "tuning");
    const long N = get_or<long>(t, "N", 0, "tuning"), M = get_or<long>(t, "M", 0, "tuning");
    const long B = get_or<long>(t, "B", 0, "tuning");
    if (N < 0 || M < 0 || B < 0) throw ConfigError("tuning N, M, B must be non-negative (0 = automatic)");
    if (M == 1) throw ConfigError("M must be >= 2");
    o.N = static_cast<int>(N);
    o.M = static_cast<int>(M);
    o.B = static_cast<std::size_t>(B);
    o.L = get_or<long>(t, "L", -1, "tuning");
    o.kappa = get_or<double>(t, "kappa", 0.0, "tuning");
    o.alpha_holder = get_or<double>(t, "alpha_holder", 0.5, "tuning");
    const auto method = get_or<std::string>(t, "avar_method", "exact", "tuning");
    if (method == "exact") o.avar.method = AvarMethod::exact;
    else if (method == "lattice") o.avar.method = AvarMethod::lattice;
    else throw ConfigError("avar_method must be exact or lattice");
    o.avar.budget = get_or<double>(t, "avar_budget", 1e8, "tuning");
    if (o.kappa < 0.0) throw ConfigError("kappa must be positive");
    if (!(o.alpha_holder > 0.0)) throw ConfigError("alpha_holder must be positive");
    if (!(o.avar.budget >= 1.0)) throw ConfigError("avar_budget must be >= 1");
  }
  o.mode = parse_mode(get_or<std::string>(j, "mode", "general", where));
  if (o.mode == Mode::biased_optimal_rate && !(o.kappa > 0.0))
    throw ConfigError("mode biased-optimal-rate needs tuning.kappa > 0");
  bool periodic_default = false;
  if (cfg.simulation && cfg.simulation->model == "heston") {
    periodic_default = true;
    for (const auto& a : cfg.simulation->assets) periodic_default = periodic_default && a.heston.bridge;
  }
  o.periodic = get_or<bool>(j, "periodic", periodic_default, where);
  o.level = get_or<double>(j, "level", 0.95, where);
  if (!(o.level > 0.0 && o.level < 1.0)) throw ConfigError("level must lie in (0, 1)");

  cfg.functionals = get_or<std::vector<std::string>>(j, "functionals", {"power:2"}, where);
  if (cfg.functionals.empty()) throw ConfigError("functionals must not be empty");
  const auto gs = parse_functionals(cfg.functionals);
  if (cfg.simulation) {
    for (const auto& g : gs) g.check_dimension(static_cast<int>(cfg.simulation->assets.size()));
  }
  cfg.seed = get_or<std::uint64_t>(j, "seed", 1, where);
  const long reps = get_or<long>(j, "replications", 1, where);
  if (reps < 1) throw ConfigError("replications must be >= 1");
  cfg.replications = static_cast<std::size_t>(reps);
  const long threads = get_or<long>(j, "threads", 0, where);
  if (threads < 0) throw ConfigError("threads must be >= 0");
  cfg.threads = static_cast<std::size_t>(threads);
  cfg.output_dir = get_or<std::string>(j, "output_dir", ".", where);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<FunctionalSpec> parse_functionals(const std::vector<std::string>& ids) {
  std::vector<FunctionalSpec> out;
  for (const auto& id : ids) out.push_back(FunctionalSpec::parse(id));
  return out;
}

}  // namespace fourvol
