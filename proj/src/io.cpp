#include "fourvol/io.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "fourvol/error.hpp"
#include "fourvol/trigkernels.hpp"

namespace fourvol {
namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

// YYYY-MM-DD[T ]HH:MM:SS[.fff] as seconds since the epoch (UTC, no zone).
bool parse_iso(const std::string& s, double& out) {
  int Y, Mo, D, h, mi;
  double sec;
  char sep;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%lf", &Y, &Mo, &D, &sep, &h, &mi, &sec) != 7) return false;
  if (sep != 'T' && sep != ' ') return false;
  std::tm tm{};
  tm.tm_year = Y - 1900;
  tm.tm_mon = Mo - 1;
  tm.tm_mday = D;
  out = static_cast<double>(timegm(&tm)) + h * 3600.0 + mi * 60.0 + sec;
  return true;
}

struct Row {
  double t;
  double price;
  std::size_t line;
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::vector<TickSeries> parse_ticks(std::istream& in, std::optional<double> T) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw DataError("empty tick file");
  ++lineno;
  if (trim(line) != "asset_id,timestamp,price")
    throw DataError("line 1: expected header asset_id,timestamp,price");

  std::vector<std::string> order;
  std::map<std::string, std::vector<Row>> rows;
  std::optional<bool> iso;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string id, ts, ps;
    if (!std::getline(ss, id, ',') || !std::getline(ss, ts, ',') || !std::getline(ss, ps))
      throw DataError("line " + std::to_string(lineno) + ": expected three fields");
    id = trim(id);
    ts = trim(ts);
    ps = trim(ps);
    double t = 0.0, p = 0.0;
    if (!iso) iso = !parse_double(ts, t);
    const bool ok = *iso ? parse_iso(ts, t) : parse_double(ts, t);
    if (!ok || !std::isfinite(t)) throw DataError("line " + std::to_string(lineno) + ": bad timestamp '" + ts + "'");
    if (!parse_double(ps, p) || !std::isfinite(p))
      throw DataError("line " + std::to_string(lineno) + ": bad price '" + ps + "'");
    if (!(p > 0.0)) throw DataError("line " + std::to_string(lineno) + ": price must be positive");
    if (id.empty()) throw DataError("line " + std::to_string(lineno) + ": empty asset_id");
    auto& v = rows[id];
    if (v.empty()) order.push_back(id);
    if (!v.empty()) {
      if (t == v.back().t)
        throw DataError("line " + std::to_string(lineno) + ": duplicate timestamp for asset " + id);
      if (t < v.back().t)
        throw DataError("line " + std::to_string(lineno) + ": timestamps not increasing for asset " + id);
    }
    v.push_back({t, p, lineno});
  }
  if (rows.empty()) throw DataError("tick file has no observations");

  double origin = 0.0;
  if (*iso) {
    origin = std::numeric_limits<double>::infinity();
    for (const auto& kv : rows) origin = std::min(origin, kv.second.front().t);
  }
  double tmax = 0.0;
  for (const auto& kv : rows) tmax = std::max(tmax, kv.second.back().t - origin);
  const double window = T ? *T : tmax;

  std::vector<TickSeries> out;
  for (const auto& id : order) {
    const auto& v = rows[id];
    if (v.size() < 2) throw DataError("asset " + id + " has fewer than two observations");
    std::vector<double> times, lp;
    for (const auto& r : v) {
      const double t = r.t - origin;
      if (t < 0.0 || t > window)
        throw DataError("line " + std::to_string(r.line) + ": timestamp outside [0, T]");
      times.push_back(t);
      lp.push_back(std::log(r.price));
    }
    TickSeries ts;
    ts.asset_id = id;
    ts.grid = ObservationGrid(std::move(times), window);
    ts.log_prices = std::move(lp);
    out.push_back(std::move(ts));
  }
  return out;
}

std::vector<TickSeries> parse_ticks_file(const std::string& path, std::optional<double> T) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open tick file " + path);
  return parse_ticks(in, T);
}

void write_ticks(std::ostream& out, const std::vector<TickSeries>& ticks) {
  out << "asset_id,timestamp,price\n";
  for (const auto& t : ticks)
    for (std::size_t i = 0; i < t.grid.size(); ++i)
      out << t.asset_id << ',' << num(t.grid.times()[i]) << ',' << num(std::exp(t.log_prices[i])) << '\n';
}

void write_spot_csv(std::ostream& out, const SpotPath& path) {
  out << "t";
  for (int j = 0; j < path.d; ++j)
    for (int k = 0; k < path.d; ++k) out << ",c_" << j + 1 << '_' << k + 1;
  out << '\n';
  for (std::size_t h = 0; h < path.B; ++h) {
    out << num(path.t_grid[h]);
    for (int j = 0; j < path.d; ++j)
      for (int k = 0; k < path.d; ++k) out << ',' << num(path.values[h](j, k));
    out << '\n';
  }
}

json report_to_json(const EstimateReport& r) {
  json j;
  j["functional"] = r.functional;
  j["s_hat"] = finite_or_null(r.s_hat);
  j["v_hat"] = finite_or_null(r.v_hat);
  j["mu_hat"] = r.has_mu ? finite_or_null(r.mu_hat) : json(nullptr);
  j["rate"] = {{"kind", rate_name(r.rate_kind)}, {"value", finite_or_null(r.rate)}};
  j["level"] = r.level;
  j["ci"] = r.ci_valid ? json::array({finite_or_null(r.ci_lo), finite_or_null(r.ci_hi)}) : json(nullptr);
  json diag = json::object();
  diag["v_hat_raw"] = finite_or_null(r.v_hat_raw);
  diag["v_hat_psd"] = r.v_hat_raw > 0.0;
  for (const auto& kv : r.diagnostics) diag[kv.first] = finite_or_null(kv.second);
  diag["notes"] = r.notes;
  j["diagnostics"] = diag;
  return j;
}

json tuning_to_json(const TuningParams& tp) {
  return {{"N", tp.N}, {"M", tp.M}, {"B", tp.B}, {"L", tp.L}, {"kappa", tp.kappa},
          {"alpha_holder", tp.alpha_holder}};
}

json montecarlo_to_json(const MonteCarloSummary& s) {
  json j;
  j["replications"] = s.outcomes.size();
  j["failed_replications"] = s.failed_replications;
  json fs = json::array();
  for (const auto& f : s.functionals) {
    fs.push_back({{"functional", f.functional},
                  {"used", f.used},
                  {"failures", f.failures},
                  {"mean", finite_or_null(f.mean)},
                  {"sd", finite_or_null(f.sd)},
                  {"skew", finite_or_null(f.skew)},
                  {"coverage", finite_or_null(f.coverage)},
                  {"ks_statistic", finite_or_null(f.ks_statistic)},
                  {"ks_p", finite_or_null(f.ks_p)},
                  {"degenerate", f.degenerate},
                  {"rv", {{"used", f.rv_used}, {"mean", finite_or_null(f.rv_mean)}, {"sd", finite_or_null(f.rv_sd)}}}});
  }
  j["functionals"] = fs;
  json errs = json::array();
  for (const auto& o : s.outcomes)
    if (!o.ok) errs.push_back({{"rep", o.rep}, {"error", o.error}});
  j["errors"] = errs;
  return j;
}

void write_montecarlo_samples(std::ostream& out, const MonteCarloSummary& s,
                              const std::vector<std::string>& functionals) {
  out << "rep,functional,s_true,s_hat,v_hat,mu_hat,stat,covered,rv_stat\n";
  for (const auto& o : s.outcomes) {
    for (std::size_t i = 0; i < functionals.size(); ++i) {
      out << o.rep << ',' << functionals[i];
      if (!o.ok || i >= o.reports.size()) {
        out << ",,,,,,,\n";
        continue;
      }
      const auto& r = o.reports[i];
      out << ',' << num(o.s_true[i]) << ',' << num(r.s_hat) << ',' << num(r.v_hat_raw) << ','
          << (r.has_mu ? num(r.mu_hat) : "") << ',' << (std::isfinite(o.stat[i]) ? num(o.stat[i]) : "")
          << ',' << (o.covered[i] < 0 ? "" : std::to_string(o.covered[i])) << ','
          << (std::isfinite(o.rv_stat[i]) ? num(o.rv_stat[i]) : "") << '\n';
    }
  }
}

void write_kernel_csv(std::ostream& out, int order, std::size_t points) {
  out << "x,dirichlet,fejer\n";
  const std::size_t m = std::max<std::size_t>(points, 2);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = -0.5 + static_cast<double>(i) / static_cast<double>(m - 1);
    out << num(x) << ',' << num(dirichlet_kernel(order, x)) << ',' << num(fejer_kernel(std::max(order, 1), x))
        << '\n';
  }
}

void write_theta_csv(std::ostream& out, const ThetaIntegrals& th) {
  out << "t,tilde,acute,check,grave\n";
  for (std::size_t i = 0; i < th.t_grid.size(); ++i)
    out << num(th.t_grid[i]) << ',' << num(th.tilde[i]) << ',' << num(th.acute[i]) << ','
        << num(th.check[i]) << ',' << num(th.grave[i]) << '\n';
}

}  // namespace fourvol
