#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fourvol/inference.hpp"
#include "fourvol/pipeline.hpp"
#include "fourvol/spectrum.hpp"
#include "fourvol/spot.hpp"

namespace fourvol {

/// CSV with header asset_id,timestamp,price. Timestamps are seconds from
/// the window start, or ISO-8601 date-times converted to seconds from the
/// earliest one. Log-prices are taken on ingest. T defaults to the largest
/// timestamp. Throws DataError with the offending line number.
std::vector<TickSeries> parse_ticks(std::istream& in, std::optional<double> T = std::nullopt);
std::vector<TickSeries> parse_ticks_file(const std::string& path,
                                         std::optional<double> T = std::nullopt);

void write_ticks(std::ostream& out, const std::vector<TickSeries>& ticks);

/// Columns t, c_11, c_12, ..., c_dd.
void write_spot_csv(std::ostream& out, const SpotPath& path);

nlohmann::json report_to_json(const EstimateReport& r);
nlohmann::json tuning_to_json(const TuningParams& tp);
nlohmann::json montecarlo_to_json(const MonteCarloSummary& s);

/// One row per replication and functional: rep, functional, s_true, s_hat,
/// v_hat, mu_hat, stat, covered, rv_stat.
void write_montecarlo_samples(std::ostream& out, const MonteCarloSummary& s,
                              const std::vector<std::string>& functionals);

/// Columns x, dirichlet, fejer on `points` points of [-1/2, 1/2].
void write_kernel_csv(std::ostream& out, int order, std::size_t points);

/// Columns t, tilde, acute, check, grave for one grid quadruple.
void write_theta_csv(std::ostream& out, const ThetaIntegrals& th);

}  // namespace fourvol
