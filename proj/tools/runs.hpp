#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cftlab/error.hpp"
#include "cftlab/sle.hpp"

namespace cftlab::tools {

// Process exit codes.
enum Exit : int { kPass = 0, kToleranceFailure = 1, kInputError = 2, kRuntimeError = 3 };

int exit_code(ErrorKind kind);

// Shortest text that round-trips: 17 significant digits.
std::string num(double x);

std::string sha256_hex(std::string_view bytes);

// One row of an SLE estimate table.
struct EstimateRow {
  std::string id;
  cplx point;
  EstimateReport estimate;
  std::optional<double> reference;

  std::optional<double> z_score() const;
};

std::string estimate_csv(const std::vector<EstimateRow>& rows);
nlohmann::json estimate_summary(const std::vector<EstimateRow>& rows);

// Left passage at each point, all points on shared paths; reference is the
// closed form for points on the unit circle.
std::vector<EstimateRow> left_passage_rows(const SimOptions& opts, const std::vector<cplx>& points,
                                           std::uint64_t paths, std::uint64_t seed);
// Hitting [x - u x, x] for each u, on shared paths.
std::vector<EstimateRow> boundary_hit_rows(const SimOptions& opts, double x, const std::vector<double>& us,
                                           std::uint64_t paths, std::uint64_t seed);
// P(tau_z = tau_eta) and P(tau_z > tau_eta).
std::vector<EstimateRow> swallow_order_rows(const SimOptions& opts, cplx z, double eta, std::uint64_t paths,
                                            std::uint64_t seed);

// Probe tuples for drift runs, away from the bulk of the hull up to t ~ 1.
std::vector<std::vector<cplx>> default_drift_probes(std::size_t arity);

// Least-squares slope of log p against log u.
double log_log_slope(const std::vector<double>& us, const std::vector<double>& ps);

}  // namespace cftlab::tools
