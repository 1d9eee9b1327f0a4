#pragma once

// Monte-Carlo orchestration: one record per (scheme, sweep point, draw),
// CSV emission and a plain-text summary.

#include "geoleo/baselines.hpp"
#include "geoleo/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace geoleo {

struct ExperimentRecord {
  SchemeId scheme = SchemeId::SpcRsmaTtm;
  double sweep_value = 0.0;
  int draw = 0;
  std::vector<double> r_total;
  std::vector<double> served;
  double objective = 0.0;
  double r_spc = 0.0;
  double r_c = 0.0;
  double il_estimated = 0.0;
  double il_true = 0.0;
  double power = 0.0;
  int iterations = 0;
  double wall_time_s = 0.0;
  bool feasible = true;
};

/// Per-draw seed; independent of the sweep point so every point sees the
/// same phase and CSI-error realizations.
std::uint64_t draw_seed(std::uint64_t base, int draw);

ExperimentRecord make_record(const SchemeOutcome& o, double sweep_value, int draw);

/// One draw of config.scheme with the channel seeded by config.seed.
ExperimentRecord run(const ScenarioConfig& config);

/// `draws` draws of every scheme at one configuration.
std::vector<ExperimentRecord> run_point(const ScenarioConfig& config, const std::vector<SchemeId>& schemes,
                                        double sweep_value, int draws);

/// Evenly spaced points from min to max inclusive.
std::vector<double> sweep_points(double min, double max, int steps);

std::vector<ExperimentRecord> sweep_offboresight(const ScenarioConfig& config, const std::vector<double>& angles_deg,
                                                 const std::vector<SchemeId>& schemes, int draws);

/// Config as given (θ_G default 0.2°), sweep value = θ_G.
std::vector<ExperimentRecord> bar_demand(const ScenarioConfig& config, const std::vector<SchemeId>& schemes,
                                         int draws);

/// θ_s = 0 means a single LEO and serves as the loss reference.
std::vector<ExperimentRecord> sweep_separation(const ScenarioConfig& config, const std::vector<double>& separations_deg,
                                               const std::vector<SchemeId>& schemes, int draws);

/// Sorted by (scheme, sweep value, draw).
void sort_records(std::vector<ExperimentRecord>& records);

void write_csv(std::ostream& out, std::vector<ExperimentRecord> records, bool with_wall_time = false);

struct PointSummary {
  SchemeId scheme = SchemeId::SpcRsmaTtm;
  double sweep_value = 0.0;
  int draws = 0;
  double mean_objective = 0.0;
  double stderr_objective = 0.0;
  double mean_satisfaction = 0.0;  // Σ served / Σ T
  std::vector<double> mean_served;
};

std::vector<PointSummary> summarize(const std::vector<ExperimentRecord>& records, const std::vector<double>& demands);

void print_summary(std::ostream& out, const std::vector<PointSummary>& summary);

/// Runs the invariant checks on `config` and prints one line per check.
/// Returns true when all pass.
bool validate(const ScenarioConfig& config, std::ostream& out);

}  // namespace geoleo
