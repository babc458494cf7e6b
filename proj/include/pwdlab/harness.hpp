#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pwdlab/scenario.hpp"

namespace pwdlab {

/// Bumped whenever the column set or order changes.
inline constexpr const char* kReportSchema = "pwdlab_report_v1";

struct ReportRow {
  std::string scenario;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string pipeline;
  double err_T = 0.0;  // exact err of the chosen model
  double err_h = 0.0;  // Pr_D[h(x) != c(x)]
  double kl0 = 0.0;    // KL(P0 || P̂0)
  double kl1 = 0.0;    // KL(P1 || P̂1)
  std::string chosen_provenance;
  std::uint64_t draws_used = 0;
  std::optional<double> runtime_ms;  // only with timing enabled
  bool success = false;              // err_T <= epsilon
};

struct RunOptions {
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<PipelineKind> pipeline;
  std::size_t workers = 1;
  bool timing = false;
};

/// Seed of trial t: derive_seed(master, {trial, t}).
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

/// One pipeline run against the scenario's target.
ReportRow run_trial(const ScenarioSpec& spec, const TargetModel& target, PipelineKind pipeline,
                    std::size_t trial, std::uint64_t seed, bool timing = false);

/// Runs every trial (in parallel when workers > 1); rows come back in trial order.
std::vector<ReportRow> run_experiment(const ScenarioSpec& spec, const RunOptions& options = {});

double success_fraction(const std::vector<ReportRow>& rows);

std::string report_header();
std::string format_row(const ReportRow& row);
std::string to_csv(const std::vector<ReportRow>& rows);

struct EventRow {
  std::size_t event_id = 0;
  std::string kind;
  std::size_t j = 0;  // 1-based coordinate
  double t = 0.0;     // symbol or threshold
  double sep_exact = 0.0;  // |P0(E) - P1(E)|
  double sep_bound = 0.0;  // class xi_bound
};

/// The scenario's event class at its gamma with exact separations.
std::vector<EventRow> event_table(const ScenarioSpec& spec);
std::string events_csv(const std::vector<EventRow>& rows);

/// PWDLAB_WORKERS, default 1. Throws ConfigError on a malformed value.
std::size_t workers_from_env();

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace pwdlab
