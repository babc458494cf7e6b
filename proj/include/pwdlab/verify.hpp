#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pwdlab {

struct VerifyOptions {
  std::uint64_t seed = 2;
  /// Multiplies every trial count (minimum one trial). 1 is the full suite.
  double scale = 1.0;
  bool timing = false;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::vector<std::pair<std::string, double>> metrics;  // in report order
  std::string detail;
  std::optional<double> runtime_ms;

  /// Throws std::out_of_range for an unknown metric.
  double metric(std::string_view key) const;
};

/// lab-identity, noise-bounds, admit, approxdist, event-classes, logsum,
/// lecam, robustness, ml-select, decomposition.
const std::vector<std::string>& suite_names();

/// Throws ConfigError for an unknown suite.
SuiteResult run_suite(std::string_view name, const VerifyOptions& options = {});

/// `which` is a suite name or "all".
std::vector<SuiteResult> run_suites(std::string_view which, const VerifyOptions& options = {});

/// {"seed": .., "passed": .., "suites": [{"name", "passed", "metrics", "detail"[, "runtime_ms"]}]}
std::string suites_json(const std::vector<SuiteResult>& results, const VerifyOptions& options);

}  // namespace pwdlab
