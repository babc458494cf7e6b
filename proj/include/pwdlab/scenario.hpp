#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwdlab/model.hpp"
#include "pwdlab/reductions.hpp"

namespace pwdlab {

/// Configuration error carrying the offending field path (or "line:col").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::invalid_argument(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

enum class PipelineKind { forward, reverse, direct };

std::string_view to_string(PipelineKind kind);
PipelineKind parse_pipeline(std::string_view name);

/// How a component's parameters are produced.
///   explicit: `values` as written (Bernoulli biases, b-ary rows, Gaussian means)
///   fill:     every parameter equal to `value` (b-ary: every row uniform)
///   random:   i.i.d. uniform on [lo, hi] from `seed` (b-ary rows normalised)
///   same:     a copy of p0 (p1 only)
///   offset:   p0's parameters plus `value` (p1 only; Bernoulli and Gaussian)
struct ParamSource {
  std::string kind = "explicit";
  std::vector<double> values;
  double value = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const ParamSource&) const = default;
};

struct ScenarioSpec {
  std::string name = "scenario";
  PipelineKind pipeline = PipelineKind::forward;
  std::uint64_t seed = 1;
  std::size_t trials = 1;

  std::size_t n = 1;
  std::string context_kind = "uniform";  // uniform | product
  std::vector<double> context_biases;

  std::string concept_kind = "monotone-conjunction";
  std::vector<std::size_t> concept_variables;

  OutcomeShape shape;
  ParamSource p0;
  ParamSource p1;

  PipelineParams params;
  double min_success = 0.8;

  bool operator==(const ScenarioSpec&) const = default;
};

/// Parses and validates. Throws ConfigError naming the field or text position.
ScenarioSpec parse_scenario(const std::string& text);
ScenarioSpec load_scenario(const std::string& path);
/// Every field written explicitly; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const ScenarioSpec& spec);

/// Checks every invariant, throwing ConfigError with the field path.
void validate_scenario(const ScenarioSpec& spec);

/// The ground-truth target the scenario describes.
TargetModel build_target(const ScenarioSpec& spec);

}  // namespace pwdlab
