#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pwdlab/events.hpp"
#include "pwdlab/model.hpp"

namespace pwdlab {

/// Randomized labelling probabilities. y in E gets label 1 w.p. a1, otherwise
/// label 1 w.p. b1.
struct LabParams {
  double a0 = 0.5, a1 = 0.5;
  double b0 = 0.5, b1 = 0.5;
  double xi = 0.0;
  double p_hat = 0.0, q_hat = 0.0;
};

/// True when the guesses produce probabilities in [0, 1]:
/// xi * max(p̂ + q̂, 2 - p̂ - q̂) <= 2 |q̂ - p̂|.
bool lab_parameters_valid(double p_hat, double q_hat, double xi);

/// a0 = 1/2 + xi (p̂ + q̂ - 2) / (4 (q̂ - p̂)), b0 = 1/2 + xi (p̂ + q̂) / (4 (q̂ - p̂)).
/// Throws std::invalid_argument on p̂ == q̂, xi outside (0, 1] or invalid guesses.
LabParams lab_parameters(double p_hat, double q_hat, double xi);

struct NoisyLabeledExample {
  ContextVector context;
  int label = 0;
};

NoisyLabeledExample lab_label(const Event& event, const LabeledPair& pair, const LabParams& params,
                              Rng& rng);

struct NoiseRates {
  double eta0 = 0.0;  // Pr[label 1 | c(x) = 0]
  double eta1 = 0.0;  // Pr[label 0 | c(x) = 1]
};

/// p = P0(E), q = P1(E).
NoiseRates noise_rates(double p, double q, const LabParams& params);

struct GuessGrid {
  double delta = 0.0;
  std::vector<double> values;
  /// Ordered pairs (p̂, q̂) with distinct indices.
  std::vector<std::pair<double, double>> pairs;
};

/// delta = xi / 8; values i*delta for i = 0..ceil(1/delta), capped at 1.
GuessGrid guess_grid(double xi);

struct ErmResult {
  Concept hypothesis = Concept::constant_zero();
  std::size_t index = 0;
  std::size_t disagreements = 0;
};

/// Minimum empirical disagreement over the class; ties go to the smallest index.
ErmResult erm_cccn_learn(std::span<const NoisyLabeledExample> examples,
                         std::span<const Concept> concepts);

/// ceil(constant / (xi eps^2) * ln(2 |C| |grid| / delta)).
std::size_t cn_sample_size(double epsilon, double delta, double xi, std::size_t class_size,
                           std::size_t grid_size, double constant = 32.0);

struct GridHypothesis {
  double p_hat = 0.0;
  double q_hat = 0.0;
  bool skipped = false;
  std::optional<Concept> hypothesis;
  std::size_t class_index = 0;
  std::size_t disagreements = 0;
};

struct EventLearnResult {
  std::vector<GridHypothesis> entries;  // one per grid pair, in grid order
  std::size_t skipped = 0;
  std::uint64_t draws = 0;
};

/// Runs Lab + ERM on a fresh sample for every grid pair. Pair i uses the
/// stream derive_seed(seed, {cn_learn, i}).
EventLearnResult learn_with_event(const GenOracle& gen, const Event& event, double xi,
                                  std::span<const Concept> concepts, std::size_t sample_size,
                                  std::uint64_t seed);

}  // namespace pwdlab
