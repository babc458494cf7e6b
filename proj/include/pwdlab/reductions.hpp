#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pwdlab/cccn.hpp"
#include "pwdlab/dist_learn.hpp"
#include "pwdlab/events.hpp"
#include "pwdlab/mixture.hpp"
#include "pwdlab/model.hpp"

namespace pwdlab {

enum class Provenance { forward_event, forward_direct, reverse_mixture, reverse_direct };

std::string_view to_string(Provenance p);

struct ModelProvenance {
  Provenance tag = Provenance::forward_direct;
  std::size_t event_index = 0;   // first event whose grid produced the hypothesis
  double p_hat = 0.0;            // grid pair that first produced it
  double q_hat = 0.0;
  std::size_t list0_index = 0;   // position in the side-0 / side-1 robust lists
  std::size_t list1_index = 0;
  /// Number of (event, grid pair) entries that produced this hypothesis.
  std::uint64_t multiplicity = 1;
};

/// Distinct candidate models. Hypotheses returned by several (event, grid
/// pair) entries are learned once; nominal_size counts the list with every
/// repetition, which is the size the selection bound is stated for.
struct CandidateModelList {
  std::vector<HypothesisModel> models;
  std::vector<ModelProvenance> provenance;
  std::uint64_t nominal_size = 0;

  std::size_t size() const { return models.size(); }
};

struct MLSelectionReport {
  std::size_t chosen_index = 0;
  std::vector<double> losses;  // bits, summed over the selection sample
  std::size_t m_sel = 0;
};

/// ceil(M^2 / (2 eps^2) * ln(3 (|T| + 1) / delta)).
std::size_t ml_selection_sample_size(double m_bound, double epsilon, double delta,
                                     std::uint64_t list_size);

/// Reference selection on a given sample: empirical_log_loss per model,
/// minimum wins, ties to the lower index.
MLSelectionReport ml_select(std::span<const HypothesisModel> models,
                            std::span<const LabeledPair> sample, const BoundednessBudget& budget);

/// Same selection on m_sel fresh draws from Gen using per-hypothesis
/// sufficient statistics. Draws use derive_seed(seed, {selection}).
MLSelectionReport ml_select_streaming(std::span<const HypothesisModel> models, const GenOracle& gen,
                                      std::size_t m_sel, std::uint64_t seed,
                                      const BoundednessBudget& budget);

/// Pipeline knobs. Zero means "derive from the formulas".
struct PipelineParams {
  double epsilon = 0.1;
  double delta = 0.2;
  double gamma = 0.0;          // 0: 1/g
  double xi = 0.0;             // forward: 0 uses the event class xi_bound
  std::size_t m_p = 2000;
  std::size_t m_cn = 0;        // 0: cn_sample_size at eps_cn
  double cn_constant = 32.0;
  std::size_t m_sel = 0;       // 0: ml_selection_sample_size
  std::uint64_t separate_cap = 100000;
  std::uint64_t draw_budget = 10000000;
  std::size_t max_concept_vars = 2;
  std::size_t max_grid_pairs = 100000;
  double gaussian_m_cap = 64.0;
  // reverse
  std::size_t m_mix = 5000;
  std::size_t restarts = 10;
  double eta = 0.0;            // 0: gamma
  double alpha = 0.05;         // assumed component accuracy of the mixture fit
  double xi_scale = 0.8;       // reverse xi = xi_scale * fitted separation
  double xi_floor = 0.05;

  bool operator==(const PipelineParams&) const = default;
};

/// The three accuracy targets the stages are run at.
struct EpsilonSplit {
  double cn = 0.0;    // epsilon / (2 M m_p)
  double dist = 0.0;  // epsilon / 2
  double sel = 0.0;   // epsilon
};

EpsilonSplit split_epsilon(double epsilon, double m_bound, std::size_t m_p);

struct EventStage {
  Event event;
  double xi = 0.0;
  std::string origin;  // "class", "margin", "half-kl"
  std::size_t pairs = 0;
  std::size_t skipped = 0;
};

struct PipelineResult {
  HypothesisModel chosen;
  ModelProvenance chosen_provenance;
  CandidateModelList candidates;
  MLSelectionReport selection;
  double gamma = 0.0;
  double m_bound = 0.0;
  EpsilonSplit eps;
  std::size_t m_cn = 0;
  std::size_t distinct_hypotheses = 0;
  std::vector<EventStage> events;
  std::optional<HealthReport> health;
  std::optional<MixtureFit> mixture;
  std::uint64_t draws = 0;
};

/// Default gamma = 1/g with g = max(2 M m_p / eps, 2 m_p).
double default_gamma(double m_bound, std::size_t m_p, double epsilon);

/// Event class -> Lab/ERM lists -> separate-and-learn, plus the direct models,
/// then ML selection. Every draw goes through `gen` (and its budget).
PipelineResult forward_learn(const GenOracle& gen, const PipelineParams& params, std::uint64_t seed);

/// EM on unconditional outcomes -> health check -> likelihood-ratio events in
/// both component orders -> as forward; the direct models are always added.
PipelineResult reverse_learn(const GenOracle& gen, const PipelineParams& params, std::uint64_t seed);

/// Only the direct models (h0, P̂, P̂) followed by ML selection.
PipelineResult direct_learn(const GenOracle& gen, const PipelineParams& params, std::uint64_t seed);

/// Analytic check from ground truth that the event path or the direct path
/// applies at gamma = 1/g.
struct GammaDispatch {
  double g = 0.0;
  double gamma = 0.0;
  double max_kl = 0.0;       // max directed KL between P0 and P1
  double min_weight = 0.0;   // min(Pr[c=0], Pr[c=1])
  bool event_path = false;   // max_kl >= gamma
  bool direct_path = false;  // 1/g-unhealthy
  bool covered() const { return event_path || direct_path; }
};

GammaDispatch gamma_dispatch(const TargetModel& target, const PipelineParams& params);

}  // namespace pwdlab
