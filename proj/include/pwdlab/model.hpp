#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwdlab/distributions.hpp"
#include "pwdlab/rng.hpp"

namespace pwdlab {

inline constexpr std::size_t kMaxContextBits = 64;
/// Contexts are enumerated exactly up to this dimension.
inline constexpr std::size_t kEnumerableContextBits = 16;

/// x in {0,1}^n, packed; bit i holds coordinate i+1.
struct ContextVector {
  std::uint64_t bits = 0;

  bool operator[](std::size_t i) const { return (bits >> i) & 1U; }
  auto operator<=>(const ContextVector&) const = default;
};

enum class ConceptKind { monotone_conjunction, dictator, constant_zero, constant_one };

std::string_view to_string(ConceptKind kind);
ConceptKind parse_concept_kind(std::string_view name);

/// A {0,1}-valued function over contexts. Variables are 1-based.
class Concept {
 public:
  /// constant-zero.
  Concept() : Concept(ConceptKind::constant_zero, {}, 0) {}

  static Concept conjunction(std::vector<std::size_t> variables, std::size_t n);
  static Concept dictator(std::size_t variable, std::size_t n);
  static Concept constant_zero() { return Concept(ConceptKind::constant_zero, {}, 0); }
  static Concept constant_one() { return Concept(ConceptKind::constant_one, {}, 0); }

  int operator()(ContextVector x) const {
    if (kind_ == ConceptKind::constant_zero) return 0;
    return (x.bits & mask_) == mask_ ? 1 : 0;
  }

  ConceptKind kind() const { return kind_; }
  const std::vector<std::size_t>& variables() const { return variables_; }
  /// Bit mask of the conjunction (0 for constants).
  std::uint64_t mask() const { return mask_; }
  std::string describe() const;

  bool operator==(const Concept&) const = default;

 private:
  Concept(ConceptKind kind, std::vector<std::size_t> vars, std::uint64_t mask)
      : kind_(kind), variables_(std::move(vars)), mask_(mask) {}

  ConceptKind kind_;
  std::vector<std::size_t> variables_;
  std::uint64_t mask_;
};

/// constant-zero, constant-one, every dictator, then every monotone
/// conjunction of 2..max_vars variables in lexicographic order.
std::vector<Concept> concept_class(std::size_t n, std::size_t max_vars);

enum class ContextKind { uniform, independent_product };

class ContextDistribution {
 public:
  static ContextDistribution uniform(std::size_t n);
  static ContextDistribution product(std::vector<double> biases);

  ContextVector sample(Rng& rng) const;
  double probability(ContextVector x) const;
  /// Pr[x_i = 1], 0-based.
  double bias(std::size_t i) const { return biases_[i]; }
  std::size_t n() const { return biases_.size(); }
  ContextKind kind() const { return kind_; }
  const std::vector<double>& biases() const { return biases_; }

  bool operator==(const ContextDistribution&) const = default;

 private:
  ContextDistribution(ContextKind kind, std::vector<double> biases)
      : kind_(kind), biases_(std::move(biases)) {}

  ContextKind kind_;
  std::vector<double> biases_;
};

struct LabeledPair {
  ContextVector context;
  OutcomeVector outcome;

  bool operator==(const LabeledPair&) const = default;
};

/// Ground truth (c, P0, P1) plus the context distribution D.
struct TargetModel {
  Concept c;
  DistributionSpec p0;
  DistributionSpec p1;
  ContextDistribution context_dist;

  /// Throws std::invalid_argument when the invariants fail.
  void validate() const;
  std::size_t n() const { return context_dist.n(); }
  const DistributionSpec& component(int label) const { return label ? p1 : p0; }
};

/// Learner output (h, P̂0, P̂1); predicts with P̂_{h(x)}.
struct HypothesisModel {
  Concept hypothesis;
  DistributionSpec q0;
  DistributionSpec q1;

  const DistributionSpec& component(int label) const { return label ? q1 : q0; }
  bool operator==(const HypothesisModel&) const = default;
};

class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Counts oracle draws against a hard limit.
class DrawBudget {
 public:
  explicit DrawBudget(std::uint64_t limit) : limit_(limit) {}

  void charge(std::uint64_t draws);
  std::uint64_t used() const { return used_; }
  std::uint64_t limit() const { return limit_; }
  std::uint64_t remaining() const { return limit_ - used_; }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

/// The generative oracle Gen: x ~ D, y ~ P_{c(x)}. Learners see only this
/// interface and the public structure (n, outcome shape), never the target.
class GenOracle {
 public:
  GenOracle(const TargetModel& target, DrawBudget* budget = nullptr);

  void draw_into(Rng& rng, LabeledPair& out) const;
  /// Same draw without charging the budget; for callers that charged a batch.
  void draw_unmetered(Rng& rng, LabeledPair& out) const;
  LabeledPair draw(Rng& rng) const;
  std::vector<LabeledPair> draw(Rng& rng, std::size_t count) const;

  std::size_t n() const { return target_->n(); }
  const OutcomeShape& outcome_shape() const { return target_->p0.shape(); }
  DrawBudget* budget() const { return budget_; }

 private:
  const TargetModel* target_;
  DrawBudget* budget_;
};

/// count i.i.d. pairs from Gen; deterministic given the stream.
std::vector<LabeledPair> gen_sample(const TargetModel& target, std::size_t count, Rng& rng);

/// Pr_D[c(x) = i, h(x) = j].
struct JointProbabilities {
  double cell[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double pr_c(int i) const { return cell[i][0] + cell[i][1]; }
  double disagreement() const { return cell[0][1] + cell[1][0]; }
};

/// Enumeration for n <= 16; inclusion-exclusion over product D otherwise.
JointProbabilities joint_probabilities(const Concept& c, const Concept& h,
                                       const ContextDistribution& d);

enum class ErrorMode { exact, monte_carlo };

struct ErrorEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// err(T) = E_x KL(P_{c(x)} || P̂_{h(x)}) in bits.
ErrorEstimate model_error(const TargetModel& target, const HypothesisModel& hyp,
                          ErrorMode mode = ErrorMode::exact, Rng* rng = nullptr,
                          std::size_t mc_samples = 100000);

/// Pr_D[h(x) != c(x)].
double classification_error(const Concept& c, const Concept& h, const ContextDistribution& d);

/// sum over the sample of -log2 P̂_{h(x)}(y) with the clamped evaluator.
double empirical_log_loss(const HypothesisModel& hyp, std::span<const LabeledPair> sample,
                          const BoundednessBudget& budget);

/// E_x H(P_{c(x)}) in bits.
double conditional_entropy(const TargetModel& target);

}  // namespace pwdlab
