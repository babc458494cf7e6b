#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pwdlab/distributions.hpp"
#include "pwdlab/model.hpp"

namespace pwdlab {

/// Smallest r with (3/4)^r <= delta.
std::size_t amplification_repetitions(double delta);

struct RobustnessBudget {
  std::size_t m_p = 2000;
  std::size_t r = 1;
  double kl_tolerance = 0.0;  // 1 / (2 m_p)

  static RobustnessBudget make(std::size_t m_p, double delta);
};

/// Accumulates sufficient statistics of consecutive blocks of m_p outcomes
/// and fits one spec per completed block.
class BlockFitter {
 public:
  BlockFitter(const OutcomeShape& shape, std::size_t block_size, std::size_t blocks);

  /// Returns false once every block is full.
  bool add(std::span<const double> y);
  bool full() const { return seen_ == block_size_ * blocks_; }
  std::size_t seen() const { return seen_; }
  std::vector<DistributionSpec> fit() const;

 private:
  OutcomeShape shape_;
  std::size_t block_size_;
  std::size_t blocks_;
  std::size_t stride_;
  std::size_t seen_ = 0;
  std::vector<double> stats_;
};

/// Runs the base learner on r disjoint blocks of m_p outcomes and returns
/// all r fits. Throws std::invalid_argument when the stream is shorter than r*m_p.
std::vector<DistributionSpec> robust_learn_list(std::span<const OutcomeVector> stream,
                                                const OutcomeShape& shape,
                                                const RobustnessBudget& budget);

/// min(cap, ceil(4 r m_p / (epsilon / (2 M)))).
std::uint64_t separation_draws(const RobustnessBudget& budget, double epsilon, double m_bound,
                               std::uint64_t cap);

struct SeparateConfig {
  RobustnessBudget robust;
  double epsilon = 0.1;
  double m_bound = 64.0;
  std::uint64_t draw_cap = 100000;
};

struct SeparateResult {
  std::vector<HypothesisModel> models;  // (h, P̂0[i], P̂1[j]), i outer
  bool learned[2] = {false, false};
  std::size_t side_points[2] = {0, 0};
  std::uint64_t draws = 0;
};

/// Splits Gen draws by h(x) and learns each side with robust_learn_list when it
/// collects r*m_p points; a starved side gets the default spec. Drawing stops
/// early once both sides are full, which leaves the output distribution unchanged.
SeparateResult separate_and_learn(const GenOracle& gen, const Concept& h,
                                  const SeparateConfig& config, std::uint64_t seed);

/// max(2 M m_p / epsilon, 2 m_p).
double direct_threshold_g(double m_bound, std::size_t m_p, double epsilon);

struct DirectResult {
  std::vector<DistributionSpec> specs;
  std::uint64_t draws = 0;
};

/// robust_learn_list on the unconditional outcome stream.
DirectResult direct_unhealthy_learn(const GenOracle& gen, const RobustnessBudget& budget,
                                    std::uint64_t seed);

/// Two-point test harness: fit m points from Q_i, answer 0 iff KL(Q0 || fit) <= epsilon.
struct LeCamResult {
  double error0 = 0.0;  // Pr[answer 1 | data from Q0]
  double error1 = 0.0;  // Pr[answer 0 | data from Q1]
  double error_sum = 0.0;
  double std_error = 0.0;
  double lower_bound = 0.0;  // 1 - sqrt(m KL(Q0||Q1) ln2 / 2)
  std::size_t trials = 0;
};

LeCamResult lecam_experiment(const DistributionSpec& q0, const DistributionSpec& q1, std::size_t m,
                             double epsilon, std::size_t trials, std::uint64_t seed);

/// Learner run on data from Q1 judged against Q0.
struct StabilityResult {
  double single_success = 0.0;  // first block's fit within epsilon of Q0
  double list_success = 0.0;    // some block's fit within epsilon of Q0
  std::size_t trials = 0;
};

StabilityResult stability_experiment(const DistributionSpec& q0, const DistributionSpec& q1,
                                     const RobustnessBudget& budget, double epsilon,
                                     std::size_t trials, std::uint64_t seed);

/// A member of base's family at KL(base || result) == kl_target (within 1e-9
/// relative), moved along a random direction. Discrete and Gaussian families.
/// Throws std::domain_error when 64 directions all hit the parameter box first.
DistributionSpec perturb_to_kl(const DistributionSpec& base, double kl_target, Rng& rng);

}  // namespace pwdlab
