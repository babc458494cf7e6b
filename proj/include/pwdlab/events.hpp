#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pwdlab/distributions.hpp"
#include "pwdlab/rng.hpp"

namespace pwdlab {

enum class EventKind { coordinate_equals, coordinate_threshold, likelihood_ratio };

std::string_view to_string(EventKind kind);

/// A measurable subset of the outcome space.
///   coordinate_equals:    y_j == symbol
///   coordinate_threshold: y_j >= threshold
///   likelihood_ratio:     log2 P̂(y) - log2 Q̂(y) >= tau (ties included)
/// Coordinates are 0-based here; reports print them 1-based.
class Event {
 public:
  /// 1[y_1 == 0].
  Event() = default;

  static Event coordinate_equals(std::size_t j, std::size_t symbol);
  static Event coordinate_threshold(std::size_t j, double threshold);
  static Event likelihood_ratio(DistributionSpec p_hat, DistributionSpec q_hat, double tau);

  bool contains(std::span<const double> y) const;

  EventKind kind() const { return kind_; }
  std::size_t coordinate() const { return j_; }
  std::size_t symbol() const { return symbol_; }
  double threshold() const { return threshold_; }
  double tau() const { return threshold_; }
  const DistributionSpec& p_hat() const { return refs_->first; }
  const DistributionSpec& q_hat() const { return refs_->second; }
  std::string describe() const;

 private:
  EventKind kind_ = EventKind::coordinate_equals;
  std::size_t j_ = 0;
  std::size_t symbol_ = 0;
  double threshold_ = 0.0;
  std::shared_ptr<const std::pair<DistributionSpec, DistributionSpec>> refs_;
};

/// E(P̂, Q̂, tau) = { y : P̂(y) >= 2^tau Q̂(y) }, compared in log space.
Event likelihood_ratio_event(const DistributionSpec& p_hat, const DistributionSpec& q_hat,
                             double tau);

/// b = gamma^2 / (8M) - sqrt(2 alpha). When b > 0 and the fits are
/// alpha-close in KL, E(P̂, Q̂, b^2) separates P and Q by b^4 / (2M) - sqrt(2 alpha).
double approxdist_margin(double gamma, double m_bound, double alpha);

struct EventClass {
  double gamma = 0.0;
  std::vector<Event> events;
  /// Guaranteed separation for some member whenever KL(P||Q) >= gamma.
  double xi_bound = 0.0;
  /// Gaussian grid step; 0 for discrete classes.
  double grid_step = 0.0;
};

/// Lower-bound constant C with Phi(x/sigma) - 1/2 >= C x on [0, 1]:
/// C = exp(-1/(2 sigma^2)) / (2 sqrt(2 pi) sigma).
double gaussian_erf_constant(double sigma);

/// Products: all k*b events 1[y_j = t], xi = gamma^2 / (2 (kb)^2 M).
/// Gaussians: thresholds 1[y_j >= t] on the grid box_lo + i*Delta,
/// Delta = sqrt(2 gamma / (k sigma^2)), xi = C * Delta.
EventClass enumerate_event_class(const OutcomeShape& shape, double gamma,
                                 const BoundednessBudget& budget);

enum class ProbabilityMode { exact, monte_carlo };

struct ProbabilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Exact: coordinate events always; likelihood-ratio events by enumeration
/// (<= 2^20 points) or, for Gaussians with shared deviations, via the
/// half-space they define. Throws std::domain_error when infeasible.
ProbabilityEstimate event_probability(const DistributionSpec& dist, const Event& event,
                                      ProbabilityMode mode = ProbabilityMode::exact,
                                      Rng* rng = nullptr, std::size_t mc_samples = 100000);

/// Convenience: exact probability.
double event_probability_exact(const DistributionSpec& dist, const Event& event);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace pwdlab
