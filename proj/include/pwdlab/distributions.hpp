#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pwdlab/rng.hpp"

namespace pwdlab {

/// An outcome y. Discrete families store symbols 0..b-1 as exact doubles.
using OutcomeVector = std::vector<double>;

enum class Family { bernoulli_product, bary_product, spherical_gaussian };

std::string_view to_string(Family f);
Family parse_family(std::string_view name);
inline bool is_discrete(Family f) { return f != Family::spherical_gaussian; }

class FamilyMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Structural description of the outcome space shared by every member of a
/// scenario's distribution class: family, dimension, arity or known
/// deviations, the smoothing floor and the admissible mean box.
struct OutcomeShape {
  Family family = Family::bernoulli_product;
  std::size_t k = 1;
  std::size_t b = 2;             // arity; 2 for Bernoulli products, 0 for Gaussians
  std::vector<double> sigmas;    // Gaussian per-coordinate standard deviations
  double box_lo = 0.0;           // Gaussian mean box [box_lo, box_hi]^k
  double box_hi = 1.0;
  double lambda = 1e-3;          // smoothing floor, discrete families only

  double max_sigma() const;
  bool operator==(const OutcomeShape&) const = default;
};

/// Assumption-1 budget: -log2 P(y) <= m_cap for every evaluated point.
struct BoundednessBudget {
  double m_cap = 64.0;
  double lambda = 1e-3;

  /// k * log2(1/lambda): the exact bound implied by lambda-smoothing.
  static BoundednessBudget for_discrete(std::size_t k, double lambda);
  static BoundednessBudget for_gaussian(double m_cap) { return {m_cap, 0.0}; }
  static BoundednessBudget for_shape(const OutcomeShape& shape, double gaussian_m_cap);
};

/// A member of one of the three shipped families. Immutable once built.
class DistributionSpec {
 public:
  /// Fair coin on one coordinate.
  DistributionSpec() : DistributionSpec(OutcomeShape{}, {0.5}) {}

  /// Biases must already lie in [lambda, 1-lambda].
  static DistributionSpec bernoulli(std::vector<double> biases, double lambda);
  /// Clamps raw biases into [lambda, 1-lambda].
  static DistributionSpec smoothed_bernoulli(std::vector<double> raw, double lambda);
  /// Row-major k x b probabilities; entries >= lambda, rows summing to 1.
  static DistributionSpec bary(std::size_t k, std::size_t b, std::vector<double> rows,
                               double lambda);
  /// Mixes each row with the uniform distribution so every entry is >= lambda.
  static DistributionSpec smoothed_bary(std::size_t k, std::size_t b, std::vector<double> rows,
                                        double lambda);
  static DistributionSpec gaussian(std::vector<double> means, std::vector<double> sigmas,
                                   double box_lo = 0.0, double box_hi = 1.0);
  /// Builds a member of `shape` from raw parameters, validating strictly.
  static DistributionSpec from_params(const OutcomeShape& shape, std::vector<double> params);

  Family family() const { return shape_.family; }
  std::size_t k() const { return shape_.k; }
  std::size_t arity() const { return shape_.b; }
  const OutcomeShape& shape() const { return shape_; }
  std::span<const double> params() const { return params_; }

  double bias(std::size_t j) const { return params_[j]; }
  double prob(std::size_t j, std::size_t t) const;
  double mean(std::size_t j) const { return params_[j]; }
  double sigma(std::size_t j) const { return shape_.sigmas[j]; }

  bool same_structure(const DistributionSpec& other) const;
  bool operator==(const DistributionSpec&) const = default;

 private:
  DistributionSpec(OutcomeShape shape, std::vector<double> params)
      : shape_(std::move(shape)), params_(std::move(params)) {}

  OutcomeShape shape_;
  std::vector<double> params_;
};

/// Uniform (discrete) or box-centred (Gaussian) member of the shape's family.
DistributionSpec default_spec(const OutcomeShape& shape);

void sample_into(const DistributionSpec& dist, Rng& rng, OutcomeVector& out);
OutcomeVector sample(const DistributionSpec& dist, Rng& rng);

/// Unclamped log2 probability (discrete) or log2 density (Gaussian).
double log_density_exact(const DistributionSpec& dist, std::span<const double> y);
/// max(log2 density, -m_cap).
double log_density(const DistributionSpec& dist, std::span<const double> y,
                   const BoundednessBudget& budget);

/// Exact closed-form KL(p || q) in bits.
double kl_divergence(const DistributionSpec& p, const DistributionSpec& q);
/// Entropy in bits (differential entropy for Gaussians).
double entropy(const DistributionSpec& p);

/// Empirical frequencies projected into the smoothing floor (discrete), or
/// the sample mean clipped into the mean box (Gaussian, known sigma).
DistributionSpec fit_single(const OutcomeShape& shape, std::span<const OutcomeVector> sample);
/// Same estimator from sufficient statistics. Discrete: counts[j*b + t];
/// Gaussian: per-coordinate sums. `total` is the number of points.
DistributionSpec fit_from_counts(const OutcomeShape& shape, std::span<const double> stats,
                                 double total);

/// argmax_{theta >= floor, sum theta = 1} sum_t w_t log theta_t. Used by the
/// b-ary estimator and the EM M-step.
std::vector<double> project_frequencies(std::span<const double> weights, double floor);

/// Number of points of a discrete outcome space, or 0 when it exceeds `limit`.
std::size_t domain_size(const OutcomeShape& shape, std::size_t limit);
/// Calls fn(y) for every point of a discrete domain. Throws when the domain
/// has more than `limit` points or the family is continuous.
void for_each_outcome(const OutcomeShape& shape, std::size_t limit,
                      const std::function<void(const OutcomeVector&)>& fn);

inline constexpr std::size_t kDefaultEnumerationLimit = std::size_t{1} << 20;

}  // namespace pwdlab
