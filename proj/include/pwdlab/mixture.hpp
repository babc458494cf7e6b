#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pwdlab/distributions.hpp"

namespace pwdlab {

struct MixtureFit {
  double weight0 = 0.5;
  double weight1 = 0.5;
  DistributionSpec comp0;
  DistributionSpec comp1;
  double loglik = 0.0;  // average log2-likelihood of the sample
  std::size_t restarts_used = 0;
  std::size_t iterations = 0;  // of the winning restart
  bool converged = false;
  bool monotone = true;  // every restart's log-likelihood trace was non-decreasing
  bool collapsed = false;  // the single-component fit won the BIC comparison
  std::vector<double> trace;  // winning restart, one value per iteration
};

struct EmOptions {
  double tolerance = 1e-6;  // bits, on the average log-likelihood
  std::size_t max_iterations = 500;
  double monotone_slack = 1e-9;
  /// Keep the mixture only if its average log-likelihood beats the single fit
  /// by more than (d + 1) log2(m) / (2m) bits, d = parameters per component.
  /// Otherwise return the single fit with weights (1, 0).
  bool bic_select = true;
};

/// Two-component EM with restarts. Restart i starts from two sample points
/// drawn with derive_seed(seed, {mixture, i}); the best final log-likelihood
/// wins, ties to the lower index. A sample of identical points returns the
/// duplicated single fit flagged unconverged.
MixtureFit em_fit_2mixture(std::span<const OutcomeVector> sample, const OutcomeShape& shape,
                           std::size_t restarts, std::uint64_t seed, const EmOptions& options = {});

struct HealthReport {
  double eta = 0.0;
  double min_weight = 0.0;
  double max_kl = 0.0;
  bool healthy = false;
};

HealthReport health_check(const MixtureFit& fit, double eta);

}  // namespace pwdlab
