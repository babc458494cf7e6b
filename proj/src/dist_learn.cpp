#include "pwdlab/dist_learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pwdlab {

std::size_t amplification_repetitions(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  // Guard against ln ratios landing a hair above an integer.
  const double r = std::log(1.0 / delta) / std::log(4.0 / 3.0);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(r - 1e-9)));
}

RobustnessBudget RobustnessBudget::make(std::size_t m_p, double delta) {
  if (m_p == 0) throw std::invalid_argument("m_p must be positive");
  return {m_p, amplification_repetitions(delta), 1.0 / (2.0 * static_cast<double>(m_p))};
}

BlockFitter::BlockFitter(const OutcomeShape& shape, std::size_t block_size, std::size_t blocks)
    : shape_(shape),
      block_size_(block_size),
      blocks_(blocks),
      stride_(shape.family == Family::bary_product ? shape.k * shape.b : shape.k),
      stats_(stride_ * blocks, 0.0) {
  if (block_size == 0 || blocks == 0) throw std::invalid_argument("BlockFitter needs nonempty blocks");
}

bool BlockFitter::add(std::span<const double> y) {
  if (full()) return false;
  double* s = stats_.data() + (seen_ / block_size_) * stride_;
  if (shape_.family == Family::bary_product) {
    for (std::size_t j = 0; j < shape_.k; ++j) s[j * shape_.b + static_cast<std::size_t>(y[j])] += 1.0;
  } else {
    for (std::size_t j = 0; j < shape_.k; ++j) s[j] += y[j];
  }
  ++seen_;
  return !full();
}

std::vector<DistributionSpec> BlockFitter::fit() const {
  if (!full()) throw std::logic_error("BlockFitter::fit before every block is full");
  std::vector<DistributionSpec> out;
  out.reserve(blocks_);
  for (std::size_t i = 0; i < blocks_; ++i)
    out.push_back(fit_from_counts(shape_, std::span<const double>(stats_).subspan(i * stride_, stride_),
                                  static_cast<double>(block_size_)));
  return out;
}

std::vector<DistributionSpec> robust_learn_list(std::span<const OutcomeVector> stream,
                                                const OutcomeShape& shape,
                                                const RobustnessBudget& budget) {
  if (stream.size() < budget.r * budget.m_p)
    throw std::invalid_argument("robust_learn_list: stream shorter than r * m_p");
  BlockFitter fitter(shape, budget.m_p, budget.r);
  for (const auto& y : stream)
    if (!fitter.add(y)) break;
  return fitter.fit();
}

std::uint64_t separation_draws(const RobustnessBudget& budget, double epsilon, double m_bound,
                               std::uint64_t cap) {
  const double floor = epsilon / (2.0 * m_bound);
  const double n = std::ceil(4.0 * static_cast<double>(budget.r * budget.m_p) / floor);
  if (n >= static_cast<double>(cap)) return cap;
  return static_cast<std::uint64_t>(n);
}

SeparateResult separate_and_learn(const GenOracle& gen, const Concept& h,
                                  const SeparateConfig& config, std::uint64_t seed) {
  const OutcomeShape& shape = gen.outcome_shape();
  const auto& rb = config.robust;
  const std::uint64_t n = separation_draws(rb, config.epsilon, config.m_bound, config.draw_cap);
  BlockFitter side[2] = {BlockFitter(shape, rb.m_p, rb.r), BlockFitter(shape, rb.m_p, rb.r)};
  SeparateResult result;
  Rng rng(derive_seed(seed, {stream::separate}));
  LabeledPair pair;
  for (std::uint64_t t = 0; t < n; ++t) {
    gen.draw_into(rng, pair);
    ++result.draws;
    const int s = h(pair.context);
    ++result.side_points[s];
    side[s].add(pair.outcome);
    if (side[0].full() && side[1].full()) break;
  }
  std::vector<DistributionSpec> lists[2];
  for (int s = 0; s < 2; ++s) {
    result.learned[s] = side[s].full();
    if (result.learned[s])
      lists[s] = side[s].fit();
    else
      lists[s] = {default_spec(shape)};
  }
  for (const auto& q0 : lists[0])
    for (const auto& q1 : lists[1]) result.models.push_back({h, q0, q1});
  return result;
}

double direct_threshold_g(double m_bound, std::size_t m_p, double epsilon) {
  const double m = static_cast<double>(m_p);
  return std::max(2.0 * m_bound * m / epsilon, 2.0 * m);
}

DirectResult direct_unhealthy_learn(const GenOracle& gen, const RobustnessBudget& budget,
                                    std::uint64_t seed) {
  BlockFitter fitter(gen.outcome_shape(), budget.m_p, budget.r);
  Rng rng(derive_seed(seed, {stream::direct}));
  DirectResult result;
  LabeledPair pair;
  while (!fitter.full()) {
    gen.draw_into(rng, pair);
    ++result.draws;
    fitter.add(pair.outcome);
  }
  result.specs = fitter.fit();
  return result;
}

namespace {

DistributionSpec fit_fresh(const DistributionSpec& source, std::size_t m, Rng& rng,
                           OutcomeVector& scratch) {
  BlockFitter fitter(source.shape(), m, 1);
  while (!fitter.full()) {
    sample_into(source, rng, scratch);
    fitter.add(scratch);
  }
  return fitter.fit().front();
}

}  // namespace

LeCamResult lecam_experiment(const DistributionSpec& q0, const DistributionSpec& q1, std::size_t m,
                             double epsilon, std::size_t trials, std::uint64_t seed) {
  if (trials == 0 || m == 0) throw std::invalid_argument("lecam_experiment needs m, trials >= 1");
  std::size_t wrong[2] = {0, 0};
  OutcomeVector scratch;
  for (std::size_t t = 0; t < trials; ++t) {
    for (int i = 0; i < 2; ++i) {
      Rng rng(derive_seed(seed, {stream::verify, t, static_cast<std::uint64_t>(i)}));
      const DistributionSpec fit = fit_fresh(i ? q1 : q0, m, rng, scratch);
      const int answer = kl_divergence(q0, fit) <= epsilon ? 0 : 1;
      wrong[i] += answer != i;
    }
  }
  LeCamResult r;
  r.trials = trials;
  const double n = static_cast<double>(trials);
  r.error0 = static_cast<double>(wrong[0]) / n;
  r.error1 = static_cast<double>(wrong[1]) / n;
  r.error_sum = r.error0 + r.error1;
  r.std_error = std::sqrt((r.error0 * (1.0 - r.error0) + r.error1 * (1.0 - r.error1)) / n);
  const double kl = kl_divergence(q0, q1);
  r.lower_bound = 1.0 - std::sqrt(static_cast<double>(m) * kl * std::numbers::ln2 / 2.0);
  return r;
}

StabilityResult stability_experiment(const DistributionSpec& q0, const DistributionSpec& q1,
                                     const RobustnessBudget& budget, double epsilon,
                                     std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("stability_experiment needs trials >= 1");
  std::size_t single = 0, list = 0;
  OutcomeVector scratch;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, {stream::verify, t}));
    BlockFitter fitter(q1.shape(), budget.m_p, budget.r);
    while (!fitter.full()) {
      sample_into(q1, rng, scratch);
      fitter.add(scratch);
    }
    const auto fits = fitter.fit();
    single += kl_divergence(q0, fits.front()) <= epsilon;
    list += std::any_of(fits.begin(), fits.end(),
                        [&](const DistributionSpec& f) { return kl_divergence(q0, f) <= epsilon; });
  }
  const double n = static_cast<double>(trials);
  return {static_cast<double>(single) / n, static_cast<double>(list) / n, trials};
}

DistributionSpec perturb_to_kl(const DistributionSpec& base, double kl_target, Rng& rng) {
  if (!(kl_target >= 0.0)) throw std::invalid_argument("perturb_to_kl: target must be >= 0");
  if (kl_target == 0.0) return base;
  const OutcomeShape& shape = base.shape();
  const std::vector<double> p(base.params().begin(), base.params().end());
  double lo = shape.lambda, hi = 1.0 - shape.lambda;
  if (shape.family == Family::bary_product) {
    hi = 1.0;
  } else if (shape.family == Family::spherical_gaussian) {
    lo = shape.box_lo;
    hi = shape.box_hi;
  }
  std::vector<double> d(p.size());
  auto at = [&](double t) {
    std::vector<double> q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = std::clamp(p[i] + t * d[i], lo, hi);
    if (shape.family == Family::bary_product) {
      for (std::size_t j = 0; j < shape.k; ++j) {
        double s = 0.0;
        for (std::size_t u = 0; u < shape.b; ++u) s += q[j * shape.b + u];
        for (std::size_t u = 0; u < shape.b; ++u) q[j * shape.b + u] /= s;
      }
    }
    return DistributionSpec::from_params(shape, std::move(q));
  };
  // Directions that run into the parameter box too early are redrawn.
  double t_max = 0.0;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 64)
      throw std::domain_error("perturb_to_kl: target divergence not reachable from this base");
    for (auto& v : d) v = rng.normal();
    if (shape.family == Family::bary_product) {
      for (std::size_t j = 0; j < shape.k; ++j) {
        double mean = 0.0;
        for (std::size_t t = 0; t < shape.b; ++t) mean += d[j * shape.b + t];
        mean /= static_cast<double>(shape.b);
        for (std::size_t t = 0; t < shape.b; ++t) d[j * shape.b + t] -= mean;
      }
    }
    t_max = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (d[i] > 0.0) t_max = std::min(t_max, (hi - p[i]) / d[i]);
      if (d[i] < 0.0) t_max = std::min(t_max, (lo - p[i]) / d[i]);
    }
    t_max *= 0.999;
    if (std::isfinite(t_max) && kl_divergence(base, at(t_max)) >= kl_target) break;
  }
  double a = 0.0, b = t_max;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    (kl_divergence(base, at(mid)) < kl_target ? a : b) = mid;
  }
  return at(a);
}

}  // namespace pwdlab
