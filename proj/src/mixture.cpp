#include "pwdlab/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>

#include "pwdlab/rng.hpp"

namespace pwdlab {

namespace {

// Sample with repeated points merged (discrete families only).
struct WeightedSample {
  std::vector<OutcomeVector> points;
  std::vector<double> counts;
  double total = 0.0;
};

WeightedSample compress(std::span<const OutcomeVector> sample, const OutcomeShape& shape) {
  WeightedSample ws;
  ws.total = static_cast<double>(sample.size());
  if (!is_discrete(shape.family)) {
    ws.points.assign(sample.begin(), sample.end());
    ws.counts.assign(sample.size(), 1.0);
    return ws;
  }
  std::map<OutcomeVector, double> merged;
  for (const auto& y : sample) merged[y] += 1.0;
  for (auto& [y, c] : merged) {
    ws.points.push_back(y);
    ws.counts.push_back(c);
  }
  return ws;
}

std::size_t stats_size(const OutcomeShape& shape) {
  return shape.family == Family::bary_product ? shape.k * shape.b : shape.k;
}

void accumulate(const OutcomeShape& shape, const OutcomeVector& y, double w, double* s) {
  if (shape.family == Family::bary_product) {
    for (std::size_t j = 0; j < shape.k; ++j) s[j * shape.b + static_cast<std::size_t>(y[j])] += w;
  } else {
    for (std::size_t j = 0; j < shape.k; ++j) s[j] += w * y[j];
  }
}

// Point mass at y mixed half-and-half with the uniform distribution
// (discrete), or y clipped into the mean box (Gaussian).
DistributionSpec seed_component(const OutcomeShape& shape, const OutcomeVector& y) {
  std::vector<double> stats(stats_size(shape), 0.0);
  if (shape.family == Family::spherical_gaussian) {
    accumulate(shape, y, 1.0, stats.data());
    return fit_from_counts(shape, stats, 1.0);
  }
  const double b = static_cast<double>(shape.b);
  if (shape.family == Family::bernoulli_product) {
    for (std::size_t j = 0; j < shape.k; ++j) stats[j] = 0.5 * y[j] + 0.25;
    return fit_from_counts(shape, stats, 1.0);
  }
  for (std::size_t j = 0; j < shape.k; ++j)
    for (std::size_t t = 0; t < shape.b; ++t)
      stats[j * shape.b + t] = 0.5 / b + (static_cast<std::size_t>(y[j]) == t ? 0.5 : 0.0);
  return fit_from_counts(shape, stats, 1.0);
}

double log2_sum(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == -INFINITY) return hi;
  return hi + std::log2(std::exp2(a - hi) + std::exp2(b - hi));
}

struct EmRun {
  double w1;
  DistributionSpec c0, c1;
  double loglik;
  std::size_t iterations;
  bool converged;
  bool monotone;
  std::vector<double> trace;
};

EmRun run_em(const WeightedSample& ws, const OutcomeShape& shape, DistributionSpec c0,
             DistributionSpec c1, const EmOptions& opt) {
  const std::size_t m = ws.points.size();
  const std::size_t ss = stats_size(shape);
  double w1 = 0.5;
  std::vector<double> resp(m);
  std::vector<double> s0(ss), s1(ss);
  EmRun run{w1, c0, c1, -INFINITY, 0, false, true, {}};
  double prev = -INFINITY;
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    // E-step, also yields the log-likelihood of the current parameters.
    double ll = 0.0;
    const double lw0 = w1 < 1.0 ? std::log2(1.0 - w1) : -INFINITY;
    const double lw1 = w1 > 0.0 ? std::log2(w1) : -INFINITY;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = lw0 + log_density_exact(c0, ws.points[i]);
      const double b = lw1 + log_density_exact(c1, ws.points[i]);
      const double tot = log2_sum(a, b);
      resp[i] = std::exp2(b - tot);
      ll += ws.counts[i] * tot;
    }
    ll /= ws.total;
    run.trace.push_back(ll);
    if (ll < prev - opt.monotone_slack) run.monotone = false;
    run.w1 = w1;
    run.c0 = c0;
    run.c1 = c1;
    run.loglik = ll;
    run.iterations = it;
    if (std::abs(ll - prev) < opt.tolerance) {
      run.converged = true;
      return run;
    }
    prev = ll;

    // M-step: exact constrained maximizers, so the likelihood never drops.
    std::fill(s0.begin(), s0.end(), 0.0);
    std::fill(s1.begin(), s1.end(), 0.0);
    double n1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r1 = ws.counts[i] * resp[i];
      const double r0 = ws.counts[i] - r1;
      n1 += r1;
      accumulate(shape, ws.points[i], r0, s0.data());
      accumulate(shape, ws.points[i], r1, s1.data());
    }
    const double n0 = ws.total - n1;
    w1 = n1 / ws.total;
    if (n0 > 1e-12) c0 = fit_from_counts(shape, s0, n0);
    if (n1 > 1e-12) c1 = fit_from_counts(shape, s1, n1);
  }
  return run;
}

}  // namespace

MixtureFit em_fit_2mixture(std::span<const OutcomeVector> sample, const OutcomeShape& shape,
                           std::size_t restarts, std::uint64_t seed, const EmOptions& options) {
  if (sample.size() < 20) throw std::invalid_argument("em_fit_2mixture needs at least 20 points");
  if (restarts == 0) throw std::invalid_argument("em_fit_2mixture needs restarts >= 1");
  for (const auto& y : sample)
    if (y.size() != shape.k) throw std::invalid_argument("outcome dimension mismatch");

  const bool degenerate = std::all_of(sample.begin(), sample.end(),
                                      [&](const OutcomeVector& y) { return y == sample.front(); });
  if (degenerate) {
    const DistributionSpec single = fit_single(shape, sample);
    const double ll = log_density_exact(single, sample.front());
    return {0.5, 0.5, single, single, ll, 0, 0, false, true, false, {}};
  }

  const WeightedSample ws = compress(sample, shape);
  std::optional<EmRun> best;
  bool monotone = true;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, {stream::mixture, r}));
    const std::size_t i = rng.below(sample.size());
    std::size_t j = rng.below(sample.size());
    for (int tries = 0; sample[j] == sample[i] && tries < 64; ++tries) j = rng.below(sample.size());
    EmRun run = run_em(ws, shape, seed_component(shape, sample[i]), seed_component(shape, sample[j]),
                       options);
    monotone = monotone && run.monotone;
    if (!best || run.loglik > best->loglik) best = std::move(run);
  }
  MixtureFit fit{1.0 - best->w1, best->w1,  best->c0,         best->c1,         best->loglik,
                 restarts,       best->iterations, best->converged, monotone, false, std::move(best->trace)};
  if (options.bic_select) {
    const DistributionSpec single = fit_single(shape, sample);
    double ll = 0.0;
    for (std::size_t i = 0; i < ws.points.size(); ++i) ll += ws.counts[i] * log_density_exact(single, ws.points[i]);
    ll /= ws.total;
    const double d = static_cast<double>(shape.family == Family::bary_product ? shape.k * (shape.b - 1) : shape.k);
    const double m = ws.total;
    if (fit.loglik - ll <= (d + 1.0) * std::log2(m) / (2.0 * m)) {
      fit.weight0 = 1.0;
      fit.weight1 = 0.0;
      fit.comp0 = fit.comp1 = single;
      fit.loglik = ll;
      fit.collapsed = true;
    }
  }
  return fit;
}

HealthReport health_check(const MixtureFit& fit, double eta) {
  HealthReport h;
  h.eta = eta;
  h.min_weight = std::min(fit.weight0, fit.weight1);
  h.max_kl = std::max(kl_divergence(fit.comp0, fit.comp1), kl_divergence(fit.comp1, fit.comp0));
  h.healthy = h.min_weight >= eta && h.max_kl >= eta;
  return h;
}

}  // namespace pwdlab
