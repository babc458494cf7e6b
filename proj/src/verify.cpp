#include "pwdlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pwdlab/cccn.hpp"
#include "pwdlab/dist_learn.hpp"
#include "pwdlab/events.hpp"
#include "pwdlab/model.hpp"
#include "pwdlab/reductions.hpp"
#include "pwdlab/scenario.hpp"

namespace pwdlab {
namespace {

constexpr double kSlack = 1e-12;

std::size_t scaled(std::size_t n, double scale) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * scale)));
}

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Uniform on (0, 1].
double open_unit(Rng& rng) { return 1.0 - rng.uniform(); }

DistributionSpec random_member(const OutcomeShape& shape, Rng& rng) {
  std::vector<double> params;
  switch (shape.family) {
    case Family::bernoulli_product:
      for (std::size_t j = 0; j < shape.k; ++j)
        params.push_back(uniform_in(rng, shape.lambda, 1.0 - shape.lambda));
      return DistributionSpec::bernoulli(std::move(params), shape.lambda);
    case Family::bary_product:
      for (std::size_t j = 0; j < shape.k; ++j) {
        double total = 0.0;
        std::vector<double> row(shape.b);
        for (auto& v : row) total += (v = open_unit(rng));
        for (auto v : row) params.push_back(v / total);
      }
      return DistributionSpec::smoothed_bary(shape.k, shape.b, std::move(params), shape.lambda);
    case Family::spherical_gaussian:
      for (std::size_t j = 0; j < shape.k; ++j) params.push_back(uniform_in(rng, shape.box_lo, shape.box_hi));
      return DistributionSpec::gaussian(std::move(params), shape.sigmas, shape.box_lo, shape.box_hi);
  }
  throw std::logic_error("random_member: unknown family");
}

// Bernoulli or b-ary products on at most 2^12 points.
OutcomeShape random_discrete_shape(Rng& rng, double lambda_lo, double lambda_hi) {
  OutcomeShape s;
  if (rng.bernoulli(0.5)) {
    s.family = Family::bernoulli_product;
    s.b = 2;
    s.k = 1 + rng.below(8);
  } else {
    s.family = Family::bary_product;
    s.b = 3 + rng.below(2);
    s.k = 1 + rng.below(s.b == 3 ? 6 : 5);
  }
  s.lambda = uniform_in(rng, lambda_lo, std::min(lambda_hi, 0.5 / static_cast<double>(s.b)));
  return s;
}

double bound_m(const OutcomeShape& shape) {
  return static_cast<double>(shape.k) * std::log2(1.0 / shape.lambda);
}

struct Collector {
  SuiteResult r;
  void add(std::string key, double v) { r.metrics.emplace_back(std::move(key), v); }
};

// Random triples (p̂, q̂, xi) accepted by the validity condition.
void valid_triple(Rng& rng, double& p_hat, double& q_hat, double& xi) {
  do {
    xi = open_unit(rng);
    p_hat = rng.uniform();
    q_hat = rng.uniform();
  } while (p_hat == q_hat || !lab_parameters_valid(p_hat, q_hat, xi));
}

SuiteResult lab_identity(const VerifyOptions& o, Rng& rng) {
  Collector c;
  const std::size_t n = scaled(100000, o.scale);
  double worst = 0.0;
  std::size_t range_violations = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double p_hat, q_hat, xi;
    valid_triple(rng, p_hat, q_hat, xi);
    const LabParams L = lab_parameters(p_hat, q_hat, xi);
    const double target = 0.5 - xi / 4.0;
    worst = std::max({worst, std::abs(q_hat * L.a0 + (1.0 - q_hat) * L.b0 - target),
                      std::abs(p_hat * L.a1 + (1.0 - p_hat) * L.b1 - target)});
    for (double v : {L.a0, L.a1, L.b0, L.b1}) range_violations += v < 0.0 || v > 1.0;
  }
  c.add("triples", static_cast<double>(n));
  c.add("max_residual", worst);
  c.add("tolerance", 1e-12);
  c.add("range_violations", static_cast<double>(range_violations));
  c.r.passed = worst < 1e-12 && range_violations == 0;
  return c.r;
}

SuiteResult noise_bounds(const VerifyOptions& o, Rng& rng) {
  Collector c;
  const std::size_t n = scaled(10000, o.scale);
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double p_hat, q_hat, xi;
    valid_triple(rng, p_hat, q_hat, xi);
    const double delta = xi / 8.0;
    const double p = std::clamp(p_hat + uniform_in(rng, -delta, delta), 0.0, 1.0);
    const double q = std::clamp(q_hat + uniform_in(rng, -delta, delta), 0.0, 1.0);
    const NoiseRates eta = noise_rates(p, q, lab_parameters(p_hat, q_hat, xi));
    const double excess = std::max(eta.eta0, eta.eta1) - (0.5 - xi / 4.0 + delta);
    worst_excess = std::max(worst_excess, excess);
    violations += excess > kSlack;
  }
  c.add("sweep_points", static_cast<double>(n));
  c.add("max_excess", worst_excess);
  c.add("sweep_violations", static_cast<double>(violations));

  // Empirical rates of Lab on E = {y_1 = 1} with guesses off the true values.
  struct Setting { double p, q, xi, shift; };
  const Setting settings[] = {{0.2, 0.8, 0.5, 0.0}, {0.1, 0.9, 0.5, 0.5}, {0.7, 0.3, 0.3, -0.5}};
  const std::size_t m = scaled(100000, o.scale);
  const Event event = Event::coordinate_equals(0, 1);
  double worst_z = 0.0;
  std::size_t mc_failures = 0;
  for (const auto& s : settings) {
    const double delta = s.xi / 8.0;
    const LabParams L = lab_parameters(s.p + s.shift * delta, s.q - s.shift * delta, s.xi);
    const NoiseRates eta = noise_rates(s.p, s.q, L);
    const DistributionSpec d0 = DistributionSpec::bernoulli({s.p, 0.5}, 1e-3);
    const DistributionSpec d1 = DistributionSpec::bernoulli({s.q, 0.5}, 1e-3);
    std::size_t flips[2] = {0, 0};
    LabeledPair pair;
    for (int label = 0; label < 2; ++label) {
      for (std::size_t i = 0; i < m; ++i) {
        sample_into(label ? d1 : d0, rng, pair.outcome);
        flips[label] += lab_label(event, pair, L, rng).label != label;
      }
    }
    const double rates[2] = {eta.eta0, eta.eta1};
    for (int label = 0; label < 2; ++label) {
      const double est = static_cast<double>(flips[label]) / static_cast<double>(m);
      const double se = std::sqrt(rates[label] * (1.0 - rates[label]) / static_cast<double>(m));
      const double z = std::abs(est - rates[label]) / se;
      worst_z = std::max(worst_z, z);
      mc_failures += z > 3.0;
    }
  }
  c.add("mc_samples", static_cast<double>(m));
  c.add("mc_max_z", worst_z);
  c.add("mc_failures", static_cast<double>(mc_failures));
  c.r.passed = violations == 0 && mc_failures == 0;
  return c.r;
}

// A discrete pair with KL(P || Q) > 0 and gamma in (0, min(KL, 1)].
struct DiscreteInstance {
  OutcomeShape shape;
  DistributionSpec p, q;
  double kl = 0.0, gamma = 0.0, m = 0.0;
};

DiscreteInstance random_instance(Rng& rng, double lambda_lo, double lambda_hi) {
  DiscreteInstance in;
  do {
    in.shape = random_discrete_shape(rng, lambda_lo, lambda_hi);
    in.p = random_member(in.shape, rng);
    in.q = random_member(in.shape, rng);
    in.kl = kl_divergence(in.p, in.q);
  } while (!(in.kl > 1e-6));
  in.gamma = std::min(in.kl, 1.0) * open_unit(rng);
  in.m = bound_m(in.shape);
  return in;
}

SuiteResult admit(const VerifyOptions& o, Rng& rng) {
  Collector c;
  const std::size_t n = scaled(1000, o.scale);
  std::size_t violations = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const DiscreteInstance in = random_instance(rng, 0.01, 0.1);
    const Event e = likelihood_ratio_event(in.p, in.q, in.gamma / 2.0);
    const double pe = event_probability_exact(in.p, e);
    const double qe = event_probability_exact(in.q, e);
    const double bound = in.gamma * in.gamma / (8.0 * in.m);
    min_ratio = std::min(min_ratio, (pe - qe) / bound);
    violations += pe - qe < bound - kSlack || !(pe > in.gamma / (2.0 * in.m));
  }
  c.add("pairs", static_cast<double>(n));
  c.add("violations", static_cast<double>(violations));
  c.add("min_separation_over_bound", min_ratio);
  c.r.passed = violations == 0;
  return c.r;
}

SuiteResult approxdist(const VerifyOptions& o, Rng& rng) {
  Collector c;
  const std::size_t n = scaled(1000, o.scale);
  std::size_t violations = 0, premise_failures = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double max_alpha = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    OutcomeShape shape;
    shape.family = Family::bernoulli_product;
    shape.k = 1 + rng.below(2);
    shape.lambda = uniform_in(rng, 0.2, 0.3);
    const double m = bound_m(shape);
    DistributionSpec p, q;
    double kl = 0.0;
    do {
      p = random_member(shape, rng);
      q = random_member(shape, rng);
      kl = kl_divergence(p, q);
    } while (kl < 0.2);
    const double gamma = std::min(kl, 1.0);
    // Largest alpha of the form used below that keeps the premise comfortably.
    const double alpha = std::pow(gamma / (16.0 * m), 8.0) / (8.0 * m * m);
    const double premise = 8.0 * m * (std::sqrt(2.0 * alpha) + std::pow(8.0 * m * m * alpha, 0.125));
    premise_failures += !(gamma > premise);
    max_alpha = std::max(max_alpha, alpha);
    const DistributionSpec p_fit = perturb_to_kl(p, alpha * open_unit(rng), rng);
    const DistributionSpec q_fit = perturb_to_kl(q, alpha * open_unit(rng), rng);
    const double b = approxdist_margin(gamma, m, alpha);
    const Event e = likelihood_ratio_event(p_fit, q_fit, b * b);
    const double sep = event_probability_exact(p, e) - event_probability_exact(q, e);
    const double bound = std::pow(b, 4.0) / (2.0 * m) - std::sqrt(2.0 * alpha);
    min_margin = std::min(min_margin, sep - bound);
    violations += !(b > 0.0) || sep < bound - kSlack;
  }
  c.add("instances", static_cast<double>(n));
  c.add("violations", static_cast<double>(violations));
  c.add("premise_failures", static_cast<double>(premise_failures));
  c.add("min_margin", min_margin);
  c.add("max_alpha", max_alpha);
  c.r.passed = violations == 0 && premise_failures == 0;
  return c.r;
}

SuiteResult event_classes(const VerifyOptions& o, Rng& rng) {
  Collector c;
  const std::size_t n = scaled(1000, o.scale);
  std::size_t product_violations = 0, gaussian_violations = 0;
  double product_min = std::numeric_limits<double>::infinity();
  double gaussian_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const DiscreteInstance in = random_instance(rng, 0.01, 0.1);
    const EventClass cls =
        enumerate_event_class(in.shape, in.gamma, BoundednessBudget::for_shape(in.shape, 64.0));
    const double kb = static_cast<double>(in.shape.k * in.shape.b);
    const double bound = in.gamma * in.gamma / (2.0 * kb * kb * in.m);
    double best = 0.0;
    for (const auto& e : cls.events)
      best = std::max(best, std::abs(event_probability_exact(in.p, e) - event_probability_exact(in.q, e)));
    product_min = std::min(product_min, best / bound);
    product_violations += best < bound - kSlack;
  }
  for (std::size_t i = 0; i < n; ++i) {
    OutcomeShape shape;
    shape.family = Family::spherical_gaussian;
    shape.b = 0;
    shape.k = 1 + rng.below(4);
    shape.sigmas.clear();
    for (std::size_t j = 0; j < shape.k; ++j) shape.sigmas.push_back(uniform_in(rng, 1.0, 2.0));
    DistributionSpec p, q;
    double kl = 0.0;
    do {
      p = random_member(shape, rng);
      q = random_member(shape, rng);
      kl = kl_divergence(p, q);
    } while (!(kl > 1e-6));
    const double gamma = std::min(kl, 1.0) * open_unit(rng);
    const EventClass cls = enumerate_event_class(shape, gamma, BoundednessBudget::for_gaussian(64.0));
    const double sigma = shape.max_sigma();
    const double step = std::sqrt(2.0 * gamma / (static_cast<double>(shape.k) * sigma * sigma));
    const double bound = gaussian_erf_constant(sigma) * step;
    double best = 0.0;
    for (const auto& e : cls.events) {
      const std::size_t j = e.coordinate();
      const double pe = 1.0 - normal_cdf((e.threshold() - p.mean(j)) / p.sigma(j));
      const double qe = 1.0 - normal_cdf((e.threshold() - q.mean(j)) / q.sigma(j));
      best = std::max(best, std::abs(pe - qe));
    }
    gaussian_min = std::min(gaussian_min, best / bound);
    gaussian_violations += best < bound - kSlack;
  }
  c.add("pairs_per_family", static_cast<double>(n));
  c.add("product_violations", static_cast<double>(product_violations));
  c.add("product_min_separation_over_bound", product_min);
  c.add("gaussian_violations", static_cast<double>(gaussian_violations));
  c.add("gaussian_min_separation_over_bound", gaussian_min);
  c.r.passed = product_violations == 0 && gaussian_violations == 0;
  return c.r;
}

SuiteResult logsum(const VerifyOptions& o, Rng& rng) {
  Collector c;
  const std::size_t n = scaled(1000, o.scale);
  std::size_t violations = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const DiscreteInstance in = random_instance(rng, 0.01, 0.1);
    const double w = rng.uniform();
    double kl_mix = 0.0;
    for_each_outcome(in.shape, 1U << 12, [&](const OutcomeVector& y) {
      const double py = std::exp2(log_density_exact(in.p, y));
      const double qy = std::exp2(log_density_exact(in.q, y));
      kl_mix += py * std::log2(py / (w * qy + (1.0 - w) * py));
    });
    const double gap = w * in.kl - kl_mix;
    min_gap = std::min(min_gap, gap);
    violations += gap < -kSlack;
  }
  c.add("triples", static_cast<double>(n));
  c.add("violations", static_cast<double>(violations));
  c.add("min_gap", min_gap);
  c.r.passed = violations == 0;
  return c.r;
}

SuiteResult lecam(const VerifyOptions& o, Rng& rng) {
  Collector c;
  const std::size_t trials = scaled(500, o.scale);
  const std::size_t m = 200;
  OutcomeShape shape;
  shape.k = 4;
  shape.lambda = 0.3;
  const DistributionSpec q0 = random_member(shape, rng);
  const double eps = static_cast<double>(shape.k) / (2.0 * static_cast<double>(m) * std::numbers::ln2);
  bool ok = true;
  for (double mkl : {0.0, 0.1, 0.5}) {
    const DistributionSpec q1 =
        mkl == 0.0 ? q0 : perturb_to_kl(q0, mkl / static_cast<double>(m), rng);
    const LeCamResult res = lecam_experiment(q0, q1, m, eps, trials, rng());
    const double bound = 1.0 - std::sqrt(mkl * std::numbers::ln2 / 2.0);
    std::ostringstream key;
    key << "mkl_" << mkl;
    c.add(key.str() + "_error_sum", res.error_sum);
    c.add(key.str() + "_bound", bound);
    c.add(key.str() + "_sigma", res.std_error);
    if (mkl == 0.0)
      ok = ok && std::abs(res.error_sum - 1.0) <= 3.0 * res.std_error;
    else
      ok = ok && res.error_sum >= bound - 3.0 * res.std_error;
  }
  c.add("trials", static_cast<double>(trials));
  c.add("m", static_cast<double>(m));
  c.r.passed = ok;
  return c.r;
}

SuiteResult robustness(const VerifyOptions& o, Rng& rng) {
  Collector c;
  const std::size_t trials = scaled(200, o.scale);
  OutcomeShape shape;
  shape.k = 8;
  shape.lambda = 0.2;
  const DistributionSpec q0 = random_member(shape, rng);
  const double delta = 0.1;
  const RobustnessBudget budget = RobustnessBudget::make(2000, delta);
  const DistributionSpec q1 = perturb_to_kl(q0, budget.kl_tolerance, rng);
  const double eps = 0.01;
  const StabilityResult res = stability_experiment(q0, q1, budget, eps, trials, rng());
  c.add("trials", static_cast<double>(trials));
  c.add("r", static_cast<double>(budget.r));
  c.add("stream_kl", kl_divergence(q0, q1));
  c.add("single_success", res.single_success);
  c.add("list_success", res.list_success);
  c.add("required", 1.0 - delta);
  c.r.passed = res.list_success >= 1.0 - delta;
  return c.r;
}

SuiteResult ml_select(const VerifyOptions& o, Rng& rng) {
  Collector c;
  const std::size_t trials = scaled(200, o.scale);
  const double eps = 0.1, delta = 0.1;
  const std::size_t list_size = 10;
  OutcomeShape shape;
  shape.k = 2;
  shape.lambda = 0.05;
  TargetModel target{Concept::dictator(1, 4), DistributionSpec::bernoulli({0.2, 0.3}, 0.05),
                     DistributionSpec::bernoulli({0.8, 0.7}, 0.05), ContextDistribution::uniform(4)};
  const BoundednessBudget mb = BoundednessBudget::for_discrete(shape.k, shape.lambda);
  const std::size_t m_sel = ml_selection_sample_size(mb.m_cap, eps, delta, list_size);
  const std::vector<Concept> hyps = {Concept::dictator(1, 4), Concept::dictator(2, 4),
                                     Concept::constant_zero(), Concept::constant_one(),
                                     Concept::conjunction({1, 2}, 4)};
  const GenOracle gen(target);
  std::size_t successes = 0;
  double worst_bad = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<HypothesisModel> models;
    // Models err <= eps/2 are "good", >= 4 eps "bad"; exactly one good one.
    const std::size_t good_at = rng.below(list_size);
    while (models.size() < list_size) {
      const bool want_good = models.size() == good_at;
      HypothesisModel h;
      if (want_good) {
        h = {target.c, perturb_to_kl(target.p0, 0.5 * eps * rng.uniform(), rng),
             perturb_to_kl(target.p1, 0.5 * eps * rng.uniform(), rng)};
      } else {
        try {
          h = {hyps[rng.below(hyps.size())], perturb_to_kl(target.p0, uniform_in(rng, 0.0, 0.6), rng),
               perturb_to_kl(target.p1, uniform_in(rng, 0.0, 0.6), rng)};
        } catch (const std::domain_error&) {
          continue;
        }
      }
      const double err = model_error(target, h).value;
      if (want_good ? err > eps : err < 4.0 * eps) continue;
      if (!want_good) worst_bad = std::min(worst_bad, err);
      models.push_back(std::move(h));
    }
    const MLSelectionReport rep = ml_select_streaming(models, gen, m_sel, rng(), mb);
    successes += model_error(target, models[rep.chosen_index]).value <= 4.0 * eps;
  }
  const double freq = static_cast<double>(successes) / static_cast<double>(trials);
  c.add("trials", static_cast<double>(trials));
  c.add("m_sel", static_cast<double>(m_sel));
  c.add("min_bad_err", worst_bad);
  c.add("success_frequency", freq);
  c.add("required", 1.0 - delta);
  c.r.passed = freq >= 1.0 - delta;
  return c.r;
}

SuiteResult decomposition(const VerifyOptions& o, Rng& rng) {
  Collector c;
  const std::size_t m = scaled(100000, o.scale);
  struct Case { TargetModel target; HypothesisModel hyp; };
  std::vector<Case> cases;
  {
    const double lambda = 1e-3;
    TargetModel t{Concept::conjunction({1, 2}, 10),
                  DistributionSpec::bernoulli(std::vector<double>(8, 0.3), lambda),
                  DistributionSpec::bernoulli(std::vector<double>(8, 0.7), lambda),
                  ContextDistribution::uniform(10)};
    cases.push_back({t, {t.c, t.p0, t.p1}});
    cases.push_back({t, {Concept::dictator(1, 10), perturb_to_kl(t.p0, 0.05, rng), perturb_to_kl(t.p1, 0.2, rng)}});
  }
  {
    OutcomeShape s;
    s.family = Family::bary_product;
    s.k = 3;
    s.b = 3;
    s.lambda = 0.01;
    TargetModel t{Concept::dictator(2, 6), random_member(s, rng), random_member(s, rng),
                  ContextDistribution::product({0.5, 0.3, 0.5, 0.5, 0.5, 0.5})};
    cases.push_back({t, {Concept::constant_one(), random_member(s, rng), random_member(s, rng)}});
  }
  double worst_z = 0.0;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& [target, hyp] = cases[i];
    const std::vector<LabeledPair> sample = gen_sample(target, m, rng);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& pr : sample) {
      const double v = -log_density_exact(hyp.component(hyp.hypothesis(pr.context)), pr.outcome);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / static_cast<double>(m);
    const double var = std::max(0.0, sum_sq / static_cast<double>(m) - mean * mean);
    const double se = std::sqrt(var / static_cast<double>(m));
    const double recovered = mean - conditional_entropy(target);
    const double exact = model_error(target, hyp).value;
    const double z = se > 0.0 ? std::abs(recovered - exact) / se : std::abs(recovered - exact) / kSlack;
    worst_z = std::max(worst_z, z);
    failures += z > 3.0;
    c.add("case" + std::to_string(i) + "_exact", exact);
    c.add("case" + std::to_string(i) + "_recovered", recovered);
  }
  c.add("samples", static_cast<double>(m));
  c.add("max_z", worst_z);
  c.r.passed = failures == 0;
  return c.r;
}

using SuiteFn = SuiteResult (*)(const VerifyOptions&, Rng&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r = {
      {"lab-identity", lab_identity}, {"noise-bounds", noise_bounds},
      {"admit", admit},               {"approxdist", approxdist},
      {"event-classes", event_classes}, {"logsum", logsum},
      {"lecam", lecam},               {"robustness", robustness},
      {"ml-select", ml_select},       {"decomposition", decomposition}};
  return r;
}

}  // namespace

double SuiteResult::metric(std::string_view key) const {
  for (const auto& [k, v] : metrics)
    if (k == key) return v;
  throw std::out_of_range("no metric '" + std::string(key) + "' in suite " + name);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

SuiteResult run_suite(std::string_view name, const VerifyOptions& options) {
  const auto& reg = registry();
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (reg[i].first != name) continue;
    const auto start = std::chrono::steady_clock::now();
    Rng rng(derive_seed(options.seed, {stream::verify, i}));
    SuiteResult r = reg[i].second(options, rng);
    r.name = reg[i].first;
    if (options.timing)
      r.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
  }
  throw ConfigError("verify", "unknown suite '" + std::string(name) + "'");
}

std::vector<SuiteResult> run_suites(std::string_view which, const VerifyOptions& options) {
  if (which != "all") return {run_suite(which, options)};
  std::vector<SuiteResult> out;
  for (const auto& name : suite_names()) out.push_back(run_suite(name, options));
  return out;
}

std::string suites_json(const std::vector<SuiteResult>& results, const VerifyOptions& options) {
  nlohmann::ordered_json doc;
  doc["seed"] = options.seed;
  doc["scale"] = options.scale;
  bool all = true;
  nlohmann::ordered_json suites = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    nlohmann::ordered_json s;
    s["name"] = r.name;
    s["passed"] = r.passed;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.metrics) {
      if (std::isfinite(v))
        metrics[k] = v;
      else
        metrics[k] = nullptr;
    }
    s["metrics"] = std::move(metrics);
    s["detail"] = r.detail;
    if (r.runtime_ms) s["runtime_ms"] = *r.runtime_ms;
    suites.push_back(std::move(s));
  }
  doc["passed"] = all;
  doc["suites"] = std::move(suites);
  return doc.dump(2) + "\n";
}

}  // namespace pwdlab
