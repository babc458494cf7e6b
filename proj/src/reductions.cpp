#include "pwdlab/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pwdlab {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::forward_event: return "forward-event";
    case Provenance::forward_direct: return "forward-direct";
    case Provenance::reverse_mixture: return "reverse-mixture";
    case Provenance::reverse_direct: return "reverse-direct";
  }
  return "unknown";
}

std::size_t ml_selection_sample_size(double m_bound, double epsilon, double delta,
                                     std::uint64_t list_size) {
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) || !(m_bound > 0.0))
    throw std::invalid_argument("ml_selection_sample_size: need M, epsilon > 0 and delta in (0,1)");
  const double m = m_bound * m_bound / (2.0 * epsilon * epsilon) *
                   std::log(3.0 * (static_cast<double>(list_size) + 1.0) / delta);
  return static_cast<std::size_t>(std::ceil(m));
}

MLSelectionReport ml_select(std::span<const HypothesisModel> models,
                            std::span<const LabeledPair> sample, const BoundednessBudget& budget) {
  if (models.empty()) throw std::invalid_argument("ml_select: empty model list");
  if (sample.empty()) throw std::invalid_argument("ml_select: empty selection sample");
  MLSelectionReport report;
  report.m_sel = sample.size();
  report.losses.reserve(models.size());
  for (const auto& m : models) report.losses.push_back(empirical_log_loss(m, sample, budget));
  report.chosen_index = static_cast<std::size_t>(
      std::min_element(report.losses.begin(), report.losses.end()) - report.losses.begin());
  return report;
}

namespace {

// Flat per-group sufficient statistics:
// [count, sums (k or k*b), and for Gaussians sum of squares, min, max (k each)].
struct StatsLayout {
  explicit StatsLayout(const OutcomeShape& s)
      : shape(s),
        sums(s.family == Family::bary_product ? s.k * s.b : s.k),
        gaussian(s.family == Family::spherical_gaussian),
        stride(1 + sums + (gaussian ? 3 * s.k : 0)) {}

  void init(double* g) const {
    std::fill(g, g + stride, 0.0);
    if (gaussian)
      for (std::size_t j = 0; j < shape.k; ++j) {
        g[1 + sums + shape.k + j] = std::numeric_limits<double>::infinity();
        g[1 + sums + 2 * shape.k + j] = -std::numeric_limits<double>::infinity();
      }
  }

  void add(double* g, std::span<const double> y) const {
    g[0] += 1.0;
    if (shape.family == Family::bary_product) {
      for (std::size_t j = 0; j < shape.k; ++j) g[1 + j * shape.b + static_cast<std::size_t>(y[j])] += 1.0;
      return;
    }
    for (std::size_t j = 0; j < shape.k; ++j) g[1 + j] += y[j];
    if (!gaussian) return;
    const std::size_t k = shape.k;
    for (std::size_t j = 0; j < k; ++j) {
      g[1 + sums + j] += y[j] * y[j];
      g[1 + sums + k + j] = std::min(g[1 + sums + k + j], y[j]);
      g[1 + sums + 2 * k + j] = std::max(g[1 + sums + 2 * k + j], y[j]);
    }
  }

  void merge(double* dst, const double* src) const {
    const std::size_t plain = 1 + sums + (gaussian ? shape.k : 0);
    for (std::size_t i = 0; i < plain; ++i) dst[i] += src[i];
    if (!gaussian) return;
    const std::size_t k = shape.k;
    for (std::size_t j = 0; j < k; ++j) {
      dst[plain + j] = std::min(dst[plain + j], src[plain + j]);
      dst[plain + k + j] = std::max(dst[plain + k + j], src[plain + k + j]);
    }
  }

  // Summed -log2 density of the group under q, or NaN when the clamp might bind.
  double loss(const DistributionSpec& q, const double* g, double m_cap) const {
    const double count = g[0];
    if (count == 0.0) return 0.0;
    const std::size_t k = shape.k;
    double total = 0.0, worst = 0.0;
    if (shape.family == Family::bernoulli_product) {
      for (std::size_t j = 0; j < k; ++j) {
        const double l1 = -std::log2(q.bias(j)), l0 = -std::log2(1.0 - q.bias(j));
        total += g[1 + j] * l1 + (count - g[1 + j]) * l0;
        worst += std::max(l0, l1);
      }
    } else if (shape.family == Family::bary_product) {
      for (std::size_t j = 0; j < k; ++j) {
        double w = 0.0;
        for (std::size_t t = 0; t < shape.b; ++t) {
          const double l = -std::log2(q.prob(j, t));
          total += g[1 + j * shape.b + t] * l;
          w = std::max(w, l);
        }
        worst += w;
      }
    } else {
      for (std::size_t j = 0; j < k; ++j) {
        const double s = q.sigma(j), mu = q.mean(j);
        const double c = std::log(s * std::sqrt(2.0 * std::numbers::pi));
        const double sq = g[1 + k + j] - 2.0 * mu * g[1 + j] + count * mu * mu;
        total += count * c + sq / (2.0 * s * s);
        const double far = std::max(std::abs(g[1 + 2 * k + j] - mu), std::abs(g[1 + 3 * k + j] - mu));
        worst += c + far * far / (2.0 * s * s);
      }
      total /= std::numbers::ln2;
      worst /= std::numbers::ln2;
    }
    if (worst > m_cap) return std::numeric_limits<double>::quiet_NaN();
    return total;
  }

  OutcomeShape shape;
  std::size_t sums;
  bool gaussian;
  std::size_t stride;
};

}  // namespace

MLSelectionReport ml_select_streaming(std::span<const HypothesisModel> models, const GenOracle& gen,
                                      std::size_t m_sel, std::uint64_t seed,
                                      const BoundednessBudget& budget) {
  if (models.empty()) throw std::invalid_argument("ml_select: empty model list");
  if (m_sel == 0) throw std::invalid_argument("ml_select: empty selection sample");

  std::vector<Concept> hs;
  std::vector<std::size_t> h_of(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) {
    auto it = std::find(hs.begin(), hs.end(), models[i].hypothesis);
    h_of[i] = static_cast<std::size_t>(it - hs.begin());
    if (it == hs.end()) hs.push_back(models[i].hypothesis);
  }

  const StatsLayout layout(gen.outcome_shape());
  const std::size_t st = layout.stride;
  std::vector<double> side(hs.size() * 2 * st);
  for (std::size_t i = 0; i < hs.size() * 2; ++i) layout.init(side.data() + i * st);

  if (gen.budget()) gen.budget()->charge(m_sel);
  const std::uint64_t stream_seed = derive_seed(seed, {stream::selection});
  Rng rng(stream_seed);
  LabeledPair pair;
  const std::size_t n = gen.n();
  if (n <= kEnumerableContextBits) {
    const std::size_t cells = std::size_t{1} << n;
    std::vector<double> groups(cells * st);
    for (std::size_t x = 0; x < cells; ++x) layout.init(groups.data() + x * st);
    for (std::size_t t = 0; t < m_sel; ++t) {
      gen.draw_unmetered(rng, pair);
      layout.add(groups.data() + pair.context.bits * st, pair.outcome);
    }
    for (std::size_t x = 0; x < cells; ++x) {
      const double* g = groups.data() + x * st;
      if (g[0] == 0.0) continue;
      for (std::size_t h = 0; h < hs.size(); ++h)
        layout.merge(side.data() + (2 * h + static_cast<std::size_t>(hs[h](ContextVector{x}))) * st, g);
    }
  } else {
    for (std::size_t t = 0; t < m_sel; ++t) {
      gen.draw_unmetered(rng, pair);
      for (std::size_t h = 0; h < hs.size(); ++h)
        layout.add(side.data() + (2 * h + static_cast<std::size_t>(hs[h](pair.context))) * st, pair.outcome);
    }
  }

  MLSelectionReport report;
  report.m_sel = m_sel;
  report.losses.resize(models.size());
  std::vector<std::size_t> fallback;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const double* s0 = side.data() + (2 * h_of[i]) * st;
    const double l = layout.loss(models[i].q0, s0, budget.m_cap) +
                     layout.loss(models[i].q1, s0 + st, budget.m_cap);
    if (std::isnan(l)) fallback.push_back(i);
    report.losses[i] = l;
  }
  if (!fallback.empty()) {
    // Replay the same stream and evaluate point by point with the clamp.
    for (std::size_t i : fallback) report.losses[i] = 0.0;
    Rng replay(stream_seed);
    for (std::size_t t = 0; t < m_sel; ++t) {
      gen.draw_unmetered(replay, pair);
      for (std::size_t i : fallback) {
        const auto& m = models[i];
        report.losses[i] -= log_density(m.component(m.hypothesis(pair.context)), pair.outcome, budget);
      }
    }
  }
  report.chosen_index = static_cast<std::size_t>(
      std::min_element(report.losses.begin(), report.losses.end()) - report.losses.begin());
  return report;
}

EpsilonSplit split_epsilon(double epsilon, double m_bound, std::size_t m_p) {
  return {epsilon / (2.0 * m_bound * static_cast<double>(m_p)), epsilon / 2.0, epsilon};
}

double default_gamma(double m_bound, std::size_t m_p, double epsilon) {
  return 1.0 / direct_threshold_g(m_bound, m_p, epsilon);
}

namespace {

void check_params(const PipelineParams& p) {
  if (!(p.epsilon > 0.0)) throw std::invalid_argument("pipeline.epsilon must be > 0");
  if (!(p.delta > 0.0 && p.delta <= 0.25)) throw std::invalid_argument("pipeline.delta must lie in (0, 1/4]");
  if (p.m_p == 0) throw std::invalid_argument("pipeline.m_p must be positive");
  if (p.xi < 0.0 || p.xi > 1.0) throw std::invalid_argument("pipeline.xi must lie in [0, 1]");
}

class PipelineRun {
 public:
  PipelineRun(const GenOracle& gen, const PipelineParams& params, std::uint64_t seed)
      : gen_(gen), params_(params), seed_(seed) {
    check_params(params);
    budget_ = BoundednessBudget::for_shape(gen.outcome_shape(), params.gaussian_m_cap);
    result_.m_bound = budget_.m_cap;
    result_.eps = split_epsilon(params.epsilon, budget_.m_cap, params.m_p);
    result_.gamma = params.gamma > 0.0 ? params.gamma
                                       : default_gamma(budget_.m_cap, params.m_p, params.epsilon);
    robust_ = RobustnessBudget::make(params.m_p, params.delta);
  }

  const BoundednessBudget& budget() const { return budget_; }
  PipelineResult& result() { return result_; }

  void run_events(Provenance tag) {
    const auto concepts = concept_class(gen_.n(), params_.max_concept_vars);
    struct Found {
      std::size_t class_index;
      ModelProvenance prov;
    };
    std::vector<Found> found;
    for (std::size_t e = 0; e < result_.events.size(); ++e) {
      EventStage& stage = result_.events[e];
      const GuessGrid grid = guess_grid(stage.xi);
      if (grid.pairs.size() > params_.max_grid_pairs)
        throw std::invalid_argument("guess grid too large for xi = " + std::to_string(stage.xi) +
                                    "; set pipeline.xi");
      const std::size_t m_cn =
          params_.m_cn ? params_.m_cn
                       : cn_sample_size(result_.eps.cn, params_.delta, stage.xi, concepts.size(),
                                        grid.pairs.size(), params_.cn_constant);
      result_.m_cn = std::max(result_.m_cn, m_cn);
      const EventLearnResult lr = learn_with_event(gen_, stage.event, stage.xi, concepts, m_cn,
                                                   derive_seed(seed_, {stream::cn_learn, e}));
      result_.draws += lr.draws;
      stage.pairs = lr.entries.size();
      stage.skipped = lr.skipped;
      for (const auto& entry : lr.entries) {
        if (entry.skipped) continue;
        auto it = std::find_if(found.begin(), found.end(),
                               [&](const Found& f) { return f.class_index == entry.class_index; });
        if (it != found.end()) {
          ++it->prov.multiplicity;
          continue;
        }
        ModelProvenance prov;
        prov.tag = tag;
        prov.event_index = e;
        prov.p_hat = entry.p_hat;
        prov.q_hat = entry.q_hat;
        found.push_back({entry.class_index, prov});
      }
    }
    result_.distinct_hypotheses = found.size();

    SeparateConfig cfg{robust_, params_.epsilon, budget_.m_cap, params_.separate_cap};
    for (const auto& f : found) {
      const SeparateResult sr = separate_and_learn(
          gen_, concepts[f.class_index], cfg, derive_seed(seed_, {stream::separate, f.class_index}));
      result_.draws += sr.draws;
      const std::size_t cols = sr.learned[1] ? robust_.r : 1;
      for (std::size_t i = 0; i < sr.models.size(); ++i) {
        ModelProvenance prov = f.prov;
        prov.list0_index = i / cols;
        prov.list1_index = i % cols;
        add(sr.models[i], prov);
      }
      list_.nominal_size += f.prov.multiplicity * sr.models.size();
    }
  }

  void run_direct(Provenance tag) {
    const DirectResult dr = direct_unhealthy_learn(gen_, robust_, derive_seed(seed_, {stream::direct}));
    result_.draws += dr.draws;
    for (std::size_t i = 0; i < dr.specs.size(); ++i) {
      ModelProvenance prov;
      prov.tag = tag;
      prov.list0_index = prov.list1_index = i;
      add({Concept::constant_zero(), dr.specs[i], dr.specs[i]}, prov);
    }
    list_.nominal_size += dr.specs.size();
  }

  PipelineResult finish() {
    const std::size_t m_sel =
        params_.m_sel ? params_.m_sel
                      : ml_selection_sample_size(budget_.m_cap, result_.eps.sel, params_.delta,
                                                 list_.nominal_size);
    result_.selection = ml_select_streaming(list_.models, gen_, m_sel, seed_, budget_);
    result_.draws += m_sel;
    result_.chosen = list_.models[result_.selection.chosen_index];
    result_.chosen_provenance = list_.provenance[result_.selection.chosen_index];
    result_.candidates = std::move(list_);
    return std::move(result_);
  }

  const GenOracle& gen() const { return gen_; }
  const PipelineParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

 private:
  void add(HypothesisModel model, ModelProvenance prov) {
    list_.models.push_back(std::move(model));
    list_.provenance.push_back(prov);
  }

  const GenOracle& gen_;
  const PipelineParams& params_;
  std::uint64_t seed_;
  BoundednessBudget budget_;
  RobustnessBudget robust_;
  CandidateModelList list_;
  PipelineResult result_;
};

double fitted_separation(const DistributionSpec& a, const DistributionSpec& b, const Event& e,
                         std::uint64_t seed) {
  try {
    return event_probability_exact(a, e) - event_probability_exact(b, e);
  } catch (const std::domain_error&) {
    Rng ra(derive_seed(seed, {0})), rb(derive_seed(seed, {1}));
    return event_probability(a, e, ProbabilityMode::monte_carlo, &ra).value -
           event_probability(b, e, ProbabilityMode::monte_carlo, &rb).value;
  }
}

}  // namespace

PipelineResult forward_learn(const GenOracle& gen, const PipelineParams& params, std::uint64_t seed) {
  PipelineRun run(gen, params, seed);
  const EventClass cls = enumerate_event_class(gen.outcome_shape(), run.result().gamma, run.budget());
  const double xi = params.xi > 0.0 ? params.xi : std::min(1.0, cls.xi_bound);
  for (const auto& e : cls.events) run.result().events.push_back({e, xi, "class", 0, 0});
  run.run_events(Provenance::forward_event);
  run.run_direct(Provenance::forward_direct);
  return run.finish();
}

PipelineResult reverse_learn(const GenOracle& gen, const PipelineParams& params, std::uint64_t seed) {
  PipelineRun run(gen, params, seed);
  PipelineResult& res = run.result();
  const OutcomeShape& shape = gen.outcome_shape();

  if (gen.budget()) gen.budget()->charge(params.m_mix);
  Rng rng(derive_seed(seed, {stream::mixture_sample}));
  std::vector<OutcomeVector> ys(params.m_mix);
  LabeledPair pair;
  for (auto& y : ys) {
    gen.draw_unmetered(rng, pair);
    y = std::move(pair.outcome);
  }
  res.draws += params.m_mix;
  res.mixture = em_fit_2mixture(ys, shape, params.restarts, derive_seed(seed, {stream::mixture}));
  res.health = health_check(*res.mixture, params.eta > 0.0 ? params.eta : res.gamma);

  if (res.health->healthy) {
    const DistributionSpec* comps[2] = {&res.mixture->comp0, &res.mixture->comp1};
    const double b = approxdist_margin(res.gamma, res.m_bound, params.alpha);
    for (int order = 0; order < 2; ++order) {
      const DistributionSpec& a = *comps[order];
      const DistributionSpec& q = *comps[1 - order];
      std::vector<std::pair<double, std::string>> taus;
      if (b > 0.0) taus.emplace_back(b * b, "margin");
      taus.emplace_back(kl_divergence(a, q) / 2.0, "half-kl");
      for (const auto& [tau, origin] : taus) {
        Event e = likelihood_ratio_event(a, q, tau);
        const double sep = fitted_separation(
            a, q, e, derive_seed(seed, {stream::verify, static_cast<std::uint64_t>(order)}));
        const double xi = std::min(1.0, params.xi > 0.0 ? params.xi : params.xi_scale * sep);
        if (xi < params.xi_floor) continue;
        res.events.push_back({std::move(e), xi, origin, 0, 0});
      }
    }
    run.run_events(Provenance::reverse_mixture);
  }
  run.run_direct(Provenance::reverse_direct);
  return run.finish();
}

PipelineResult direct_learn(const GenOracle& gen, const PipelineParams& params, std::uint64_t seed) {
  PipelineRun run(gen, params, seed);
  run.run_direct(Provenance::forward_direct);
  return run.finish();
}

GammaDispatch gamma_dispatch(const TargetModel& target, const PipelineParams& params) {
  const BoundednessBudget mb = BoundednessBudget::for_shape(target.p0.shape(), params.gaussian_m_cap);
  GammaDispatch d;
  d.g = direct_threshold_g(mb.m_cap, params.m_p, params.epsilon);
  d.gamma = params.gamma > 0.0 ? params.gamma : 1.0 / d.g;
  d.max_kl = std::max(kl_divergence(target.p0, target.p1), kl_divergence(target.p1, target.p0));
  const JointProbabilities jp =
      joint_probabilities(target.c, Concept::constant_zero(), target.context_dist);
  d.min_weight = std::min(jp.pr_c(0), jp.pr_c(1));
  d.event_path = d.max_kl >= d.gamma;
  const double eta = 1.0 / d.g;
  d.direct_path = !(d.min_weight >= eta && d.max_kl >= eta);
  return d;
}

}  // namespace pwdlab
