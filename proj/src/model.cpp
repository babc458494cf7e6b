#include "pwdlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pwdlab {

std::string_view to_string(ConceptKind kind) {
  switch (kind) {
    case ConceptKind::monotone_conjunction: return "monotone-conjunction";
    case ConceptKind::dictator: return "dictator";
    case ConceptKind::constant_zero: return "constant-zero";
    case ConceptKind::constant_one: return "constant-one";
  }
  return "unknown";
}

ConceptKind parse_concept_kind(std::string_view name) {
  if (name == "monotone-conjunction") return ConceptKind::monotone_conjunction;
  if (name == "dictator") return ConceptKind::dictator;
  if (name == "constant-zero") return ConceptKind::constant_zero;
  if (name == "constant-one") return ConceptKind::constant_one;
  throw std::invalid_argument("unknown concept kind '" + std::string(name) + "'");
}

Concept Concept::conjunction(std::vector<std::size_t> variables, std::size_t n) {
  if (n == 0 || n > kMaxContextBits) throw std::invalid_argument("context dimension must be in [1, 64]");
  std::sort(variables.begin(), variables.end());
  if (std::adjacent_find(variables.begin(), variables.end()) != variables.end())
    throw std::invalid_argument("conjunction variables must be distinct");
  std::uint64_t mask = 0;
  for (std::size_t v : variables) {
    if (v < 1 || v > n) throw std::invalid_argument("conjunction variable out of range [1, n]");
    mask |= std::uint64_t{1} << (v - 1);
  }
  if (variables.empty()) return constant_one();
  return Concept(ConceptKind::monotone_conjunction, std::move(variables), mask);
}

Concept Concept::dictator(std::size_t variable, std::size_t n) {
  if (n == 0 || n > kMaxContextBits) throw std::invalid_argument("context dimension must be in [1, 64]");
  if (variable < 1 || variable > n) throw std::invalid_argument("dictator variable out of range [1, n]");
  return Concept(ConceptKind::dictator, {variable}, std::uint64_t{1} << (variable - 1));
}

std::string Concept::describe() const {
  switch (kind_) {
    case ConceptKind::constant_zero: return "0";
    case ConceptKind::constant_one: return "1";
    default: break;
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < variables_.size(); ++i) os << (i ? "&x" : "x") << variables_[i];
  return os.str();
}

std::vector<Concept> concept_class(std::size_t n, std::size_t max_vars) {
  std::vector<Concept> out{Concept::constant_zero(), Concept::constant_one()};
  for (std::size_t v = 1; v <= n; ++v) out.push_back(Concept::dictator(v, n));
  // Lexicographic enumeration of index sets of size 2..max_vars.
  for (std::size_t size = 2; size <= std::min(max_vars, n); ++size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i + 1;
    while (true) {
      out.push_back(Concept::conjunction(idx, n));
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == n - size + i) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

ContextDistribution ContextDistribution::uniform(std::size_t n) {
  if (n == 0 || n > kMaxContextBits) throw std::invalid_argument("context dimension must be in [1, 64]");
  return ContextDistribution(ContextKind::uniform, std::vector<double>(n, 0.5));
}

ContextDistribution ContextDistribution::product(std::vector<double> biases) {
  if (biases.empty() || biases.size() > kMaxContextBits)
    throw std::invalid_argument("context dimension must be in [1, 64]");
  for (std::size_t i = 0; i < biases.size(); ++i)
    if (!(biases[i] >= 0.0 && biases[i] <= 1.0)) {
      std::ostringstream os;
      os << "context bias[" << i << "] = " << biases[i] << " outside [0, 1]";
      throw std::invalid_argument(os.str());
    }
  return ContextDistribution(ContextKind::independent_product, std::move(biases));
}

ContextVector ContextDistribution::sample(Rng& rng) const {
  const std::size_t n = biases_.size();
  if (kind_ == ContextKind::uniform) {
    std::uint64_t bits = rng();
    if (n < 64) bits &= (std::uint64_t{1} << n) - 1;
    return {bits};
  }
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (rng.uniform() < biases_[i]) bits |= std::uint64_t{1} << i;
  return {bits};
}

double ContextDistribution::probability(ContextVector x) const {
  double p = 1.0;
  for (std::size_t i = 0; i < biases_.size(); ++i) p *= x[i] ? biases_[i] : 1.0 - biases_[i];
  return p;
}

// ---------------------------------------------------------------------------

void TargetModel::validate() const {
  if (!p0.same_structure(p1)) throw FamilyMismatch("P0 and P1 must share family and structure");
  for (std::size_t v : c.variables())
    if (v > n()) throw std::invalid_argument("concept variable exceeds context dimension");
}

void DrawBudget::charge(std::uint64_t draws) {
  if (draws > remaining()) {
    std::ostringstream os;
    os << "draw budget exhausted: " << used_ << " used, " << draws << " requested, limit " << limit_;
    throw BudgetExhausted(os.str());
  }
  used_ += draws;
}

GenOracle::GenOracle(const TargetModel& target, DrawBudget* budget)
    : target_(&target), budget_(budget) {
  target.validate();
}

void GenOracle::draw_into(Rng& rng, LabeledPair& out) const {
  if (budget_) budget_->charge(1);
  draw_unmetered(rng, out);
}

void GenOracle::draw_unmetered(Rng& rng, LabeledPair& out) const {
  out.context = target_->context_dist.sample(rng);
  sample_into(target_->component(target_->c(out.context)), rng, out.outcome);
}

LabeledPair GenOracle::draw(Rng& rng) const {
  LabeledPair pair;
  draw_into(rng, pair);
  return pair;
}

std::vector<LabeledPair> GenOracle::draw(Rng& rng, std::size_t count) const {
  if (budget_) budget_->charge(count);
  std::vector<LabeledPair> out(count);
  for (auto& pair : out) {
    pair.context = target_->context_dist.sample(rng);
    sample_into(target_->component(target_->c(pair.context)), rng, pair.outcome);
  }
  return out;
}

std::vector<LabeledPair> gen_sample(const TargetModel& target, std::size_t count, Rng& rng) {
  if (count == 0) throw std::invalid_argument("gen_sample needs count >= 1");
  return GenOracle(target).draw(rng, count);
}

// ---------------------------------------------------------------------------

namespace {

// Pr[all variables in mask are 1] under a product distribution.
double all_ones(std::uint64_t mask, const ContextDistribution& d) {
  double p = 1.0;
  for (std::size_t i = 0; i < d.n(); ++i)
    if ((mask >> i) & 1U) p *= d.bias(i);
  return p;
}

// Pr[concept = 1]; constants handled by mask conventions.
double positive_rate(const Concept& c, const ContextDistribution& d) {
  if (c.kind() == ConceptKind::constant_zero) return 0.0;
  return all_ones(c.mask(), d);
}

}  // namespace

JointProbabilities joint_probabilities(const Concept& c, const Concept& h,
                                       const ContextDistribution& d) {
  JointProbabilities jp;
  const std::size_t n = d.n();
  if (n <= kEnumerableContextBits) {
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
      ContextVector x{bits};
      jp.cell[c(x)][h(x)] += d.probability(x);
    }
    return jp;
  }
  // Conjunction-like concepts: Pr[c=1,h=1] = Pr[all vars of c and h are 1].
  const double pc = positive_rate(c, d);
  const double ph = positive_rate(h, d);
  double both = 0.0;
  if (c.kind() != ConceptKind::constant_zero && h.kind() != ConceptKind::constant_zero)
    both = all_ones(c.mask() | h.mask(), d);
  jp.cell[1][1] = both;
  jp.cell[1][0] = pc - both;
  jp.cell[0][1] = ph - both;
  jp.cell[0][0] = 1.0 - pc - ph + both;
  return jp;
}

double classification_error(const Concept& c, const Concept& h, const ContextDistribution& d) {
  return joint_probabilities(c, h, d).disagreement();
}

ErrorEstimate model_error(const TargetModel& target, const HypothesisModel& hyp,
                          ErrorMode mode, Rng* rng, std::size_t mc_samples) {
  double kl[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) kl[i][j] = kl_divergence(target.component(i), hyp.component(j));

  if (mode == ErrorMode::exact) {
    const JointProbabilities jp = joint_probabilities(target.c, hyp.hypothesis, target.context_dist);
    double err = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (jp.cell[i][j] > 0.0) err += jp.cell[i][j] * kl[i][j];
    return {err, 0.0};
  }
  if (rng == nullptr || mc_samples < 2)
    throw std::invalid_argument("Monte Carlo error needs a random stream and >= 2 samples");
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < mc_samples; ++s) {
    const ContextVector x = target.context_dist.sample(*rng);
    const double v = kl[target.c(x)][hyp.hypothesis(x)];
    sum += v;
    sum_sq += v * v;
  }
  const double m = static_cast<double>(mc_samples);
  const double mean = sum / m;
  const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
  return {mean, std::sqrt(var / m)};
}

double empirical_log_loss(const HypothesisModel& hyp, std::span<const LabeledPair> sample,
                          const BoundednessBudget& budget) {
  if (sample.empty()) throw std::invalid_argument("empirical_log_loss needs a nonempty sample");
  double loss = 0.0;
  for (const auto& pair : sample)
    loss -= log_density(hyp.component(hyp.hypothesis(pair.context)), pair.outcome, budget);
  return loss;
}

double conditional_entropy(const TargetModel& target) {
  const JointProbabilities jp =
      joint_probabilities(target.c, Concept::constant_zero(), target.context_dist);
  return jp.pr_c(0) * entropy(target.p0) + jp.pr_c(1) * entropy(target.p1);
}

}  // namespace pwdlab
