#include "pwdlab/cccn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pwdlab {

bool lab_parameters_valid(double p_hat, double q_hat, double xi) {
  if (!(xi > 0.0 && xi <= 1.0) || p_hat == q_hat) return false;
  const double s = p_hat + q_hat;
  return xi * std::max(s, 2.0 - s) <= 2.0 * std::abs(q_hat - p_hat) + 1e-12;
}

LabParams lab_parameters(double p_hat, double q_hat, double xi) {
  if (p_hat == q_hat) throw std::invalid_argument("lab_parameters: degenerate guesses p_hat == q_hat");
  if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("lab_parameters: xi must lie in (0, 1]");
  if (!lab_parameters_valid(p_hat, q_hat, xi)) {
    std::ostringstream os;
    os << "lab_parameters: guesses (" << p_hat << ", " << q_hat << ") too close for xi = " << xi;
    throw std::invalid_argument(os.str());
  }
  const double d = 4.0 * (q_hat - p_hat);
  LabParams lp;
  lp.xi = xi;
  lp.p_hat = p_hat;
  lp.q_hat = q_hat;
  lp.a0 = std::clamp(0.5 + xi * (p_hat + q_hat - 2.0) / d, 0.0, 1.0);
  lp.b0 = std::clamp(0.5 + xi * (p_hat + q_hat) / d, 0.0, 1.0);
  lp.a1 = 1.0 - lp.a0;
  lp.b1 = 1.0 - lp.b0;
  return lp;
}

NoisyLabeledExample lab_label(const Event& event, const LabeledPair& pair, const LabParams& params,
                              Rng& rng) {
  const double pr_one = event.contains(pair.outcome) ? params.a1 : params.b1;
  return {pair.context, rng.uniform() < pr_one ? 1 : 0};
}

NoiseRates noise_rates(double p, double q, const LabParams& params) {
  return {p * params.a1 + (1.0 - p) * params.b1, q * params.a0 + (1.0 - q) * params.b0};
}

GuessGrid guess_grid(double xi) {
  if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("guess_grid: xi must lie in (0, 1]");
  GuessGrid g;
  g.delta = xi / 8.0;
  const auto top = static_cast<std::size_t>(std::ceil(1.0 / g.delta - 1e-12));
  for (std::size_t i = 0; i <= top; ++i)
    g.values.push_back(std::min(1.0, static_cast<double>(i) * g.delta));
  for (std::size_t i = 0; i < g.values.size(); ++i)
    for (std::size_t j = 0; j < g.values.size(); ++j)
      if (i != j) g.pairs.emplace_back(g.values[i], g.values[j]);
  return g;
}

namespace {

// Disagreement of every mask concept from superset sums of
// (label-0 count - label-1 count) over the 2^n context cube.
std::vector<std::int64_t> superset_disagreements(std::span<const NoisyLabeledExample> examples,
                                                 std::span<const Concept> concepts, std::size_t n) {
  const std::size_t size = std::size_t{1} << n;
  std::vector<std::int64_t> s(size, 0);
  std::int64_t ones = 0;
  for (const auto& e : examples) {
    s[e.context.bits] += e.label ? -1 : 1;
    ones += e.label;
  }
  for (std::size_t bit = 0; bit < n; ++bit)
    for (std::size_t x = 0; x < size; ++x)
      if (!((x >> bit) & 1U)) s[x] += s[x | (std::size_t{1} << bit)];
  std::vector<std::int64_t> out;
  out.reserve(concepts.size());
  for (const auto& c : concepts)
    out.push_back(c.kind() == ConceptKind::constant_zero ? ones : ones + s[c.mask()]);
  return out;
}

}  // namespace

ErmResult erm_cccn_learn(std::span<const NoisyLabeledExample> examples,
                         std::span<const Concept> concepts) {
  if (examples.empty()) throw std::invalid_argument("erm_cccn_learn: empty sample");
  if (concepts.empty()) throw std::invalid_argument("erm_cccn_learn: empty concept class");

  std::uint64_t used = 0;
  for (const auto& c : concepts) used |= c.mask();
  for (const auto& e : examples) used |= e.context.bits;
  std::size_t n = 0;
  while (n < 64 && (used >> n) != 0) ++n;

  std::vector<std::int64_t> dis;
  const double direct_cost = static_cast<double>(concepts.size()) * static_cast<double>(examples.size());
  if (n <= kEnumerableContextBits &&
      static_cast<double>(n + 1) * static_cast<double>(std::size_t{1} << n) < direct_cost) {
    dis = superset_disagreements(examples, concepts, n);
  } else {
    dis.reserve(concepts.size());
    for (const auto& c : concepts) {
      std::int64_t d = 0;
      for (const auto& e : examples) d += c(e.context) != e.label;
      dis.push_back(d);
    }
  }
  const auto best = std::min_element(dis.begin(), dis.end());
  const auto index = static_cast<std::size_t>(best - dis.begin());
  return {concepts[index], index, static_cast<std::size_t>(*best)};
}

std::size_t cn_sample_size(double epsilon, double delta, double xi, std::size_t class_size,
                           std::size_t grid_size, double constant) {
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) || !(xi > 0.0))
    throw std::invalid_argument("cn_sample_size: need epsilon > 0, delta in (0,1), xi > 0");
  const double m = constant / (xi * epsilon * epsilon) *
                   std::log(2.0 * static_cast<double>(class_size) * static_cast<double>(grid_size) / delta);
  return static_cast<std::size_t>(std::ceil(m));
}

EventLearnResult learn_with_event(const GenOracle& gen, const Event& event, double xi,
                                  std::span<const Concept> concepts, std::size_t sample_size,
                                  std::uint64_t seed) {
  if (sample_size == 0) throw std::invalid_argument("learn_with_event: sample size must be positive");
  const GuessGrid grid = guess_grid(xi);
  EventLearnResult result;
  result.entries.reserve(grid.pairs.size());
  std::vector<NoisyLabeledExample> examples(sample_size);
  LabeledPair pair;
  for (std::size_t i = 0; i < grid.pairs.size(); ++i) {
    GridHypothesis entry;
    std::tie(entry.p_hat, entry.q_hat) = grid.pairs[i];
    if (!lab_parameters_valid(entry.p_hat, entry.q_hat, xi)) {
      entry.skipped = true;
      ++result.skipped;
      result.entries.push_back(std::move(entry));
      continue;
    }
    const LabParams params = lab_parameters(entry.p_hat, entry.q_hat, xi);
    Rng rng(derive_seed(seed, {stream::cn_learn, i}));
    if (gen.budget()) gen.budget()->charge(sample_size);
    for (auto& ex : examples) {
      gen.draw_unmetered(rng, pair);
      ex = lab_label(event, pair, params, rng);
    }
    result.draws += sample_size;
    const ErmResult erm = erm_cccn_learn(examples, concepts);
    entry.hypothesis = erm.hypothesis;
    entry.class_index = erm.index;
    entry.disagreements = erm.disagreements;
    result.entries.push_back(std::move(entry));
  }
  return result;
}

}  // namespace pwdlab
