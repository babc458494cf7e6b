#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pwdlab/model.hpp"

using namespace pwdlab;

namespace {

TargetModel bernoulli_target(Concept c, std::size_t n, std::vector<double> b0, std::vector<double> b1,
                             double lambda = 0.01) {
  return {std::move(c), DistributionSpec::bernoulli(std::move(b0), lambda),
          DistributionSpec::bernoulli(std::move(b1), lambda), ContextDistribution::uniform(n)};
}

}  // namespace

TEST(Model, ConstantZeroDrawsOnlyFromP0) {
  const auto t = bernoulli_target(Concept::constant_zero(), 3, {0.2, 0.6}, {0.9, 0.9});
  Rng rng(1);
  const auto pairs = gen_sample(t, 100000, rng);
  for (std::size_t j = 0; j < 2; ++j) {
    double s = 0.0;
    for (const auto& p : pairs) s += p.outcome[j];
    const double bias = t.p0.bias(j);
    EXPECT_NEAR(s / 1e5, bias, 3.0 * oracle::binomial_se(bias, 1e5));
  }
}

TEST(Model, UniformContextsAreBalanced) {
  const auto t = bernoulli_target(Concept::dictator(1, 5), 5, {0.3}, {0.7});
  Rng rng(2);
  const auto pairs = gen_sample(t, 100000, rng);
  double ones = 0.0;
  for (const auto& p : pairs) ones += p.context[0];
  EXPECT_NEAR(ones / 1e5, 0.5, 0.005);
  // Outcomes follow the component selected by c(x).
  double y1 = 0.0, n1 = 0.0;
  for (const auto& p : pairs)
    if (p.context[0]) {
      y1 += p.outcome[0];
      n1 += 1.0;
    }
  EXPECT_NEAR(y1 / n1, 0.7, 3.0 * oracle::binomial_se(0.7, n1));
}

TEST(Model, GenSampleIsDeterministic) {
  const auto t = bernoulli_target(Concept::conjunction({1, 3}, 4), 4, {0.2, 0.3, 0.4, 0.5},
                                  {0.8, 0.7, 0.6, 0.5});
  Rng a(42), b(42);
  EXPECT_EQ(gen_sample(t, 3, a), gen_sample(t, 3, b));
}

TEST(Model, ErrorOfTheTargetIsZero) {
  const auto t = bernoulli_target(Concept::conjunction({1, 2}, 6), 6, {0.2, 0.3}, {0.6, 0.9});
  EXPECT_DOUBLE_EQ(model_error(t, {t.c, t.p0, t.p1}).value, 0.0);
}

TEST(Model, FourCellErrorExample) {
  const auto t = bernoulli_target(Concept::dictator(1, 2), 2, {0.25}, {0.75});
  const HypothesisModel h{Concept::dictator(2, 2), t.p0, t.p1};
  const double expected = 0.5 * (0.5 * std::log2(3.0));
  EXPECT_NEAR(model_error(t, h).value, expected, 1e-12);
  EXPECT_NEAR(model_error(t, h).value, 0.3962, 1e-4);
}

TEST(Model, ExactErrorMatchesEnumeration) {
  Rng rng(3);
  const auto cls = concept_class(6, 2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> biases(6);
    for (auto& b : biases) b = 0.1 + 0.8 * rng.uniform();
    auto rand_bern = [&] {
      return DistributionSpec::bernoulli({0.05 + 0.9 * rng.uniform(), 0.05 + 0.9 * rng.uniform()}, 0.05);
    };
    const TargetModel t{cls[rng.below(cls.size())], rand_bern(), rand_bern(),
                        ContextDistribution::product(biases)};
    const HypothesisModel h{cls[rng.below(cls.size())], rand_bern(), rand_bern()};
    EXPECT_NEAR(model_error(t, h).value, oracle::model_error(t, h), 1e-12);
    EXPECT_NEAR(classification_error(t.c, h.hypothesis, t.context_dist),
                oracle::classification_error(t.c, h.hypothesis, t.context_dist), 1e-12);
    EXPECT_NEAR(conditional_entropy(t), oracle::conditional_entropy(t), 1e-12);
  }
}

TEST(Model, LargeContextsUseClosedForm) {
  // n = 18 exceeds the enumeration limit; the oracle still enumerates.
  std::vector<double> biases(18, 0.5);
  biases[0] = 0.8;
  biases[5] = 0.3;
  const ContextDistribution d = ContextDistribution::product(biases);
  const std::vector<Concept> cs = {Concept::conjunction({1, 6}, 18), Concept::dictator(6, 18),
                                   Concept::constant_one(), Concept::constant_zero(),
                                   Concept::conjunction({2, 18}, 18)};
  for (const auto& c : cs)
    for (const auto& h : cs)
      EXPECT_NEAR(classification_error(c, h, d), oracle::classification_error(c, h, d), 1e-10);
}

TEST(Model, MonteCarloErrorAgreesWithExact) {
  const auto t = bernoulli_target(Concept::conjunction({1, 2}, 5), 5, {0.2, 0.4}, {0.7, 0.6});
  const HypothesisModel h{Concept::dictator(1, 5), DistributionSpec::bernoulli({0.3, 0.4}, 0.01),
                          DistributionSpec::bernoulli({0.6, 0.5}, 0.01)};
  Rng rng(4);
  const auto mc = model_error(t, h, ErrorMode::monte_carlo, &rng, 200000);
  const double exact = model_error(t, h).value;
  EXPECT_NEAR(mc.value, exact, 4.0 * mc.std_error + 1e-12);
  EXPECT_GT(mc.std_error, 0.0);
}

TEST(Model, EmpiricalLogLossExamples) {
  const HypothesisModel h{Concept::constant_zero(), DistributionSpec::bernoulli({0.5}, 0.01),
                          DistributionSpec::bernoulli({0.9}, 0.01)};
  const auto budget = BoundednessBudget::for_discrete(1, 0.01);
  const LabeledPair one{{0}, {1.0}};
  const std::vector<LabeledPair> single = {one};
  const std::vector<LabeledPair> twice = {one, one};
  EXPECT_DOUBLE_EQ(empirical_log_loss(h, single, budget), 1.0);
  EXPECT_DOUBLE_EQ(empirical_log_loss(h, twice, budget), 2.0 * empirical_log_loss(h, single, budget));
}

TEST(Model, ConceptClassOrderAndSize) {
  const auto cls = concept_class(4, 2);
  // 2 constants + 4 dictators + C(4,2) conjunctions
  ASSERT_EQ(cls.size(), 2U + 4U + 6U);
  EXPECT_EQ(cls[0].kind(), ConceptKind::constant_zero);
  EXPECT_EQ(cls[1].kind(), ConceptKind::constant_one);
  EXPECT_EQ(cls[2], Concept::dictator(1, 4));
  EXPECT_EQ(cls[6], Concept::conjunction({1, 2}, 4));
  EXPECT_EQ(cls.back(), Concept::conjunction({3, 4}, 4));
}

TEST(Model, ConceptEvaluation) {
  const auto c = Concept::conjunction({1, 3}, 4);
  EXPECT_EQ(c(ContextVector{0b0101}), 1);
  EXPECT_EQ(c(ContextVector{0b0001}), 0);
  EXPECT_EQ(Concept::constant_one()(ContextVector{0}), 1);
  EXPECT_EQ(Concept::constant_zero()(ContextVector{~0ULL}), 0);
  EXPECT_THROW(Concept::conjunction({0}, 4), std::invalid_argument);
  EXPECT_THROW(Concept::conjunction({5}, 4), std::invalid_argument);
}

TEST(Model, TargetValidationRejectsMismatchedComponents) {
  TargetModel t{Concept::dictator(1, 3), DistributionSpec::bernoulli({0.5}, 0.01),
                DistributionSpec::bernoulli({0.5, 0.5}, 0.01), ContextDistribution::uniform(3)};
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t.c = Concept::dictator(4, 4);
  t.p1 = t.p0;
  EXPECT_THROW(t.validate(), std::invalid_argument);
}

TEST(Model, BudgetIsEnforced) {
  const auto t = bernoulli_target(Concept::dictator(1, 3), 3, {0.5}, {0.5});
  DrawBudget budget(10);
  GenOracle gen(t, &budget);
  Rng rng(5);
  gen.draw(rng, 10);
  EXPECT_EQ(budget.used(), 10U);
  EXPECT_THROW(gen.draw(rng), BudgetExhausted);
}
