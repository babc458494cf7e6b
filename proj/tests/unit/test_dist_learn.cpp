#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pwdlab/dist_learn.hpp"

using namespace pwdlab;

namespace {

DistributionSpec flat_bernoulli(std::size_t k, double bias, double lambda = 0.01) {
  return DistributionSpec::bernoulli(std::vector<double>(k, bias), lambda);
}

std::vector<OutcomeVector> draw(const DistributionSpec& d, std::size_t m, Rng& rng) {
  std::vector<OutcomeVector> out(m);
  for (auto& y : out) sample_into(d, rng, y);
  return out;
}

}  // namespace

TEST(DistLearn, AmplificationRepetitions) {
  EXPECT_EQ(amplification_repetitions(0.1), 9U);
  EXPECT_EQ(amplification_repetitions(0.25), 5U);
  EXPECT_EQ(amplification_repetitions(0.75), 1U);
  for (double delta : {0.01, 0.05, 0.2, 0.5}) {
    const auto r = amplification_repetitions(delta);
    EXPECT_LE(std::pow(0.75, static_cast<double>(r)), delta);
    EXPECT_GT(std::pow(0.75, static_cast<double>(r - 1)), delta);
  }
  const auto b = RobustnessBudget::make(2000, 0.1);
  EXPECT_EQ(b.r, 9U);
  EXPECT_DOUBLE_EQ(b.kl_tolerance, 1.0 / 4000.0);
}

TEST(DistLearn, UnperturbedStreamGivesCloseFits) {
  const auto p = flat_bernoulli(8, 0.3);
  const auto budget = RobustnessBudget::make(2000, 0.1);
  int good = 0;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    Rng rng(derive_seed(31, {trial}));
    const auto list = robust_learn_list(draw(p, budget.r * budget.m_p, rng), p.shape(), budget);
    ASSERT_EQ(list.size(), 9U);
    bool all = true;
    for (const auto& q : list) all = all && kl_divergence(p, q) <= 0.01;
    good += all;
  }
  EXPECT_GE(good, 45);
}

TEST(DistLearn, RobustListUsesDisjointBlocks) {
  const auto p = flat_bernoulli(2, 0.5);
  const auto budget = RobustnessBudget::make(3, 0.25);
  std::vector<OutcomeVector> stream;
  for (std::size_t i = 0; i < budget.r * 3; ++i) stream.push_back({i < 3 ? 1.0 : 0.0, 0.0});
  const auto list = robust_learn_list(stream, p.shape(), budget);
  ASSERT_EQ(list.size(), 5U);
  EXPECT_DOUBLE_EQ(list[0].bias(0), 0.99);
  EXPECT_DOUBLE_EQ(list[1].bias(0), 0.01);
  stream.pop_back();
  EXPECT_THROW(robust_learn_list(stream, p.shape(), budget), std::invalid_argument);
}

TEST(DistLearn, BlockFitterMatchesFitSingle) {
  const auto p = DistributionSpec::smoothed_bary(3, 3, {0.2, 0.3, 0.5, 0.1, 0.1, 0.8, 0.4, 0.4, 0.2}, 0.01);
  Rng rng(4);
  const auto ys = draw(p, 600, rng);
  BlockFitter f(p.shape(), 200, 3);
  for (const auto& y : ys) f.add(y);
  EXPECT_TRUE(f.full());
  const auto fits = f.fit();
  for (std::size_t b = 0; b < 3; ++b) {
    const std::vector<OutcomeVector> block(ys.begin() + static_cast<std::ptrdiff_t>(200 * b),
                                           ys.begin() + static_cast<std::ptrdiff_t>(200 * (b + 1)));
    EXPECT_EQ(fits[b], fit_single(p.shape(), block));
  }
}

TEST(DistLearn, SeparateAndLearnFindsGoodModel) {
  const TargetModel t{Concept::conjunction({1, 2}, 6), flat_bernoulli(4, 0.3), flat_bernoulli(4, 0.7),
                      ContextDistribution::uniform(6)};
  SeparateConfig cfg;
  cfg.robust = RobustnessBudget::make(500, 0.1);
  cfg.epsilon = 0.05;
  cfg.m_bound = 4.0 * std::log2(100.0);
  cfg.draw_cap = 200000;
  int good = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const auto r = separate_and_learn(GenOracle(t), t.c, cfg, derive_seed(17, {trial}));
    EXPECT_TRUE(r.learned[0] && r.learned[1]);
    ASSERT_EQ(r.models.size(), 81U);
    double best = 1e9;
    for (const auto& h : r.models) best = std::min(best, oracle::model_error(t, h));
    good += best <= cfg.epsilon;
  }
  EXPECT_GE(good, 18);
}

TEST(DistLearn, SeparateStarvesTheEmptySide) {
  const TargetModel t{Concept::dictator(1, 4), flat_bernoulli(2, 0.3), flat_bernoulli(2, 0.7),
                      ContextDistribution::uniform(4)};
  SeparateConfig cfg;
  cfg.robust = RobustnessBudget::make(100, 0.25);
  cfg.draw_cap = 5000;
  const auto r = separate_and_learn(GenOracle(t), Concept::constant_zero(), cfg, 3);
  EXPECT_TRUE(r.learned[0]);
  EXPECT_FALSE(r.learned[1]);
  EXPECT_EQ(r.side_points[1], 0U);
  ASSERT_EQ(r.models.size(), 5U);
  for (const auto& m : r.models) {
    EXPECT_EQ(m.q1.k(), 2U);
    EXPECT_EQ(m.q1, r.models.front().q1);
  }
  EXPECT_EQ(r.draws, 5000U);
}

TEST(DistLearn, SeparationDrawCount) {
  const auto b = RobustnessBudget::make(100, 0.25);
  EXPECT_EQ(separation_draws(b, 0.1, 8.0, 1u << 30), static_cast<std::uint64_t>(std::ceil(4.0 * 5 * 100 / (0.1 / 16.0))));
  EXPECT_EQ(separation_draws(b, 0.1, 8.0, 1000), 1000U);
  EXPECT_DOUBLE_EQ(direct_threshold_g(8.0, 100, 0.1), 16000.0);
  EXPECT_DOUBLE_EQ(direct_threshold_g(0.01, 100, 0.1), 200.0);
}

TEST(DistLearn, DirectPathOnIdenticalComponents) {
  const auto p = flat_bernoulli(8, 0.2);
  const TargetModel t{Concept::dictator(1, 4), p, p, ContextDistribution::uniform(4)};
  const auto budget = RobustnessBudget::make(2000, 0.2);
  int good = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const auto r = direct_unhealthy_learn(GenOracle(t), budget, derive_seed(8, {trial}));
    EXPECT_EQ(r.draws, budget.r * budget.m_p);
    bool hit = false;
    for (const auto& q : r.specs) hit = hit || kl_divergence(p, q) <= 0.01;
    good += hit;
  }
  EXPECT_GE(good, 18);
}

TEST(DistLearn, DirectPathWithRareComponent) {
  // w1 = 1e-3; mixture pulls the fit towards P0 by at most w1 * M.
  std::vector<double> biases(10, 0.5);
  biases[0] = biases[1] = std::sqrt(1e-3);
  const TargetModel t{Concept::conjunction({1, 2}, 10), flat_bernoulli(8, 0.2), flat_bernoulli(8, 0.8),
                      ContextDistribution::product(biases)};
  const auto budget = RobustnessBudget::make(2000, 0.2);
  int good = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const auto r = direct_unhealthy_learn(GenOracle(t), budget, derive_seed(9, {trial}));
    double best = 1e9;
    for (const auto& q : r.specs)
      best = std::min(best, oracle::model_error(t, {Concept::constant_zero(), q, q}));
    good += best <= 0.1;
  }
  EXPECT_GE(good, 16);
}

TEST(DistLearn, PerturbToKlHitsTarget) {
  Rng rng(10);
  const auto bern = flat_bernoulli(6, 0.4);
  const auto bary = DistributionSpec::smoothed_bary(2, 3, {0.2, 0.3, 0.5, 0.6, 0.2, 0.2}, 0.01);
  const auto gauss = DistributionSpec::gaussian({0.5, 0.5}, {1.0, 1.0}, 0.0, 1.0);
  for (const auto* base : {&bern, &bary, &gauss})
    for (double target : {1e-4, 1e-3, 0.01}) {
      const auto q = perturb_to_kl(*base, target, rng);
      EXPECT_NEAR(oracle::kl(*base, q), target, target * 1e-6);
    }
  EXPECT_EQ(perturb_to_kl(bern, 0.0, rng), bern);
}

TEST(DistLearn, LeCamBoundHoldsAtSmallSeparation) {
  const auto q0 = flat_bernoulli(4, 0.3, 0.3);
  const auto r = lecam_experiment(q0, q0, 200, 4.0 / (2.0 * 200 * std::numbers::ln2), 200, 12);
  EXPECT_DOUBLE_EQ(r.lower_bound, 1.0);
  EXPECT_GE(r.error_sum, r.lower_bound - 3.0 * r.std_error - 1e-12);
  EXPECT_EQ(r.trials, 200U);
}
