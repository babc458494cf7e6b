#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pwdlab/mixture.hpp"
#include "pwdlab/rng.hpp"

using namespace pwdlab;

namespace {

std::vector<OutcomeVector> mixture_sample(const DistributionSpec& a, const DistributionSpec& b, double w1,
                                          std::size_t m, Rng& rng) {
  std::vector<OutcomeVector> out(m);
  for (auto& y : out) sample_into(rng.uniform() < w1 ? b : a, rng, y);
  return out;
}

}  // namespace

TEST(Mixture, RecoversSeparatedBernoulliProducts) {
  const auto y0 = DistributionSpec::bernoulli(std::vector<double>(8, 0.1), 0.01);
  const auto y1 = DistributionSpec::bernoulli(std::vector<double>(8, 0.9), 0.01);
  int good = 0;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    Rng rng(derive_seed(101, {trial}));
    const auto sample = mixture_sample(y0, y1, 0.5, 10000, rng);
    const auto fit = em_fit_2mixture(sample, y0.shape(), 10, derive_seed(202, {trial}));
    const bool swapped = fit.comp0.bias(0) > 0.5;
    const auto& f0 = swapped ? fit.comp1 : fit.comp0;
    const auto& f1 = swapped ? fit.comp0 : fit.comp1;
    const double w1 = swapped ? fit.weight0 : fit.weight1;
    const double kl = std::max(kl_divergence(y0, f0), kl_divergence(y1, f1));
    good += kl <= 0.05 && std::abs(w1 - 0.5) <= 0.02;
  }
  EXPECT_GE(good, 45);
}

TEST(Mixture, SingleSourceIsUnhealthy) {
  const auto y = DistributionSpec::bernoulli({0.3, 0.6, 0.5, 0.2}, 0.01);
  Rng rng(3);
  const auto sample = mixture_sample(y, y, 0.0, 5000, rng);
  const auto fit = em_fit_2mixture(sample, y.shape(), 5, 4);
  EXPECT_TRUE(fit.collapsed);
  EXPECT_DOUBLE_EQ(fit.weight1, 0.0);
  const auto h = health_check(fit, 0.05);
  EXPECT_FALSE(h.healthy);
  EXPECT_LT(h.min_weight, 0.05);
  EmOptions raw;
  raw.bic_select = false;
  EXPECT_FALSE(em_fit_2mixture(sample, y.shape(), 5, 4, raw).collapsed);
}

TEST(Mixture, RecoversGaussianMeans) {
  const auto g0 = DistributionSpec::gaussian({0.0, 0.0}, {1.0, 1.0}, 0.0, 3.0);
  const auto g1 = DistributionSpec::gaussian({3.0, 3.0}, {1.0, 1.0}, 0.0, 3.0);
  int good = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    Rng rng(derive_seed(55, {trial}));
    const auto sample = mixture_sample(g0, g1, 0.5, 5000, rng);
    const auto fit = em_fit_2mixture(sample, g0.shape(), 10, derive_seed(66, {trial}));
    const bool swapped = fit.comp0.mean(0) > 1.5;
    const auto& f0 = swapped ? fit.comp1 : fit.comp0;
    const auto& f1 = swapped ? fit.comp0 : fit.comp1;
    bool ok = true;
    for (std::size_t j = 0; j < 2; ++j)
      ok = ok && std::abs(f0.mean(j) - 0.0) <= 0.1 && std::abs(f1.mean(j) - 3.0) <= 0.1;
    good += ok;
  }
  EXPECT_GE(good, 18);
}

TEST(Mixture, LikelihoodTraceIsMonotone) {
  const auto y0 = DistributionSpec::bernoulli({0.2, 0.3, 0.7}, 0.01);
  const auto y1 = DistributionSpec::bernoulli({0.8, 0.6, 0.1}, 0.01);
  Rng rng(9);
  const auto fit = em_fit_2mixture(mixture_sample(y0, y1, 0.3, 3000, rng), y0.shape(), 4, 10);
  EXPECT_TRUE(fit.monotone);
  ASSERT_FALSE(fit.trace.empty());
  for (std::size_t i = 1; i < fit.trace.size(); ++i) EXPECT_GE(fit.trace[i], fit.trace[i - 1] - 1e-9);
  EXPECT_NEAR(fit.trace.back(), fit.loglik, 1e-6);
  EXPECT_NEAR(fit.weight0 + fit.weight1, 1.0, 1e-12);
}

TEST(Mixture, IdenticalPointsGiveDuplicatedUnconvergedFit) {
  OutcomeShape shape;
  shape.k = 3;
  shape.lambda = 0.01;
  const std::vector<OutcomeVector> same(100, OutcomeVector{1.0, 0.0, 1.0});
  const auto fit = em_fit_2mixture(same, shape, 3, 1);
  EXPECT_FALSE(fit.converged);
  EXPECT_EQ(fit.comp0, fit.comp1);
  EXPECT_FALSE(health_check(fit, 0.01).healthy);
}

TEST(Mixture, DeterministicGivenSeed) {
  const auto y0 = DistributionSpec::bernoulli({0.2, 0.3}, 0.01);
  const auto y1 = DistributionSpec::bernoulli({0.8, 0.6}, 0.01);
  Rng rng(12);
  const auto sample = mixture_sample(y0, y1, 0.5, 1000, rng);
  const auto a = em_fit_2mixture(sample, y0.shape(), 3, 5);
  const auto b = em_fit_2mixture(sample, y0.shape(), 3, 5);
  EXPECT_EQ(a.comp0, b.comp0);
  EXPECT_EQ(a.comp1, b.comp1);
  EXPECT_EQ(a.weight0, b.weight0);
}

TEST(Mixture, HealthCheckExamples) {
  MixtureFit fit;
  fit.comp0 = DistributionSpec::bernoulli({0.5}, 0.01);
  fit.comp1 = DistributionSpec::bernoulli({0.99}, 0.01);
  ASSERT_GE(kl_divergence(fit.comp0, fit.comp1), 2.0);
  EXPECT_TRUE(health_check(fit, 0.05).healthy);
  fit.weight0 = 0.01;
  fit.weight1 = 0.99;
  const auto light = health_check(fit, 0.05);
  EXPECT_FALSE(light.healthy);
  EXPECT_DOUBLE_EQ(light.min_weight, 0.01);
  fit.weight0 = fit.weight1 = 0.5;
  fit.comp1 = fit.comp0;
  const auto same = health_check(fit, 1e-6);
  EXPECT_FALSE(same.healthy);
  EXPECT_DOUBLE_EQ(same.max_kl, 0.0);
}
