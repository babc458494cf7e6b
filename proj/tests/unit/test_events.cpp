#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "pwdlab/events.hpp"

using namespace pwdlab;

namespace {

OutcomeShape product_shape(std::size_t k, std::size_t b, double lambda = 0.01) {
  OutcomeShape s;
  s.family = b == 2 ? Family::bernoulli_product : Family::bary_product;
  s.k = k;
  s.b = b;
  s.lambda = lambda;
  return s;
}

OutcomeShape gaussian_shape(std::size_t k, double sigma) {
  OutcomeShape s;
  s.family = Family::spherical_gaussian;
  s.k = k;
  s.b = 0;
  s.sigmas.assign(k, sigma);
  return s;
}

}  // namespace

TEST(Events, ProductClassListsEveryCoordinateSymbol) {
  const auto s = product_shape(2, 2);
  const auto budget = BoundednessBudget::for_shape(s, 64.0);
  for (double gamma : {0.01, 0.3, 1.0}) {
    const auto cls = enumerate_event_class(s, gamma, budget);
    ASSERT_EQ(cls.events.size(), 4U);
    EXPECT_EQ(cls.events[0].coordinate(), 0U);
    EXPECT_EQ(cls.events[0].symbol(), 0U);
    EXPECT_EQ(cls.events[3].coordinate(), 1U);
    EXPECT_EQ(cls.events[3].symbol(), 1U);
    EXPECT_NEAR(cls.xi_bound, gamma * gamma / (2.0 * 16.0 * budget.m_cap), 1e-15);
  }
  const auto big = product_shape(8, 3);
  EXPECT_EQ(enumerate_event_class(big, 0.2, BoundednessBudget::for_shape(big, 64.0)).events.size(), 24U);
}

TEST(Events, GaussianGridExample) {
  const auto s = gaussian_shape(1, 1.0);
  const auto cls = enumerate_event_class(s, 0.5, BoundednessBudget::for_gaussian(64.0));
  EXPECT_DOUBLE_EQ(cls.grid_step, 1.0);
  ASSERT_EQ(cls.events.size(), 2U);
  EXPECT_DOUBLE_EQ(cls.events[0].threshold(), 0.0);
  EXPECT_DOUBLE_EQ(cls.events[1].threshold(), 1.0);
  const double c = std::exp(-0.5) / (2.0 * std::sqrt(2.0 * std::numbers::pi));
  EXPECT_NEAR(cls.xi_bound, c * 1.0, 1e-15);
}

TEST(Events, ErfConstantLowerBoundsTheCdfSlope) {
  for (double sigma : {0.5, 1.0, 2.0}) {
    const double c = gaussian_erf_constant(sigma);
    for (double x = 0.0; x <= 1.0; x += 0.01)
      EXPECT_GE(normal_cdf(x / sigma) - 0.5, c * x - 1e-15) << "sigma " << sigma << " x " << x;
  }
}

TEST(Events, LikelihoodRatioOfIdenticalPairIsEverything) {
  const auto p = DistributionSpec::bernoulli({0.3, 0.6}, 0.01);
  const auto e = likelihood_ratio_event(p, p, 0.0);
  EXPECT_DOUBLE_EQ(event_probability_exact(p, e), 1.0);
}

TEST(Events, LikelihoodRatioTwoPointExample) {
  const auto p = DistributionSpec::bernoulli({0.5}, 0.01);
  const auto q = DistributionSpec::bernoulli({0.75}, 0.01);
  const auto e = likelihood_ratio_event(p, q, 0.5);
  EXPECT_TRUE(e.contains(std::vector<double>{0.0}));
  EXPECT_FALSE(e.contains(std::vector<double>{1.0}));
  EXPECT_DOUBLE_EQ(event_probability_exact(p, e), 0.5);
  EXPECT_DOUBLE_EQ(event_probability_exact(p, e) - event_probability_exact(q, e), 0.25);
}

TEST(Events, LikelihoodRatioWithHugeThresholdIsEmpty) {
  const auto p = DistributionSpec::bernoulli({0.2, 0.9}, 0.01);
  const auto q = DistributionSpec::bernoulli({0.8, 0.1}, 0.01);
  const auto e = likelihood_ratio_event(p, q, 1e6);
  EXPECT_DOUBLE_EQ(event_probability_exact(p, e), 0.0);
  const auto inf = likelihood_ratio_event(p, q, std::numeric_limits<double>::infinity());
  EXPECT_DOUBLE_EQ(event_probability_exact(q, inf), 0.0);
}

TEST(Events, CoordinateProbabilities) {
  const auto b = DistributionSpec::bernoulli({0.9, 0.2}, 0.01);
  EXPECT_DOUBLE_EQ(event_probability_exact(b, Event::coordinate_equals(0, 1)), 0.9);
  EXPECT_DOUBLE_EQ(event_probability_exact(b, Event::coordinate_equals(1, 0)), 0.8);
  const auto g = DistributionSpec::gaussian({0.3}, {2.0}, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(event_probability_exact(g, Event::coordinate_threshold(0, 0.3)), 0.5);
  EXPECT_NEAR(event_probability_exact(g, Event::coordinate_threshold(0, 1.0)),
              oracle::gaussian_tail(0.3, 2.0, 1.0), 1e-15);
}

TEST(Events, DiscreteLikelihoodRatioMatchesEnumeration) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng.below(5);
    std::vector<double> a(k), c(k);
    for (std::size_t j = 0; j < k; ++j) {
      a[j] = 0.05 + 0.9 * rng.uniform();
      c[j] = 0.05 + 0.9 * rng.uniform();
    }
    const auto p = DistributionSpec::bernoulli(a, 0.05);
    const auto q = DistributionSpec::bernoulli(c, 0.05);
    const double tau = 2.0 * rng.uniform() - 1.0;
    const auto e = likelihood_ratio_event(p, q, tau);
    double expected = 0.0;
    oracle::enumerate(p, [&](const std::vector<double>& y) {
      if (std::log2(oracle::pmf(p, y) / oracle::pmf(q, y)) >= tau) expected += oracle::pmf(p, y);
    });
    EXPECT_NEAR(event_probability_exact(p, e), expected, 1e-12);
  }
}

TEST(Events, GaussianHalfSpaceMatchesMonteCarlo) {
  const auto p = DistributionSpec::gaussian({0.0, 0.5}, {1.0, 1.5}, 0.0, 3.0);
  const auto q = DistributionSpec::gaussian({2.0, 1.0}, {1.0, 1.5}, 0.0, 3.0);
  const auto e = likelihood_ratio_event(p, q, 0.3);
  Rng rng(8);
  for (const auto* d : {&p, &q}) {
    const double exact = event_probability_exact(*d, e);
    const auto mc = event_probability(*d, e, ProbabilityMode::monte_carlo, &rng, 200000);
    EXPECT_NEAR(mc.value, exact, 4.0 * mc.std_error + 1e-9);
  }
}

TEST(Events, ApproxdistMargin) {
  EXPECT_DOUBLE_EQ(approxdist_margin(1.0, 2.0, 0.0), 1.0 / 16.0);
  EXPECT_NEAR(approxdist_margin(0.5, 1.0, 1e-4), 0.25 / 8.0 - std::sqrt(2e-4), 1e-15);
  EXPECT_LT(approxdist_margin(0.1, 10.0, 0.01), 0.0);
}

TEST(Events, MismatchedReferencesThrow) {
  const auto a = DistributionSpec::bernoulli({0.5}, 0.01);
  const auto b = DistributionSpec::bernoulli({0.5, 0.5}, 0.01);
  EXPECT_THROW(likelihood_ratio_event(a, b, 0.0), FamilyMismatch);
  const auto e = likelihood_ratio_event(a, a, 0.0);
  EXPECT_THROW(event_probability_exact(b, e), FamilyMismatch);
  EXPECT_THROW(enumerate_event_class(product_shape(2, 2), 0.0, {}), std::invalid_argument);
}
