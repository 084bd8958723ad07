#include <cmath>

#include <gtest/gtest.h>

#include "jumpldp/entropy.hpp"

using namespace jumpldp;

TEST(Ell, KnownValues) {
  EXPECT_DOUBLE_EQ(ell(1.0), 0.0);
  EXPECT_DOUBLE_EQ(ell(0.0), 1.0);  // 0 log 0 = 0 convention
  EXPECT_NEAR(ell(2.0), 2.0 * std::log(2.0) - 1.0, 1e-15);
  EXPECT_THROW(ell(-1e-9), DomainError);
}

TEST(Ell, ConvexWithMinimumAtOne) {
  for (double x : {0.1, 0.5, 0.9, 1.1, 2.0, 7.0}) EXPECT_GT(ell(x), 0.0) << x;
  // midpoint convexity on a few pairs
  for (double a : {0.2, 0.8, 1.5}) {
    for (double b : {0.4, 2.5, 6.0}) {
      EXPECT_LE(ell(0.5 * (a + b)), 0.5 * ell(a) + 0.5 * ell(b) + 1e-14);
    }
  }
}

TEST(G, KnownValues) {
  EXPECT_DOUBLE_EQ(g(1.0), 0.0);
  EXPECT_NEAR(g(std::exp(1.0)), std::exp(1.0) - 2.0, 1e-15);
  EXPECT_NEAR(g(0.5), std::log(2.0) - 0.5, 1e-15);
  EXPECT_THROW(g(0.0), DomainError);
  EXPECT_THROW(g(-2.0), DomainError);
}

TEST(G, MatchesScaledEll) {
  // g(x) = x * ell(1/x) on a 200-point log grid over [1e-3, 1e3]; the
  // tolerance is relative where |g| exceeds one (1e-14 is below one ulp of g
  // at the grid ends).
  for (int i = 0; i < 200; ++i) {
    const double x = std::pow(10.0, -3.0 + 6.0 * i / 199.0);
    const double lhs = g(x);
    const double rhs = x * ell(1.0 / x);
    EXPECT_NEAR(lhs, rhs, 1e-14 * std::max(1.0, std::abs(lhs))) << "x=" << x;
  }
}

TEST(RelEntropy, RowsAndSentinel) {
  Vec u = Vec::Constant(4, 0.25);
  EXPECT_DOUBLE_EQ(rel_entropy(u, u).value, 0.0);

  Vec d = Vec::Zero(4);
  d[2] = 1.0;
  const ExtReal point_vs_uniform = rel_entropy(d, u);
  ASSERT_TRUE(point_vs_uniform.is_finite());
  EXPECT_NEAR(point_vs_uniform.value, std::log(4.0), 1e-15);

  Vec null_state = u;
  null_state[2] = 0.0;
  null_state /= null_state.sum();
  EXPECT_FALSE(rel_entropy(d, null_state).is_finite());
}

TEST(MinEntropyGivenMean, AnalyticVersusBrute) {
  for (double b : {0.5, 1.0, 2.0}) {
    const auto r = min_entropy_given_mean(b);
    EXPECT_NEAR(r.analytic, g(b), 0.0);
    EXPECT_NEAR(r.brute, r.analytic, 1e-3) << "b=" << b;
  }
}

TEST(MinEntropyGivenMean, BruteRefinesTowardZeroAtUnitMean) {
  double prev = 1.0;
  for (int cells : {200, 800, 3200}) {
    const auto r = min_entropy_given_mean(1.0, GridSpec{40.0, cells});
    EXPECT_LT(std::abs(r.brute), std::abs(prev) + 1e-12);
    prev = r.brute;
  }
  EXPECT_LT(std::abs(prev), 1e-6);
}

TEST(MinEntropyGivenMean, GridErrors) {
  EXPECT_THROW(min_entropy_given_mean(3.0, GridSpec{40.0, 4000}), GridError);  // upper < 20*b
  EXPECT_THROW(min_entropy_given_mean(1.0, GridSpec{40.0, 4}), GridError);
  EXPECT_THROW(min_entropy_given_mean(-1.0), DomainError);
}
