#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "orhc/stats.hpp"

using namespace orhc;

TEST(TailBounds, FormulaValues) {
  EXPECT_EQ(submartingale_tail_bound({100, 0.1, 1, 0}), 1.0);
  EXPECT_EQ(corollary_tail_bound(100, 0.1, 0), 1.0);
  const double v = submartingale_tail_bound({100, 0.1, 1, 10});
  EXPECT_NEAR(v, std::exp(-3.75), 1e-12 * std::exp(-3.75));
  EXPECT_NEAR(corollary_tail_bound(1e4, 0.01, 50), std::exp(-2500 / (2 * (100 + 50 / 3.0))), 1e-15);
  EXPECT_THROW(submartingale_tail_bound({100, 0.1, 1, -1}), std::invalid_argument);
  EXPECT_THROW(corollary_tail_bound(100, 0.1, -1), std::invalid_argument);
}

TEST(TailBounds, NonincreasingInOffsetAndInUnitInterval) {
  for (double N : {10.0, 100.0, 1e4})
    for (double q : {0.001, 0.01, 0.3}) {
      double prev = 1.0;
      for (double m = 0; m <= 200; m += 0.5) {
        const double b = corollary_tail_bound(N, q, m);
        EXPECT_LE(b, prev);
        EXPECT_GT(b, 0.0);
        EXPECT_LE(b, 1.0);
        prev = b;
      }
    }
}

TEST(TailBounds, CorollaryIsTheoremWithUnitStep) {
  for (double N : {1.0, 50.0, 1e4})
    for (double q : {0.0, 0.02, 0.5, 1.0})
      for (double m : {0.0, 1.0, 7.5, 80.0}) EXPECT_EQ(corollary_tail_bound(N, q, m), submartingale_tail_bound({N, q, 1, m}));
}

TEST(TailBounds, StageOneBudgetInstantiation) {
  // X_uv over t rounds, each exposing uv with probability <= 1/(n p_ex):
  // Pr[X >= (1 + eps/2) t/(n p_ex)] is bounded by the corollary with N = t,
  // q = 1/(n p_ex), m = (eps/2) t/(n p_ex), which sits below exp(-eps^2 t/(64 n p_ex)).
  const double n = 128, p = 0.25, eps = 0.5, t = 16;
  const double p_ex = (1 - eps / 2) * p;
  const double q = 1 / (n * p_ex), m = eps / 2 * t * q;
  const double ours = corollary_tail_bound(t, q, m);
  EXPECT_LE(ours, std::exp(-eps * eps * t / (64 * n * p_ex)));
}

TEST(Wilson, ContainsEstimateAndShrinks) {
  const auto a = wilson_interval(30, 100), b = wilson_interval(300, 1000);
  EXPECT_LT(a.lower, 0.3);
  EXPECT_GT(a.upper, 0.3);
  EXPECT_LT(b.upper - b.lower, a.upper - a.lower);
  const auto z = wilson_interval(0, 50);
  EXPECT_EQ(z.lower, 0.0);
  EXPECT_GT(z.upper, 0.0);
}

TEST(EmpiricalTail, IidWithinBound) {
  const auto r = empirical_tail_check(TailModel::iid(), 10000, 0.01, 50, 10000, 3);
  EXPECT_TRUE(r.within_bound) << r.fraction << " vs " << r.tolerance;
  EXPECT_DOUBLE_EQ(r.tolerance, r.bound + 3 * std::sqrt(r.bound / 10000));
}

TEST(EmpiricalTail, ZeroProbabilityNeverExceeds) {
  const auto r = empirical_tail_check(TailModel::iid(), 1000, 0.0, 1, 500, 1);
  EXPECT_EQ(r.exceed, 0u);
  EXPECT_EQ(r.fraction, 0.0);
}

TEST(EmpiricalTail, AdaptiveSchedulesWithinBound) {
  for (auto trig : {TailModel::Trigger::ahead, TailModel::Trigger::behind, TailModel::Trigger::alternate}) {
    TailModel m = TailModel::adaptive_default();
    m.trigger = trig;
    const auto r = empirical_tail_check(m, 2000, 0.02, 15, 4000, 8);
    EXPECT_TRUE(r.within_bound) << m.name() << ": " << r.fraction << " vs " << r.tolerance;
  }
}

TEST(EmpiricalTail, ReproducibleAcrossThreads) {
  const auto a = empirical_tail_check(TailModel::adaptive_default(), 1000, 0.05, 5, 2000, 4, 1);
  const auto b = empirical_tail_check(TailModel::adaptive_default(), 1000, 0.05, 5, 2000, 4, 3);
  EXPECT_EQ(a.exceed, b.exceed);
}

TEST(TailModel, LoadAdaptiveFile) {
  std::istringstream in("# schedule\nlow_factor = 0.25\nhigh_factor=1\ntrigger = behind\n");
  const auto m = TailModel::load_adaptive(in);
  EXPECT_TRUE(m.adaptive);
  EXPECT_EQ(m.low_factor, 0.25);
  EXPECT_EQ(m.trigger, TailModel::Trigger::behind);
  std::istringstream bad("low_factor = 0.5\noops\n");
  try {
    TailModel::load_adaptive(bad);
    FAIL();
  } catch (const MalformedInput& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream big("high_factor = 1.5\n");
  EXPECT_THROW(TailModel::load_adaptive(big), ValidationError);
}
