#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "ispmarket/errors.hpp"
#include "ispmarket/model.hpp"
#include "oracles.hpp"

using namespace ispmarket;

namespace {

const ModelParams kBase{};  // v=r=10, t=0.5, f=0.25, lambda=1, mu=3

TEST(ModelParams, RejectsInvalidValues) {
  EXPECT_NO_THROW(validate(kBase));
  auto bad = kBase;
  bad.t = 1.0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = kBase;
  bad.lambda = 3.0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = kBase;
  bad.f = 0.0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = kBase;
  bad.v = std::nan("");
  EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(CongestionCost, Examples) {
  EXPECT_DOUBLE_EQ(congestion_cost(kBase, 0.0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(congestion_cost(kBase, 1.0), 0.5);
  EXPECT_THROW(congestion_cost(kBase, 3.0), DomainError);
  EXPECT_THROW(congestion_cost(kBase, 4.0), DomainError);
}

TEST(ConsumerUtility, Examples) {
  EXPECT_NEAR(consumer_utility(kBase, 0.0, 0.0, 0.0, 0.0), 10.0 - 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(consumer_utility(kBase, 1.0, 0.5, 8.0, 1.0), 0.25, 1e-14);
}

TEST(ConsumerUtility, MarginalConsumerIsIndifferent) {
  const double d = 9.0;
  const double a = 0.75;
  const double x = demand_consumers(kBase, d, a);
  const double n = demand_cps(kBase, d, a);
  // The access price a enters only through the CPs' entry; the farthest CP
  // sits x_hat / (2n) away.
  EXPECT_NEAR(consumer_utility(kBase, x, x / (2.0 * n), d, x), 0.0, 1e-10);
}

TEST(CpProfit, Examples) {
  EXPECT_NEAR(cp_profit(kBase, 0.5, 5.0, 0.75), 0.0, 1e-15);
  EXPECT_NEAR(cp_profit(kBase, 0.5, 4.0, 0.75), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(cp_profit(kBase, 0.0, 1.0, 0.75), -1.0);
  EXPECT_THROW(cp_profit(kBase, 0.5, 0.0, 0.75), DomainError);
}

TEST(CpCount, Examples) {
  EXPECT_DOUBLE_EQ(cp_count_zero_profit(kBase, 0.5, 0.75), 5.0);
  EXPECT_DOUBLE_EQ(cp_count_zero_profit(kBase, 0.0, 0.75), 0.0);
  EXPECT_DOUBLE_EQ(cp_count_zero_profit(kBase, 1.0, 0.0), 40.0);
  EXPECT_THROW(cp_count_zero_profit(kBase, 0.5, -0.25), DomainError);
}

TEST(CpCount, ZeroProfitOnSamples) {
  for (double x = 0.05; x < 1.0; x += 0.1) {
    for (double a = 0.0; a < 9.0; a += 0.7) {
      const double n = cp_count_zero_profit(kBase, x, a);
      if (n <= 0.0) continue;
      EXPECT_NEAR(cp_profit(kBase, x, n, a), 0.0, 1e-12);
    }
  }
}

TEST(MarginalResidual, Examples) {
  EXPECT_NEAR(marginal_consumer_residual(kBase, 9.0, 0.75, 0.0), 0.975 - 1.0 / 3.0, 1e-14);
  const double x = demand_consumers(kBase, 9.0, 0.75);
  EXPECT_NEAR(marginal_consumer_residual(kBase, 9.0, 0.75, x), 0.0, 1e-10);
}

TEST(MarginalResidual, DecreasingInXHat) {
  double previous = marginal_consumer_residual(kBase, 5.0, 1.0, 0.0);
  for (double x = 0.01; x < 2.99; x += 0.01) {
    const double current = marginal_consumer_residual(kBase, 5.0, 1.0, x);
    EXPECT_LT(current, previous) << "x=" << x;
    previous = current;
  }
}

TEST(DemandConsumers, MatchesBisection) {
  EXPECT_NEAR(demand_consumers(kBase, 9.0, 0.75), oracle::marginal_consumer(kBase, 9.0, 0.75),
              1e-8);
  EXPECT_NEAR(demand_consumers(kBase, 9.0, 0.75), 0.5644, 1e-4);
  for (double d = 0.0; d <= 10.0; d += 0.5) {
    for (double a = 0.0; a <= 9.75; a += 0.75) {
      EXPECT_NEAR(demand_consumers(kBase, d, a), oracle::marginal_consumer(kBase, d, a), 1e-8)
          << "d=" << d << " a=" << a;
    }
  }
}

TEST(DemandConsumers, SmallLambdaLimit) {
  auto p = kBase;
  p.lambda = 1e-8;
  const double k = net_valuation(p, 9.0, 0.75);
  EXPECT_NEAR(demand_consumers(p, 9.0, 0.75), k - 1.0 / p.mu, 1e-7);
}

TEST(DemandConsumers, NonPositiveWhenValuationTooLow) {
  // K <= 1/mu leaves even the closest consumer unserved.
  const double d = kBase.v - kBase.t * (1.0 + kBase.f) / (2.0 * kBase.r) - 1.0 / kBase.mu;
  EXPECT_NEAR(demand_consumers(kBase, d, 1.0), 0.0, 1e-12);
  EXPECT_LT(demand_consumers(kBase, d + 0.1, 1.0), 0.0);
}

TEST(DemandConsumers, RawRootMayExceedOne) {
  EXPECT_GT(demand_consumers(kBase, 0.0, 0.0), 1.0);
}

TEST(DemandRoot, StabilityMarginAndStableForm) {
  for (double d = 0.0; d <= 10.0; d += 0.25) {
    const DemandRoot root = demand_root(kBase, d, 0.5);
    EXPECT_GT(kBase.mu - kBase.lambda * root.x_hat, 0.0);
    const double b = std::sqrt(std::pow(kBase.mu - kBase.lambda * root.net_valuation, 2) +
                               4.0 * kBase.lambda);
    EXPECT_NEAR(root.discriminant_root, b, 1e-12);
    EXPECT_NEAR(kBase.mu - kBase.lambda * root.x_hat,
                0.5 * (kBase.mu - kBase.lambda * root.net_valuation + b), 1e-12);
  }
}

TEST(DemandRoot, ExactAtMarginalConsumerCancellation) {
  // K mu = 1 puts the root exactly at zero; the naive difference loses it.
  auto p = kBase;
  p.mu = 1e4;
  p.lambda = 1.0;
  const double d = p.v - p.t * p.f / (2.0 * p.r) - 1.0 / p.mu;
  EXPECT_NEAR(demand_consumers(p, d, 0.0), 0.0, 1e-15);
}

TEST(DemandCps, ExampleAndConsistency) {
  EXPECT_NEAR(demand_cps(kBase, 9.0, 0.75),
              kBase.r * oracle::marginal_consumer(kBase, 9.0, 0.75) / 1.0, 1e-7);
  for (double d = 1.0; d < 9.5; d += 1.1) {
    for (double a = 0.0; a < 9.0; a += 1.3) {
      EXPECT_EQ(demand_cps(kBase, d, a),
                cp_count_zero_profit(kBase, demand_consumers(kBase, d, a), a));
    }
  }
  EXPECT_LT(demand_cps(kBase, 1.0, 1e6), 1e-4);
}

TEST(Demand, DecreasingInBothPrices) {
  const double h = 1e-4;
  for (double d = 0.5; d < 9.5; d += 0.5) {
    for (double a = 0.25; a < 9.5; a += 0.5) {
      if (demand_consumers(kBase, d, a) <= 0.0) continue;
      EXPECT_LT(demand_consumers(kBase, d + h, a), demand_consumers(kBase, d, a));
      EXPECT_LT(demand_consumers(kBase, d, a + h), demand_consumers(kBase, d, a));
      EXPECT_LT(demand_cps(kBase, d + h, a), demand_cps(kBase, d, a));
      EXPECT_LT(demand_cps(kBase, d, a + h), demand_cps(kBase, d, a));
    }
  }
}

TEST(MarketState, Feasibility) {
  EXPECT_TRUE((MarketState{1.0, 1.0}.feasible()));
  EXPECT_TRUE((MarketState{1.0 + 1e-10, 1.0 - 1e-10}.feasible()));
  EXPECT_FALSE((MarketState{1.1, 2.0}.feasible()));
  EXPECT_FALSE((MarketState{0.5, 0.9}.feasible()));
  EXPECT_FALSE((MarketState{-0.1, 2.0}.feasible()));
  const MarketState s = market_state(kBase, {9.0, 0.75});
  EXPECT_EQ(s.x_hat, demand_consumers(kBase, 9.0, 0.75));
  EXPECT_EQ(s.n, demand_cps(kBase, 9.0, 0.75));
}

}  // namespace
