#include <gtest/gtest.h>

#include <cmath>

#include "ispmarket/errors.hpp"
#include "ispmarket/queue_sim.hpp"

using namespace ispmarket;

namespace {

TEST(RandomStream, StreamsAreReproducibleAndDistinct) {
  RandomStream one(42, RandomStream::kInterarrivals);
  RandomStream two(42, RandomStream::kInterarrivals);
  RandomStream other(42, RandomStream::kServices);
  int same_as_other = 0;
  for (int i = 0; i < 1000; ++i) {
    const double u = one.uniform();
    EXPECT_EQ(u, two.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    same_as_other += (u == other.uniform()) ? 1 : 0;
  }
  EXPECT_EQ(same_as_other, 0);
}

TEST(RandomStream, ExponentialMean) {
  RandomStream s(3, 9);
  double total = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) total += s.exponential(4.0);
  EXPECT_NEAR(total / count, 0.25, 0.005);
}

TEST(SimulateMm1, WithinThreeStandardErrors) {
  for (double rho : {0.1, 0.5, 0.9}) {
    const QueueRunReport report = simulate_mm1(3.0 * rho, 3.0, 1'000'000, 11);
    const double expected = 1.0 / (3.0 - 3.0 * rho);
    EXPECT_LE(std::abs(report.mean_sojourn - expected), 3.0 * report.std_error) << "rho=" << rho;
    EXPECT_GT(report.mean_sojourn, 1.0 / 3.0);
    EXPECT_EQ(report.requests_served, 1'000'000U);
    EXPECT_EQ(report.requests_measured, 900'000U);
  }
}

TEST(SimulateMm1, LoadFromReferenceMarket) {
  const QueueRunReport report = simulate_mm1(0.5644, 3.0, 1'000'000, 5);
  EXPECT_LE(std::abs(report.mean_sojourn - 1.0 / (3.0 - 0.5644)), 3.0 * report.std_error);
}

TEST(SimulateMm1, LightLoadApproachesServiceTime) {
  const QueueRunReport report = simulate_mm1(1e-4, 3.0, 200'000, 2);
  EXPECT_NEAR(report.mean_sojourn, 1.0 / 3.0, 0.01);
}

TEST(SimulateMm1, IncreasesWithLoad) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    double previous = 0.0;
    for (double lambda : {0.3, 1.0, 1.8, 2.5}) {
      const double mean = simulate_mm1(lambda, 3.0, 200'000, seed).mean_sojourn;
      EXPECT_GT(mean, previous) << "seed=" << seed << " lambda=" << lambda;
      previous = mean;
    }
  }
}

TEST(SimulateMm1, Deterministic) {
  const QueueRunReport one = simulate_mm1(1.0, 3.0, 100'000, 7);
  const QueueRunReport two = simulate_mm1(1.0, 3.0, 100'000, 7);
  EXPECT_EQ(one.mean_sojourn, two.mean_sojourn);
  EXPECT_EQ(one.std_error, two.std_error);
  EXPECT_NE(one.mean_sojourn, simulate_mm1(1.0, 3.0, 100'000, 8).mean_sojourn);
}

TEST(SimulateMm1, RejectsBadInput) {
  EXPECT_THROW(simulate_mm1(3.0, 3.0, 100, 1), DomainError);
  EXPECT_THROW(simulate_mm1(0.0, 3.0, 100, 1), DomainError);
  EXPECT_THROW(simulate_mm1(1.0, 3.0, 0, 1), DomainError);
}

}  // namespace
