#include <gtest/gtest.h>

#include <cmath>

#include "ispmarket/elasticity.hpp"
#include "ispmarket/errors.hpp"
#include "ispmarket/model.hpp"
#include "oracles.hpp"

using namespace ispmarket;

namespace {

const ModelParams kBase{};

// Central difference of the bisection demand; independent of the closed forms.
double oracle_elasticity(const std::function<double(double)>& q, double at) {
  const double h = 1e-6 * std::max(1.0, std::abs(at));
  return -(q(at + h) - q(at - h)) / (2.0 * h) * at / q(at);
}

double relative_gap(double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); }

TEST(FiniteDifference, PowerLaws) {
  EXPECT_EQ(finite_difference_elasticity([](double) { return 4.0; }, 2.0), 0.0);
  EXPECT_NEAR(finite_difference_elasticity([](double p) { return 3.0 / p; }, 2.0), 1.0, 1e-9);
  for (double k : {0.5, 2.0, 3.5}) {
    const auto fn = [k](double p) { return 7.0 * std::pow(p, -k); };
    EXPECT_NEAR(finite_difference_elasticity(fn, 1.7), k, 1e-8) << "k=" << k;
  }
  EXPECT_THROW(finite_difference_elasticity([](double p) { return p - 1.0; }, 1.0), DomainError);
  EXPECT_DOUBLE_EQ(default_difference_step(0.5), 1e-6);
  EXPECT_DOUBLE_EQ(default_difference_step(-40.0), 4e-5);
}

TEST(Elasticity, SpotValueAtReferencePrices) {
  const double d = 9.0;
  const double a = 0.75;
  const double closed = elasticity_x_d(kBase, d, a);
  EXPECT_NEAR(closed, 13.65, 0.01);
  const double fd = oracle_elasticity([&](double p) { return oracle::marginal_consumer(kBase, p, a); }, d);
  EXPECT_LT(relative_gap(closed, fd), 1e-5);
  const double fd_a = oracle_elasticity([&](double p) { return oracle::marginal_consumer(kBase, d, p); }, a);
  EXPECT_LT(relative_gap(elasticity_x_a(kBase, d, a), fd_a), 1e-5);
}

TEST(Elasticity, ZeroAtZeroPrice) {
  EXPECT_EQ(elasticity_x_d(kBase, 0.0, 1.0), 0.0);
  EXPECT_EQ(elasticity_n_d(kBase, 0.0, 1.0), 0.0);
  EXPECT_EQ(elasticity_x_a(kBase, 9.0, 0.0), 0.0);
  EXPECT_EQ(elasticity_n_a(kBase, 9.0, 0.0), 0.0);
}

TEST(Elasticity, UndefinedWithoutDemand) {
  EXPECT_THROW(elasticities(kBase, 10.0, 1.0), DomainError);
  EXPECT_THROW(implicit_elasticity_x_d(kBase, 10.0, 1.0), DomainError);
}

TEST(Elasticity, AllFourAgreeWithFiniteDifferences) {
  int checked = 0;
  for (double a = 0.5; a < 9.75; a += 0.925) {
    for (double d = 5.0; d < 10.0; d += 0.45) {
      const double x = demand_consumers(kBase, d, a);
      if (x < 0.05 || x > 0.95) continue;
      const auto x_of_d = [&](double p) { return oracle::marginal_consumer(kBase, p, a); };
      const auto x_of_a = [&](double p) { return oracle::marginal_consumer(kBase, d, p); };
      const auto n_of_d = [&](double p) { return kBase.r * x_of_d(p) / (a + kBase.f); };
      const auto n_of_a = [&](double p) { return kBase.r * x_of_a(p) / (p + kBase.f); };
      const ElasticityBundle e = elasticities(kBase, d, a);
      EXPECT_LT(relative_gap(e.e_x_d, oracle_elasticity(x_of_d, d)), 1e-5);
      EXPECT_LT(relative_gap(e.e_x_a, oracle_elasticity(x_of_a, a)), 1e-5);
      EXPECT_LT(relative_gap(e.e_n_d, oracle_elasticity(n_of_d, d)), 1e-5);
      EXPECT_LT(relative_gap(e.e_n_a, oracle_elasticity(n_of_a, a)), 1e-5);
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Elasticity, ClosedFormMatchesImplicitRoute) {
  for (double d = 0.5; d < 9.6; d += 0.7) {
    for (double a = 0.1; a < 9.0; a += 0.8) {
      if (demand_consumers(kBase, d, a) <= 0.0) continue;
      EXPECT_LT(relative_gap(elasticity_x_d(kBase, d, a), implicit_elasticity_x_d(kBase, d, a)), 1e-10);
      EXPECT_LT(relative_gap(elasticity_x_a(kBase, d, a), implicit_elasticity_x_a(kBase, d, a)), 1e-10);
    }
  }
}

TEST(Elasticity, RatioLawAndDerivedForms) {
  for (double d = 1.0; d < 9.5; d += 1.3) {
    for (double a = 0.2; a < 9.0; a += 1.1) {
      if (demand_consumers(kBase, d, a) <= 0.0) continue;
      const ElasticityBundle e = elasticities(kBase, d, a);
      EXPECT_LT(relative_gap(e.e_x_a / e.e_x_d, kBase.t * a / (2.0 * kBase.r * d)), 1e-12);
      EXPECT_EQ(e.e_n_d, e.e_x_d);
      EXPECT_NEAR(e.e_n_a, e.e_x_a + a / (a + kBase.f), 1e-15);
      EXPECT_GE(e.e_x_d, 0.0);
      EXPECT_GE(e.e_x_a, 0.0);
      EXPECT_GT(e.discriminant_root, std::abs(kBase.mu - kBase.lambda * (e.sum_term - kBase.mu) / kBase.lambda));
    }
  }
}

TEST(Elasticity, CpPriceLimit) {
  // With a large CP price the market shrinks but stays positive if d is small.
  auto p = kBase;
  p.r = 1e6;
  const double a = 1e4;
  const ElasticityBundle e = elasticities(p, 1.0, a);
  EXPECT_NEAR(e.e_n_a, e.e_x_a + 1.0, 1e-4);
}

}  // namespace
