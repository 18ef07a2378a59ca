#include <gtest/gtest.h>

#include <sstream>

#include "ispmarket/sweep.hpp"
#include "ispmarket/welfare.hpp"

using namespace ispmarket;

namespace {

TEST(SweepSpec, Validation) {
  EXPECT_NO_THROW(validate(SweepSpec{}));
  SweepSpec bad;
  bad.to = bad.from;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = SweepSpec{};
  bad.steps = 1;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = SweepSpec{};
  bad.to = 3.0;  // reaches mu
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = SweepSpec{};
  bad.varied_parameter = "v";
  EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(SweepSpec, ValuesIncludeBothEnds) {
  const auto values = sweep_values(SweepSpec{});
  ASSERT_EQ(values.size(), 11U);
  EXPECT_EQ(values.front(), 0.25);
  EXPECT_EQ(values.back(), 2.75);
  EXPECT_DOUBLE_EQ(values[4], 1.25);
}

TEST(Sweep, RowOrderAndFields) {
  SweepSpec spec;
  spec.steps = 3;
  const auto rows = run_sweep(spec);
  ASSERT_EQ(rows.size(), 9U);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].regime, spec.regimes[i % 3]);
    EXPECT_EQ(rows[i].lambda, sweep_values(spec)[i / 3]);
    EXPECT_TRUE(rows[i].converged);
  }
  EXPECT_EQ(rows[1].a, 0.0);
  EXPECT_FALSE(rows[2].d.has_value());
  EXPECT_FALSE(rows[2].a.has_value());
}

TEST(Sweep, ThreadCountDoesNotChangeOutput) {
  SweepSpec spec;
  spec.steps = 6;
  spec.threads = 1;
  std::ostringstream serial;
  write_sweep_csv(serial, run_sweep(spec));
  spec.threads = 4;
  std::ostringstream parallel;
  write_sweep_csv(parallel, run_sweep(spec));
  EXPECT_EQ(serial.str(), parallel.str());
}

TEST(Sweep, InfeasiblePointsBecomeRows) {
  SweepSpec spec;
  spec.base.v = 0.2;
  spec.steps = 2;
  spec.regimes = {Regime::Neutral};
  const auto rows = run_sweep(spec);
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_FALSE(rows[0].converged);
  EXPECT_FALSE(rows[0].x_hat.has_value());
}

TEST(SweepCsv, HeaderAndFormatting) {
  EXPECT_EQ(sweep_csv_header(),
            "lambda,regime,d,a,x_hat,n,isp_profit,cp_profit_total,consumer_surplus,welfare,"
            "converged,binding_constraints");
  EXPECT_EQ(format_csv_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_csv_number(40.0), "40");
}

TEST(SweepCsv, RoundTripAndRowIdentity) {
  SweepSpec spec;
  spec.steps = 4;
  const auto rows = run_sweep(spec);
  std::stringstream csv;
  write_sweep_csv(csv, rows);
  const auto back = read_sweep_csv(csv);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].regime, rows[i].regime);
    EXPECT_EQ(back[i].binding_constraints, rows[i].binding_constraints);
    EXPECT_EQ(back[i].d.has_value(), rows[i].d.has_value());
    auto p = spec.base;
    p.lambda = back[i].lambda;
    const double recomputed = welfare(p, *back[i].x_hat, *back[i].n);
    const double parts = *back[i].isp_profit + *back[i].cp_profit_total + *back[i].consumer_surplus;
    EXPECT_NEAR(parts, recomputed, 1e-9);
    EXPECT_NEAR(*back[i].welfare, recomputed, 1e-9);
  }
}

TEST(SweepCsv, RejectsMalformedInput) {
  std::istringstream wrong_header("lambda,regime\n");
  EXPECT_THROW(read_sweep_csv(wrong_header), std::runtime_error);
  std::istringstream short_row(std::string(sweep_csv_header()) + "\n0.5,neutral,1\n");
  EXPECT_THROW(read_sweep_csv(short_row), std::runtime_error);
}

}  // namespace
