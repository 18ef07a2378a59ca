#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ispmarket/equilibrium.hpp"

namespace ispmarket {

struct SweepSpec {
  std::string varied_parameter = "lambda";
  double from = 0.25;
  double to = 2.75;
  int steps = 11;
  ModelParams base;
  std::vector<Regime> regimes{Regime::NonNeutral, Regime::Neutral, Regime::WelfareOptimum};
  SolverConfig solver;
  unsigned threads = 0;  // 0: one per hardware thread
};

// Throws std::invalid_argument: only lambda may vary, from < to, steps >= 2,
// and every swept value must leave the base parameters valid.
void validate(const SweepSpec& spec);

// Evenly spaced values from `from` to `to`, both included.
std::vector<double> sweep_values(const SweepSpec& spec);

struct SweepRow {
  double lambda = 0.0;
  Regime regime = Regime::NonNeutral;
  std::optional<double> d;  // empty for the welfare optimum
  std::optional<double> a;  // empty for the welfare optimum, 0 when neutral
  std::optional<double> x_hat;
  std::optional<double> n;
  std::optional<double> isp_profit;
  std::optional<double> cp_profit_total;
  std::optional<double> consumer_surplus;
  std::optional<double> welfare;
  bool converged = false;
  std::vector<BindingConstraint> binding_constraints;
};

SweepRow make_sweep_row(double lambda, const EquilibriumResult& result);

// Row for a point whose market is infeasible: no values, converged = false.
SweepRow infeasible_sweep_row(double lambda, Regime regime);

// Solves every (lambda, regime) pair, possibly concurrently. Rows come back in
// lambda-major, regime-minor order regardless of scheduling.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

std::string_view sweep_csv_header();

// Numbers with 12 significant digits; missing values as empty fields;
// binding constraints joined with '|'.
std::string format_csv_number(double value);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

// Inverse of write_sweep_csv. Throws std::runtime_error on a malformed file.
std::vector<SweepRow> read_sweep_csv(std::istream& in);

}  // namespace ispmarket
