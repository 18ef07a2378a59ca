#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ispmarket/model.hpp"
#include "ispmarket/optimize.hpp"

namespace ispmarket {

struct ValidationOptions {
  ModelParams params;
  SolverConfig solver;
  std::vector<std::string> skip;  // check names to skip
  std::uint64_t seed = 1;
  std::uint64_t queue_requests = 1'000'000;
  // Relative error injected into the closed-form consumer demand before it is
  // compared with the root-finding oracle. Used to prove the suite can fail.
  double demand_perturbation = 0.0;
};

enum class CheckStatus { Pass, Fail, Skipped };

std::string_view to_string(CheckStatus status);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

// Names in execution order: demand, elasticity, elasticity_routes,
// reduced_foc, solver, welfare, zero_profit, queue.
std::vector<std::string_view> validation_check_names();

std::vector<CheckResult> run_validation(const ValidationOptions& options);

// True when no check failed; skipped checks do not count against it.
bool all_passed(std::span<const CheckResult> results);

// Price pairs whose consumer demand spans (0.05, 0.95): `per_axis` CP prices
// across (0, r - f), and for each, the consumer prices placing the marginal
// consumer at `per_axis` evenly spaced targets in [0.1, 0.9]. Pairs with d <= 0
// are dropped.
std::vector<Prices> demand_check_grid(const ModelParams& params, int per_axis = 10);

// Root of the marginal-consumer residual by bisection; independent of the
// closed-form demand.
double bisect_marginal_consumer(const ModelParams& params, double d, double a);

}  // namespace ispmarket
