#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "ispmarket/model.hpp"
#include "ispmarket/optimize.hpp"
#include "ispmarket/welfare.hpp"

namespace ispmarket {

enum class Regime { NonNeutral, Neutral, WelfareOptimum };

std::string_view to_string(Regime regime);
// Accepts "nonneutral"/"non-neutral", "neutral", "optimum"/"welfare-optimum".
std::optional<Regime> parse_regime(std::string_view text);

enum class BindingConstraint { XHatUpper, XHatLower, NLower, DLower, ALower };

std::string_view to_string(BindingConstraint constraint);

struct SolverDiagnostics {
  bool converged = false;
  std::vector<BindingConstraint> binding_constraints;
  // NonNeutral: the two pricing first-order conditions (d, then a).
  // Neutral: e(x_hat(d, 0), d) - 1.
  // WelfareOptimum: dW/dx_hat / (v + r) and dW/dn / f along n*(x_hat).
  // Empty where the conditions are undefined (zero demand or zero prices).
  std::vector<double> foc_residuals;
  // NonNeutral only: residuals of the reduced closed-form pair
  // e_x_d = (da + df) / (da + df + ra) and e_x_a = f / (a + f).
  std::vector<double> reduced_foc_residuals;
  double grid_best_gap = 0.0;
  std::size_t evaluations = 0;
  std::size_t tied_starts = 0;

  bool binds(BindingConstraint constraint) const;
};

struct EquilibriumResult {
  Regime regime = Regime::NonNeutral;
  std::optional<Prices> prices;  // absent for the welfare optimum
  MarketState state;
  double isp_profit = 0.0;
  // The welfare optimum has no prices; its breakdown is taken at zero
  // transfers (d = a = 0).
  WelfareBreakdown welfare;
  SolverDiagnostics diagnostics;
};

// pi(d, a) = d x_hat(d, a) + a n(d, a).
double isp_profit(const ModelParams& params, double d, double a);

struct FocResiduals {
  double price_d = 0.0;  // e_x_d + (a n / (d x_hat)) e_n_d - 1
  double price_a = 0.0;  // e_n_a + (d x_hat / (a n)) e_x_a - 1
};

// Throws DomainError unless x_hat(d, a) > 0, d > 0 and a > 0.
FocResiduals foc_residuals_nonneutral(const ModelParams& params, double d, double a);

// Residuals of the reduced pair printed alongside the closed-form elasticities.
FocResiduals reduced_foc_residuals(const ModelParams& params, double d, double a);

// e(x_hat(d, 0), d) - 1.
double foc_residual_neutral(const ModelParams& params, double d);

// d pi / d d split into its three effects: the margin on existing consumers,
// the lost consumer volume, and the CP entry lost through the externality.
struct ProfitSlope {
  double margin = 0.0;       // x_hat
  double volume = 0.0;       // d * dx_hat/dd
  double externality = 0.0;  // a * dn/dd
  double total() const { return margin + volume + externality; }
};

ProfitSlope profit_slope_in_d(const ModelParams& params, double d, double a);

// Price box containing every feasible optimum: d in [0, v], a in [0, r - f].
SearchBox price_box(const ModelParams& params);

// Feasible iff 0 <= x_hat(d, a) <= 1 and n(d, a) >= 1 within `tolerance`.
bool prices_feasible(const ModelParams& params, double d, double a,
                     double tolerance = 1e-9);

EquilibriumResult solve_nonneutral(const ModelParams& params,
                                   const SolverConfig& config = {});
EquilibriumResult solve_neutral(const ModelParams& params,
                                const SolverConfig& config = {});
EquilibriumResult solve_welfare_optimum(const ModelParams& params,
                                        const SolverConfig& config = {});
EquilibriumResult solve(Regime regime, const ModelParams& params,
                        const SolverConfig& config = {});

// n*(x_hat) = max(1, x_hat sqrt(t / f)), the welfare-maximizing CP count.
double optimal_cp_count(const ModelParams& params, double x_hat);

}  // namespace ispmarket
