#include "ispmarket/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ispmarket/elasticity.hpp"
#include "ispmarket/errors.hpp"

namespace ispmarket {
namespace {

// Gap kept between the load and the service rate inside the welfare search.
constexpr double kStabilityGuard = 1e-9;

std::vector<BindingConstraint> label(const std::vector<std::size_t>& indices,
                                     std::span<const BindingConstraint> labels) {
  std::vector<BindingConstraint> out;
  for (std::size_t i : indices) out.push_back(labels[i]);
  return out;
}

void fill_common(EquilibriumResult& result, const ConstrainedOptimum& optimum,
                 std::span<const BindingConstraint> labels) {
  result.diagnostics.converged = optimum.converged;
  result.diagnostics.binding_constraints = label(optimum.binding, labels);
  result.diagnostics.grid_best_gap = optimum.value - optimum.grid_best_value;
  result.diagnostics.evaluations = optimum.evaluations;
  result.diagnostics.tied_starts = optimum.starts;
}

// Slope of x_hat in K from implicit differentiation of the marginal-consumer
// condition.
double demand_slope(const ModelParams& params, double x_hat) {
  const double slack = params.mu - params.lambda * x_hat;
  return 1.0 / (1.0 + params.lambda / (slack * slack));
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::NonNeutral:
      return "nonneutral";
    case Regime::Neutral:
      return "neutral";
    case Regime::WelfareOptimum:
      return "optimum";
  }
  return "unknown";
}

std::optional<Regime> parse_regime(std::string_view text) {
  if (text == "nonneutral" || text == "non-neutral") return Regime::NonNeutral;
  if (text == "neutral") return Regime::Neutral;
  if (text == "optimum" || text == "welfare-optimum") return Regime::WelfareOptimum;
  return std::nullopt;
}

std::string_view to_string(BindingConstraint constraint) {
  switch (constraint) {
    case BindingConstraint::XHatUpper:
      return "x_hat_upper";
    case BindingConstraint::XHatLower:
      return "x_hat_lower";
    case BindingConstraint::NLower:
      return "n_lower";
    case BindingConstraint::DLower:
      return "d_lower";
    case BindingConstraint::ALower:
      return "a_lower";
  }
  return "unknown";
}

bool SolverDiagnostics::binds(BindingConstraint constraint) const {
  return std::find(binding_constraints.begin(), binding_constraints.end(), constraint) !=
         binding_constraints.end();
}

double isp_profit(const ModelParams& params, double d, double a) {
  const double x_hat = demand_consumers(params, d, a);
  return d * x_hat + a * cp_count_zero_profit(params, x_hat, a);
}

FocResiduals foc_residuals_nonneutral(const ModelParams& params, double d, double a) {
  if (!(d > 0.0) || !(a > 0.0)) {
    throw DomainError("pricing first-order conditions need d > 0 and a > 0");
  }
  const ElasticityBundle e = elasticities(params, d, a);
  const MarketState state = market_state(params, {d, a});
  const double ratio = a * state.n / (d * state.x_hat);  // CP-side over consumer-side revenue
  return {e.e_x_d + ratio * e.e_n_d - 1.0, e.e_n_a + e.e_x_a / ratio - 1.0};
}

FocResiduals reduced_foc_residuals(const ModelParams& params, double d, double a) {
  const ElasticityBundle e = elasticities(params, d, a);
  const double entry = d * a + d * params.f;
  return {e.e_x_d - entry / (entry + params.r * a), e.e_x_a - params.f / (a + params.f)};
}

double foc_residual_neutral(const ModelParams& params, double d) {
  return elasticity_x_d(params, d, 0.0) - 1.0;
}

ProfitSlope profit_slope_in_d(const ModelParams& params, double d, double a) {
  const double x_hat = demand_consumers(params, d, a);
  const double dx_dd = -demand_slope(params, x_hat);
  const double dn_dd = params.r * dx_dd / (a + params.f);
  return {x_hat, d * dx_dd, a * dn_dd};
}

SearchBox price_box(const ModelParams& params) {
  // Beyond d = v the net valuation is below 1/mu and demand is negative; above
  // a = r - f no consumer mass in [0, 1] supports a single CP.
  return {{0.0, 0.0}, {params.v, std::max(0.0, params.r - params.f)}};
}

bool prices_feasible(const ModelParams& params, double d, double a, double tolerance) {
  if (d < 0.0 || a < 0.0) return false;
  return market_state(params, {d, a}).feasible(tolerance);
}

double optimal_cp_count(const ModelParams& params, double x_hat) {
  return std::max(1.0, x_hat * std::sqrt(params.t / params.f));
}

EquilibriumResult solve_nonneutral(const ModelParams& params, const SolverConfig& config) {
  validate(params);
  static constexpr std::array labels{BindingConstraint::XHatUpper, BindingConstraint::XHatLower,
                                     BindingConstraint::NLower, BindingConstraint::DLower,
                                     BindingConstraint::ALower};
  const std::array<InequalityConstraint, 5> constraints{{
      {[&](std::span<const double> p) { return 1.0 - demand_consumers(params, p[0], p[1]); }},
      {[&](std::span<const double> p) { return demand_consumers(params, p[0], p[1]); }},
      {[&](std::span<const double> p) { return demand_cps(params, p[0], p[1]) - 1.0; }},
      {[](std::span<const double> p) { return p[0]; }},
      {[](std::span<const double> p) { return p[1]; }},
  }};
  const ScalarField objective = [&](std::span<const double> p) {
    return isp_profit(params, p[0], p[1]);
  };

  ConstrainedOptimum optimum;
  try {
    optimum = resolve_constrained_optimum(objective, constraints, price_box(params), config);
  } catch (const InfeasibleModel&) {
    throw InfeasibleModel("non-neutral market is infeasible: no prices give 0 <= x_hat <= 1, n >= 1");
  }

  EquilibriumResult result;
  result.regime = Regime::NonNeutral;
  const Prices prices{optimum.point[0], optimum.point[1]};
  result.prices = prices;
  result.state = market_state(params, prices);
  result.isp_profit = isp_profit(params, prices.d, prices.a);
  result.welfare = welfare_breakdown(params, prices.d, prices.a, result.state.x_hat, result.state.n);
  fill_common(result, optimum, labels);
  if (prices.d > 0.0 && prices.a > 0.0 && result.state.x_hat > 0.0) {
    const FocResiduals foc = foc_residuals_nonneutral(params, prices.d, prices.a);
    result.diagnostics.foc_residuals = {foc.price_d, foc.price_a};
    const FocResiduals reduced = reduced_foc_residuals(params, prices.d, prices.a);
    result.diagnostics.reduced_foc_residuals = {reduced.price_d, reduced.price_a};
  }
  return result;
}

EquilibriumResult solve_neutral(const ModelParams& params, const SolverConfig& config) {
  validate(params);
  static constexpr std::array labels{BindingConstraint::XHatUpper, BindingConstraint::XHatLower,
                                     BindingConstraint::NLower, BindingConstraint::DLower};
  const std::array<InequalityConstraint, 4> constraints{{
      {[&](std::span<const double> p) { return 1.0 - demand_consumers(params, p[0], 0.0); }},
      {[&](std::span<const double> p) { return demand_consumers(params, p[0], 0.0); }},
      {[&](std::span<const double> p) { return demand_cps(params, p[0], 0.0) - 1.0; }},
      {[](std::span<const double> p) { return p[0]; }},
  }};
  const ScalarField objective = [&](std::span<const double> p) {
    return p[0] * demand_consumers(params, p[0], 0.0);
  };

  ConstrainedOptimum optimum;
  try {
    optimum = resolve_constrained_optimum(objective, constraints, {{0.0}, {params.v}}, config);
  } catch (const InfeasibleModel&) {
    throw InfeasibleModel("neutral market is infeasible: no price gives 0 <= x_hat <= 1, n >= 1");
  }

  EquilibriumResult result;
  result.regime = Regime::Neutral;
  const Prices prices{optimum.point[0], 0.0};
  result.prices = prices;
  result.state = market_state(params, prices);
  result.isp_profit = isp_profit(params, prices.d, 0.0);
  result.welfare = welfare_breakdown(params, prices.d, 0.0, result.state.x_hat, result.state.n);
  fill_common(result, optimum, labels);
  if (result.state.x_hat > 0.0) {
    result.diagnostics.foc_residuals = {foc_residual_neutral(params, prices.d)};
  }
  return result;
}

EquilibriumResult solve_welfare_optimum(const ModelParams& params, const SolverConfig& config) {
  validate(params);
  static constexpr std::array labels{BindingConstraint::XHatUpper, BindingConstraint::XHatLower};
  const double upper = std::min(1.0, (params.mu - kStabilityGuard) / params.lambda);
  const std::array<InequalityConstraint, 2> constraints{{
      {[upper](std::span<const double> p) { return upper - p[0]; }},
      {[](std::span<const double> p) { return p[0]; }},
  }};
  const ScalarField objective = [&](std::span<const double> p) {
    return welfare(params, p[0], optimal_cp_count(params, p[0]));
  };

  const ConstrainedOptimum optimum =
      resolve_constrained_optimum(objective, constraints, {{0.0}, {upper}}, config);

  EquilibriumResult result;
  result.regime = Regime::WelfareOptimum;
  const double x_hat = optimum.point[0];
  result.state = {x_hat, optimal_cp_count(params, x_hat)};
  result.isp_profit = 0.0;
  result.welfare = welfare_breakdown(params, 0.0, 0.0, x_hat, result.state.n);
  fill_common(result, optimum, labels);
  if (x_hat * std::sqrt(params.t / params.f) <= 1.0 + config.binding_tolerance) {
    result.diagnostics.binding_constraints.push_back(BindingConstraint::NLower);
  }

  const double n = result.state.n;
  const double slack = params.mu - params.lambda * x_hat;
  const double dw_dx = params.v + params.r - x_hat - 2.0 * params.t * x_hat / n -
                       params.mu / (slack * slack);
  const double dw_dn = params.t * x_hat * x_hat / (n * n) - params.f;
  result.diagnostics.foc_residuals = {dw_dx / (params.v + params.r), dw_dn / params.f};
  return result;
}

EquilibriumResult solve(Regime regime, const ModelParams& params, const SolverConfig& config) {
  switch (regime) {
    case Regime::NonNeutral:
      return solve_nonneutral(params, config);
    case Regime::Neutral:
      return solve_neutral(params, config);
    case Regime::WelfareOptimum:
      return solve_welfare_optimum(params, config);
  }
  throw std::invalid_argument("unknown regime");
}

}  // namespace ispmarket
