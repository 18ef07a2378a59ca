#include "ispmarket/validation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>

#include "ispmarket/elasticity.hpp"
#include "ispmarket/equilibrium.hpp"
#include "ispmarket/queue_sim.hpp"
#include "ispmarket/welfare.hpp"

namespace ispmarket {
namespace {

constexpr double kDemandTolerance = 1e-8;
constexpr double kElasticityTolerance = 1e-5;
constexpr double kRouteTolerance = 1e-10;
constexpr double kIdentityTolerance = 1e-12;
constexpr double kCanonicalTolerance = 1e-6;
constexpr double kFocTolerance = 1e-6;
constexpr int kCanonicalGrid = 200;
constexpr int kWelfareSamples = 1000;

double relative_gap(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

CheckResult verdict(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail)};
}

CheckResult check_demand(const ValidationOptions& options) {
  const ModelParams& p = options.params;
  double worst = 0.0;
  for (const Prices& prices : demand_check_grid(p)) {
    const double closed = demand_consumers(p, prices.d, prices.a) * (1.0 + options.demand_perturbation);
    worst = std::max(worst, std::abs(closed - bisect_marginal_consumer(p, prices.d, prices.a)));
  }
  return verdict("demand", worst < kDemandTolerance,
                 fmt::format("max |closed form - bisection| = {:.3e} (limit {:.0e})", worst,
                             kDemandTolerance));
}

CheckResult check_elasticity(const ValidationOptions& options) {
  const ModelParams& p = options.params;
  double worst = 0.0;
  for (const Prices& at : demand_check_grid(p)) {
    const ElasticityBundle closed = elasticities(p, at.d, at.a);
    const auto x_of_d = [&](double d) { return demand_consumers(p, d, at.a); };
    const auto x_of_a = [&](double a) { return demand_consumers(p, at.d, a); };
    const auto n_of_d = [&](double d) { return demand_cps(p, d, at.a); };
    const auto n_of_a = [&](double a) { return demand_cps(p, at.d, a); };
    worst = std::max({worst,
                      relative_gap(closed.e_x_d, finite_difference_elasticity(x_of_d, at.d)),
                      relative_gap(closed.e_x_a, finite_difference_elasticity(x_of_a, at.a)),
                      relative_gap(closed.e_n_d, finite_difference_elasticity(n_of_d, at.d)),
                      relative_gap(closed.e_n_a, finite_difference_elasticity(n_of_a, at.a))});
  }
  return verdict("elasticity", worst < kElasticityTolerance,
                 fmt::format("max relative gap to central differences = {:.3e} (limit {:.0e})",
                             worst, kElasticityTolerance));
}

CheckResult check_elasticity_routes(const ValidationOptions& options) {
  const ModelParams& p = options.params;
  double worst = 0.0;
  for (const Prices& at : demand_check_grid(p)) {
    worst = std::max({worst,
                      relative_gap(elasticity_x_d(p, at.d, at.a),
                                   implicit_elasticity_x_d(p, at.d, at.a)),
                      relative_gap(elasticity_x_a(p, at.d, at.a),
                                   implicit_elasticity_x_a(p, at.d, at.a))});
  }
  return verdict("elasticity_routes", worst < kRouteTolerance,
                 fmt::format("max relative gap closed form vs implicit = {:.3e} (limit {:.0e})",
                             worst, kRouteTolerance));
}

CheckResult check_reduced_foc(const ValidationOptions& options) {
  const ModelParams& p = options.params;
  double worst = 0.0;
  for (const Prices& at : demand_check_grid(p)) {
    const double full = foc_residuals_nonneutral(p, at.d, at.a).price_d;
    const double reduced = reduced_foc_residuals(p, at.d, at.a).price_d;
    const double scale = 1.0 + at.a * p.r / (at.d * (at.a + p.f));
    worst = std::max(worst, std::abs(full - reduced * scale) / std::max(1.0, std::abs(full)));
  }
  return verdict("reduced_foc", worst < kIdentityTolerance,
                 fmt::format("max gap between the d-condition and its reduced form = {:.3e}",
                             worst));
}

// Largest objective improvement any point of a kCanonicalGrid^2 feasible grid
// achieves over the reported optimum.
double canonical_gap(const ModelParams& p, const EquilibriumResult& result) {
  double best = -std::numeric_limits<double>::infinity();
  if (result.regime == Regime::WelfareOptimum) {
    const double x_max = std::min(1.0, (p.mu - 1e-9) / p.lambda);
    const double n_max = std::max(4.0, 4.0 * std::sqrt(p.t / p.f));
    for (int i = 0; i < kCanonicalGrid; ++i) {
      for (int j = 0; j < kCanonicalGrid; ++j) {
        const double x = x_max * i / (kCanonicalGrid - 1);
        const double n = 1.0 + (n_max - 1.0) * j / (kCanonicalGrid - 1);
        best = std::max(best, welfare(p, x, n));
      }
    }
    return best - result.welfare.total;
  }
  const SearchBox box = price_box(p);
  const bool neutral = result.regime == Regime::Neutral;
  const int total = kCanonicalGrid * kCanonicalGrid;
  for (int k = 0; k < total; ++k) {
    double d = 0.0;
    double a = 0.0;
    if (neutral) {
      d = box.upper[0] * k / (total - 1);
    } else {
      d = box.upper[0] * (k / kCanonicalGrid) / (kCanonicalGrid - 1);
      a = box.upper[1] * (k % kCanonicalGrid) / (kCanonicalGrid - 1);
    }
    if (prices_feasible(p, d, a)) best = std::max(best, isp_profit(p, d, a));
  }
  return best - result.isp_profit;
}

CheckResult check_solver(const ValidationOptions& options) {
  std::string detail;
  bool ok = true;
  for (Regime regime : {Regime::NonNeutral, Regime::Neutral, Regime::WelfareOptimum}) {
    try {
      const EquilibriumResult result = solve(regime, options.params, options.solver);
      const double gap = canonical_gap(options.params, result);
      double foc = 0.0;
      const bool interior = result.diagnostics.binding_constraints.empty();
      if (interior) {
        for (double r : result.diagnostics.foc_residuals) foc = std::max(foc, std::abs(r));
      }
      const bool regime_ok = gap <= kCanonicalTolerance && (!interior || foc < kFocTolerance);
      ok = ok && regime_ok;
      detail += fmt::format("{}{}: grid gain {:.3e}{}", detail.empty() ? "" : "; ",
                            to_string(regime), gap,
                            interior ? fmt::format(", interior FOC {:.3e}", foc) : "");
    } catch (const std::exception& error) {
      ok = false;
      detail += fmt::format("{}{}: {}", detail.empty() ? "" : "; ", to_string(regime), error.what());
    }
  }
  return verdict("solver", ok, detail);
}

CheckResult check_welfare(const ValidationOptions& options) {
  const ModelParams& p = options.params;
  RandomStream rng(options.seed, 101);
  double worst_transfer = 0.0;
  double worst_decomposition = 0.0;
  for (int s = 0; s < kWelfareSamples; ++s) {
    const double x = rng.uniform();
    const double n = 1.0 + 49.0 * rng.uniform();
    const double d1 = p.v * rng.uniform();
    const double a1 = p.r * rng.uniform();
    const double d2 = p.v * rng.uniform();
    const double a2 = p.r * rng.uniform();
    const double total1 = welfare_breakdown(p, d1, a1, x, n).total;
    const double total2 = welfare_breakdown(p, d2, a2, x, n).total;
    worst_transfer = std::max(worst_transfer, std::abs(total1 - total2));
    worst_decomposition = std::max(worst_decomposition, std::abs(total1 - welfare(p, x, n)));
  }
  return verdict("welfare",
                 worst_transfer <= kIdentityTolerance && worst_decomposition <= kIdentityTolerance,
                 fmt::format("transfer invariance {:.3e}, decomposition {:.3e} (limit {:.0e})",
                             worst_transfer, worst_decomposition, kIdentityTolerance));
}

CheckResult check_zero_profit(const ValidationOptions& options) {
  const ModelParams& p = options.params;
  RandomStream rng(options.seed, 102);
  double worst = 0.0;
  for (int s = 0; s < kWelfareSamples; ++s) {
    const double x = 0.01 + 0.99 * rng.uniform();
    const double a = p.r * rng.uniform();
    const double d = p.v * rng.uniform();
    const double n = cp_count_zero_profit(p, x, a);
    worst = std::max({worst, std::abs(cp_profit(p, x, n, a)),
                      std::abs(welfare_breakdown(p, d, a, x, n).cp_total_profit)});
  }
  return verdict("zero_profit", worst <= kIdentityTolerance,
                 fmt::format("max |CP profit| under free entry = {:.3e}", worst));
}

CheckResult check_queue(const ValidationOptions& options) {
  const double mu = options.params.mu;
  bool ok = true;
  std::string detail;
  for (double load : {0.1, 0.5, 0.9}) {
    const QueueRunReport report =
        simulate_mm1(load * mu, mu, options.queue_requests, options.seed);
    const double expected = 1.0 / (mu - load * mu);
    const double z = std::abs(report.mean_sojourn - expected) / report.std_error;
    ok = ok && z <= 3.0;
    detail += fmt::format("{}rho={}: mean {:.6f} vs {:.6f}, {:.2f} SE", detail.empty() ? "" : "; ",
                          load, report.mean_sojourn, expected, z);
  }
  return verdict("queue", ok, detail);
}

using Check = std::function<CheckResult(const ValidationOptions&)>;

const std::array<std::pair<std::string_view, Check>, 8>& registry() {
  static const std::array<std::pair<std::string_view, Check>, 8> checks{{
      {"demand", check_demand},
      {"elasticity", check_elasticity},
      {"elasticity_routes", check_elasticity_routes},
      {"reduced_foc", check_reduced_foc},
      {"solver", check_solver},
      {"welfare", check_welfare},
      {"zero_profit", check_zero_profit},
      {"queue", check_queue},
  }};
  return checks;
}

}  // namespace

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass:
      return "PASS";
    case CheckStatus::Fail:
      return "FAIL";
    case CheckStatus::Skipped:
      return "SKIP";
  }
  return "UNKNOWN";
}

std::vector<std::string_view> validation_check_names() {
  std::vector<std::string_view> names;
  for (const auto& [name, check] : registry()) names.push_back(name);
  return names;
}

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
  std::vector<CheckResult> results;
  for (const auto& [name, check] : registry()) {
    if (std::find(options.skip.begin(), options.skip.end(), name) != options.skip.end()) {
      results.push_back({std::string(name), CheckStatus::Skipped, "skipped on request"});
      continue;
    }
    try {
      results.push_back(check(options));
    } catch (const std::exception& error) {
      results.push_back({std::string(name), CheckStatus::Fail, error.what()});
    }
  }
  return results;
}

bool all_passed(std::span<const CheckResult> results) {
  return std::none_of(results.begin(), results.end(),
                      [](const CheckResult& r) { return r.status == CheckStatus::Fail; });
}

std::vector<Prices> demand_check_grid(const ModelParams& params, int per_axis) {
  std::vector<Prices> grid;
  const double a_span = params.r > params.f ? params.r - params.f : params.f;
  for (int j = 0; j < per_axis; ++j) {
    const double a = a_span * (j + 0.5) / per_axis;
    for (int i = 0; i < per_axis; ++i) {
      const double target = 0.1 + 0.8 * i / std::max(1, per_axis - 1);
      if (!(params.mu - params.lambda * target > 0.0)) continue;
      // Invert the marginal-consumer condition for d at x_hat = target.
      const double d = params.v - params.t * (a + params.f) / (2.0 * params.r) - target -
                       1.0 / (params.mu - params.lambda * target);
      if (d > 0.0) grid.push_back({d, a});
    }
  }
  return grid;
}

double bisect_marginal_consumer(const ModelParams& params, double d, double a) {
  const double k = net_valuation(params, d, a);
  // Residual is positive for x < K - 1/mu and tends to -inf as x -> mu/lambda.
  double lo = std::min(0.0, k - 1.0 / params.mu - 1.0);
  double hi = params.mu / params.lambda;
  for (int step = 0; step < 400; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (marginal_consumer_residual(params, d, a, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace ispmarket
