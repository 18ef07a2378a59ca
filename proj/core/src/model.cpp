#include "ispmarket/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ispmarket/errors.hpp"

namespace ispmarket {
namespace {

void require_positive_entry_cost(const ModelParams& params, double a) {
  if (!(a + params.f > 0.0)) {
    throw DomainError("a + f must be positive, got " + std::to_string(a + params.f));
  }
}

}  // namespace

void validate(const ModelParams& params) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(std::isfinite(params.v) && params.v > 0.0, "v must be positive");
  require(std::isfinite(params.r) && params.r > 0.0, "r must be positive");
  require(std::isfinite(params.f) && params.f > 0.0, "f must be positive");
  require(params.t > 0.0 && params.t < 1.0, "t must lie in (0, 1)");
  require(std::isfinite(params.mu) && params.mu > 0.0, "mu must be positive");
  require(params.lambda > 0.0 && params.lambda < params.mu,
          "lambda must satisfy 0 < lambda < mu");
}

bool MarketState::feasible(double tolerance) const {
  return x_hat >= -tolerance && x_hat <= 1.0 + tolerance && n >= 1.0 - tolerance;
}

double congestion_cost(const ModelParams& params, double x_hat) {
  const double slack = params.mu - params.lambda * x_hat;
  if (!(slack > 0.0)) {
    throw DomainError("ISP queue overloaded: mu - lambda * x_hat = " +
                      std::to_string(slack));
  }
  return 1.0 / slack;
}

double consumer_utility(const ModelParams& params, double x, double y, double d,
                        double x_hat) {
  return params.v - x - params.t * y - d - congestion_cost(params, x_hat);
}

double cp_profit(const ModelParams& params, double x_hat, double n, double a) {
  if (!(n > 0.0)) throw DomainError("CP count must be positive");
  return params.r * x_hat / n - params.f - a;
}

double cp_count_zero_profit(const ModelParams& params, double x_hat, double a) {
  require_positive_entry_cost(params, a);
  return params.r * x_hat / (a + params.f);
}

double net_valuation(const ModelParams& params, double d, double a) {
  return params.v - d - params.t * (a + params.f) / (2.0 * params.r);
}

double marginal_consumer_residual(const ModelParams& params, double d, double a,
                                  double x_hat) {
  return net_valuation(params, d, a) - x_hat - congestion_cost(params, x_hat);
}

DemandRoot demand_root(const ModelParams& params, double d, double a) {
  require_positive_entry_cost(params, a);
  const double lambda = params.lambda;
  const double mu = params.mu;

  DemandRoot root;
  root.net_valuation = net_valuation(params, d, a);
  const double k = root.net_valuation;
  const double gap = mu - lambda * k;
  root.sum_term = mu + lambda * k;
  root.discriminant_root = std::sqrt(gap * gap + 4.0 * lambda);

  // (A - B) / (2 lambda) rewritten as 2 (mu K - 1) / (A + B). A + B > 0 always,
  // so this never cancels and stays exact as lambda -> 0.
  root.x_hat = 2.0 * (mu * k - 1.0) / (root.sum_term + root.discriminant_root);

  // Stability margin mu - lambda x_hat = (mu - lambda K + B) / 2.
  if (!(mu - lambda * root.x_hat > 0.0)) {
    throw std::logic_error("demand root violates the queue stability margin");
  }
  return root;
}

double demand_consumers(const ModelParams& params, double d, double a) {
  return demand_root(params, d, a).x_hat;
}

double demand_cps(const ModelParams& params, double d, double a) {
  return cp_count_zero_profit(params, demand_consumers(params, d, a), a);
}

MarketState market_state(const ModelParams& params, const Prices& prices) {
  const double x_hat = demand_consumers(params, prices.d, prices.a);
  return {x_hat, cp_count_zero_profit(params, x_hat, prices.a)};
}

}  // namespace ispmarket
