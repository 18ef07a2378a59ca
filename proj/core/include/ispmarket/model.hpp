#pragma once

// Demand system of a monopoly ISP serving consumers on a Hotelling line and
// content providers (CPs) arranged on a Salop circle, with M/M/1 congestion.
//
// All functions are pure. The demand functions return the analytic root even
// when it lies outside [0, 1]; feasibility is a concern of the optimizers.

namespace ispmarket {

struct ModelParams {
  double v = 10.0;       // consumer valuation of content
  double r = 10.0;       // advertising revenue per consumer
  double t = 0.5;        // CP differentiation, in (0, 1)
  double f = 0.25;       // CP fixed entry cost
  double lambda = 1.0;   // request rate per unit of consumer length
  double mu = 3.0;       // ISP service rate
};

// Throws std::invalid_argument naming the first violated parameter bound.
void validate(const ModelParams& params);

struct Prices {
  double d = 0.0;  // consumer access price
  double a = 0.0;  // CP access price
};

struct MarketState {
  double x_hat = 0.0;  // consumer market size on the Hotelling line
  double n = 0.0;      // number of CPs, continuous

  // 0 <= x_hat <= 1 and n >= 1, each up to `tolerance`.
  bool feasible(double tolerance = 1e-9) const;
};

// Mean sojourn time 1 / (mu - lambda * x_hat) of the M/M/1 ISP queue.
double congestion_cost(const ModelParams& params, double x_hat);

// Utility of a consumer at distance x from the ISP and y from its CP.
double consumer_utility(const ModelParams& params, double x, double y, double d,
                        double x_hat);

// Per-CP profit r * x_hat / n - f - a.
double cp_profit(const ModelParams& params, double x_hat, double n, double a);

// Free-entry CP count r * x_hat / (a + f).
double cp_count_zero_profit(const ModelParams& params, double x_hat, double a);

// v - d - t (a + f) / (2 r): the consumer valuation net of the access price and
// of the marginal consumer's travel cost to its CP under free entry.
double net_valuation(const ModelParams& params, double d, double a);

// Utility of the marginal consumer at x_hat once n is replaced by its
// free-entry value. Zero exactly at the consumer demand.
double marginal_consumer_residual(const ModelParams& params, double d, double a,
                                  double x_hat);

// The auxiliary quantities shared by the demand root and its elasticities.
struct DemandRoot {
  double x_hat = 0.0;
  double net_valuation = 0.0;  // K
  double sum_term = 0.0;       // A = mu + lambda K
  double discriminant_root = 0.0;  // B = sqrt((mu - lambda K)^2 + 4 lambda)
};

DemandRoot demand_root(const ModelParams& params, double d, double a);

// Consumer demand x_hat(d, a): the smaller root of the marginal-consumer
// condition. May be negative or exceed 1.
double demand_consumers(const ModelParams& params, double d, double a);

// CP demand n(d, a) = r x_hat(d, a) / (a + f).
double demand_cps(const ModelParams& params, double d, double a);

// (x_hat(d, a), n(d, a)).
MarketState market_state(const ModelParams& params, const Prices& prices);

}  // namespace ispmarket
