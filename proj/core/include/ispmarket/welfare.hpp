#pragma once

#include "ispmarket/model.hpp"

namespace ispmarket {

// Coefficient of the CP-travel term t x_hat^2 / n in consumer surplus and
// welfare. The closed form used throughout carries coefficient 1; integrating
// the travel cost over the Salop circle directly gives 1/2. Both welfare() and
// welfare_breakdown() read this constant so the decomposition stays exact.
inline constexpr double kCpTravelCostCoefficient = 1.0;

struct WelfareBreakdown {
  double isp_profit = 0.0;
  double cp_total_profit = 0.0;
  double consumer_surplus = 0.0;
  double total = 0.0;
};

// W(x_hat, n) = (v + r) x_hat - x_hat^2 / 2 - t x_hat^2 / n - n f
//               - x_hat / (mu - lambda x_hat).
// Access prices are transfers and do not appear.
double welfare(const ModelParams& params, double x_hat, double n);

// Splits W into ISP profit, aggregate CP profit and consumer surplus at the
// given prices. `total` is the sum of the three parts.
WelfareBreakdown welfare_breakdown(const ModelParams& params, double d, double a,
                                   double x_hat, double n);

}  // namespace ispmarket
