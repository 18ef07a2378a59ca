#include "ispmarket/welfare.hpp"

#include "ispmarket/errors.hpp"

namespace ispmarket {
namespace {

void require_positive_count(double n) {
  if (!(n > 0.0)) throw DomainError("welfare requires n > 0");
}

double travel_cost(const ModelParams& params, double x_hat, double n) {
  return kCpTravelCostCoefficient * params.t * x_hat * x_hat / n;
}

}  // namespace

double welfare(const ModelParams& params, double x_hat, double n) {
  require_positive_count(n);
  const double congestion = congestion_cost(params, x_hat);
  return (params.v + params.r) * x_hat - 0.5 * x_hat * x_hat -
         travel_cost(params, x_hat, n) - n * params.f - x_hat * congestion;
}

WelfareBreakdown welfare_breakdown(const ModelParams& params, double d, double a,
                                   double x_hat, double n) {
  require_positive_count(n);
  const double congestion = congestion_cost(params, x_hat);

  WelfareBreakdown out;
  out.isp_profit = d * x_hat + n * a;
  out.cp_total_profit = params.r * x_hat - n * params.f - n * a;
  out.consumer_surplus = (params.v - d - congestion) * x_hat - 0.5 * x_hat * x_hat -
                         travel_cost(params, x_hat, n);
  out.total = out.isp_profit + out.cp_total_profit + out.consumer_surplus;
  return out;
}

}  // namespace ispmarket
