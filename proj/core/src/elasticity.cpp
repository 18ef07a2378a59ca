#include "ispmarket/elasticity.hpp"

#include <algorithm>
#include <cmath>

#include "ispmarket/errors.hpp"

namespace ispmarket {
namespace {

DemandRoot positive_root(const ModelParams& params, double d, double a) {
  const DemandRoot root = demand_root(params, d, a);
  if (!(root.x_hat > 0.0)) {
    throw DomainError("elasticity undefined at non-positive consumer demand");
  }
  return root;
}

// lambda [mu - lambda K + B] / (B (A - B)), the factor shared by both
// consumer-demand elasticities.
double shared_factor(const ModelParams& params, const DemandRoot& root) {
  const double lambda = params.lambda;
  const double b_term = root.discriminant_root;
  const double numerator = lambda * (params.mu - lambda * root.net_valuation + b_term);
  // A - B = 2 lambda x_hat; using it directly avoids the cancellation.
  return numerator / (b_term * (2.0 * lambda * root.x_hat));
}

double implicit_slope(const ModelParams& params, double x_hat) {
  const double slack = params.mu - params.lambda * x_hat;
  return 1.0 / (1.0 + params.lambda / (slack * slack));
}

}  // namespace

ElasticityBundle elasticities(const ModelParams& params, double d, double a) {
  const DemandRoot root = positive_root(params, d, a);
  const double factor = shared_factor(params, root);

  ElasticityBundle out;
  out.sum_term = root.sum_term;
  out.discriminant_root = root.discriminant_root;
  out.e_x_d = d * factor;
  out.e_x_a = params.t * a * factor / (2.0 * params.r);
  out.e_n_d = out.e_x_d;
  out.e_n_a = out.e_x_a + a / (a + params.f);
  return out;
}

double elasticity_x_d(const ModelParams& params, double d, double a) {
  return elasticities(params, d, a).e_x_d;
}

double elasticity_x_a(const ModelParams& params, double d, double a) {
  return elasticities(params, d, a).e_x_a;
}

double elasticity_n_d(const ModelParams& params, double d, double a) {
  return elasticities(params, d, a).e_n_d;
}

double elasticity_n_a(const ModelParams& params, double d, double a) {
  return elasticities(params, d, a).e_n_a;
}

double implicit_elasticity_x_d(const ModelParams& params, double d, double a) {
  const double x_hat = positive_root(params, d, a).x_hat;
  return d * implicit_slope(params, x_hat) / x_hat;
}

double implicit_elasticity_x_a(const ModelParams& params, double d, double a) {
  const double x_hat = positive_root(params, d, a).x_hat;
  return a * params.t / (2.0 * params.r) * implicit_slope(params, x_hat) / x_hat;
}

double default_difference_step(double at) { return 1e-6 * std::max(1.0, std::abs(at)); }

double finite_difference_elasticity(const std::function<double(double)>& fn,
                                    double at, double step) {
  const double value = fn(at);
  if (value == 0.0) throw DomainError("elasticity undefined where fn(at) = 0");
  const double slope = (fn(at + step) - fn(at - step)) / (2.0 * step);
  return -slope * at / value;
}

double finite_difference_elasticity(const std::function<double(double)>& fn,
                                    double at) {
  return finite_difference_elasticity(fn, at, default_difference_step(at));
}

}  // namespace ispmarket
