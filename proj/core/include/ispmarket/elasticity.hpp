#pragma once

#include <functional>

#include "ispmarket/model.hpp"

namespace ispmarket {

// Price elasticities e(q, p) = -(dq / q) / (dp / p) of both demands.
struct ElasticityBundle {
  double e_x_d = 0.0;
  double e_x_a = 0.0;
  double e_n_d = 0.0;
  double e_n_a = 0.0;
  double sum_term = 0.0;           // A = mu + lambda K
  double discriminant_root = 0.0;  // B
};

// Closed forms in terms of A and B. Throws DomainError when x_hat(d, a) <= 0.
ElasticityBundle elasticities(const ModelParams& params, double d, double a);

double elasticity_x_d(const ModelParams& params, double d, double a);
double elasticity_x_a(const ModelParams& params, double d, double a);

// n is proportional to x_hat at fixed a, so e_n_d = e_x_d.
double elasticity_n_d(const ModelParams& params, double d, double a);

// e_n_a = e_x_a + a / (a + f); the second term is the direct entry-cost effect.
double elasticity_n_a(const ModelParams& params, double d, double a);

// Second route through implicit differentiation of the marginal-consumer
// condition: dx_hat/dK = 1 / (1 + lambda / (mu - lambda x_hat)^2).
double implicit_elasticity_x_d(const ModelParams& params, double d, double a);
double implicit_elasticity_x_a(const ModelParams& params, double d, double a);

// Central step 1e-6 * max(1, |at|).
double default_difference_step(double at);

// -[(fn(at + step) - fn(at - step)) / (2 step)] * at / fn(at).
double finite_difference_elasticity(const std::function<double(double)>& fn,
                                    double at, double step);
double finite_difference_elasticity(const std::function<double(double)>& fn,
                                    double at);

}  // namespace ispmarket
