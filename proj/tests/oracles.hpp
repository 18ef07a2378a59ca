#pragma once

// Reference computations used only by the tests. None of them call the
// closed forms or the optimizer they are checked against.

#include <cmath>
#include <functional>
#include <stdexcept>

#include "ispmarket/model.hpp"

namespace oracle {

// Root of a decreasing function on [lo, hi] by plain bisection.
inline double bisect_decreasing(const std::function<double(double)>& fn, double lo, double hi) {
  if (fn(lo) < 0.0 || fn(hi) > 0.0) throw std::invalid_argument("root not bracketed");
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (fn(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Marginal consumer from the indifference condition, written out by hand.
inline double marginal_consumer(const ispmarket::ModelParams& p, double d, double a) {
  const auto residual = [&](double x) {
    return p.v - x - p.t * (a + p.f) / (2.0 * p.r) - d - 1.0 / (p.mu - p.lambda * x);
  };
  const double top = p.mu / p.lambda;
  double hi = top * (1.0 - 1e-15);
  double lo = -1.0;
  while (residual(lo) < 0.0) lo *= 2.0;
  while (residual(hi) > 0.0) hi = 0.5 * (hi + top);
  return bisect_decreasing(residual, lo, hi);
}

// Maximizer of a unimodal function on [lo, hi].
inline double golden_section_max(const std::function<double(double)>& fn, double lo, double hi,
                                 double tol = 1e-13) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = fn(x1);
  double f2 = fn(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = fn(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = fn(x1);
    }
  }
  return 0.5 * (lo + hi);
}

inline double isp_profit(const ispmarket::ModelParams& p, double d, double a) {
  const double x = marginal_consumer(p, d, a);
  return d * x + a * p.r * x / (a + p.f);
}

inline bool feasible(const ispmarket::ModelParams& p, double d, double a, double tol = 1e-9) {
  const double x = marginal_consumer(p, d, a);
  return x >= -tol && x <= 1.0 + tol && p.r * x / (a + p.f) >= 1.0 - tol;
}

}  // namespace oracle
