#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ispmarket {

struct SolverConfig {
  int grid = 101;                        // coarse-scan points per axis
  int max_iterations = 4000;             // simplex iterations per start
  double tolerance = 1e-12;              // simplex diameter, relative to the box
  double feasibility_tolerance = 1e-9;
  double binding_tolerance = 1e-7;
  double tie_tolerance = 1e-9;
  std::size_t max_tied_starts = 16;
};

// Throws std::invalid_argument on a nonsensical configuration.
void validate(const SolverConfig& config);

using Point = std::vector<double>;
using ScalarField = std::function<double(std::span<const double>)>;

// Inequality constraint g(x) >= 0. A point is feasible when every constraint is
// at least -feasibility_tolerance.
struct InequalityConstraint {
  ScalarField value;
};

struct SearchBox {
  Point lower;
  Point upper;
};

struct ConstrainedOptimum {
  Point point;
  double value = 0.0;
  std::vector<std::size_t> binding;  // indices into the constraint list
  bool converged = false;
  double grid_best_value = 0.0;
  std::size_t evaluations = 0;
  std::size_t starts = 0;  // grid points refined (ties within tie_tolerance)
};

// Maximizes `objective` over the feasible part of `box`.
//
// A coarse grid scan picks the starting points, a Nelder-Mead simplex refines
// each one (trial points outside the feasible set are pulled back toward the
// best vertex by bisection), and an active-set polish then maximizes over each
// constraint boundary and intersection near the result. Only feasible
// improvements are ever accepted, so the returned value is never below the
// grid's best.
//
// Objective and constraint evaluations that throw are treated as infeasible.
// Throws InfeasibleModel when no grid point is feasible.
ConstrainedOptimum resolve_constrained_optimum(
    const ScalarField& objective, std::span<const InequalityConstraint> constraints,
    const SearchBox& box, const SolverConfig& config);

}  // namespace ispmarket
