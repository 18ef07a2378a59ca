#include "ispmarket/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "ispmarket/errors.hpp"

namespace ispmarket {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kBisectionSteps = 64;
constexpr int kNewtonSteps = 60;
constexpr int kCurveScanPoints = 41;
constexpr int kCurveRecenterLimit = 40;
constexpr int kPolishRounds = 3;
// Refinement stays (numerically) inside the feasible set so it cannot trade the
// grid's feasibility slack for objective value.
constexpr double kRefineFeasibility = 1e-13;

struct Vertex {
  Point x;
  double value = kNegInf;
};

class Problem {
 public:
  Problem(const ScalarField& objective, std::span<const InequalityConstraint> constraints,
          const SearchBox& box, const SolverConfig& config)
      : objective_(objective), constraints_(constraints), box_(box), config_(config) {
    for (std::size_t j = 0; j < box.lower.size(); ++j) {
      if (box.upper[j] > box.lower[j]) free_axes_.push_back(j);
    }
  }

  std::size_t dims() const { return box_.lower.size(); }
  const std::vector<std::size_t>& free_axes() const { return free_axes_; }
  std::size_t constraint_count() const { return constraints_.size(); }
  double lower(std::size_t axis) const { return box_.lower[axis]; }
  double width(std::size_t axis) const { return box_.upper[axis] - box_.lower[axis]; }
  std::size_t evaluations() const { return evaluations_; }

  Point clamp(Point x) const {
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = std::clamp(x[j], box_.lower[j], box_.upper[j]);
    }
    return x;
  }

  std::optional<double> constraint(std::size_t i, const Point& x) const {
    try {
      const double g = constraints_[i].value(x);
      if (std::isnan(g)) return std::nullopt;
      return g;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  bool feasible(const Point& x, double tolerance) const {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!(x[j] >= box_.lower[j] && x[j] <= box_.upper[j])) return false;
    }
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
      const auto g = constraint(i, x);
      if (!g || *g < -tolerance) return false;
    }
    return true;
  }

  bool feasible(const Point& x) const {
    return feasible(x, std::min(config_.feasibility_tolerance, kRefineFeasibility));
  }

  // Objective at a feasible point, -inf elsewhere. The coarse scan passes the
  // configured feasibility tolerance; refinement uses the strict default.
  double value(const Point& x) { return value(x, std::min(config_.feasibility_tolerance, kRefineFeasibility)); }

  double value(const Point& x, double tolerance) {
    if (!feasible(x, tolerance)) return kNegInf;
    ++evaluations_;
    try {
      const double f = objective_(x);
      return std::isnan(f) ? kNegInf : f;
    } catch (const std::exception&) {
      return kNegInf;
    }
  }

  // Last feasible point on the segment from `anchor` (feasible) toward `trial`.
  Point pull_back(const Point& anchor, Point trial) const {
    trial = clamp(std::move(trial));
    if (feasible(trial)) return trial;
    double lo = 0.0;
    double hi = 1.0;
    for (int step = 0; step < kBisectionSteps; ++step) {
      const double mid = 0.5 * (lo + hi);
      if (feasible(lerp(anchor, trial, mid))) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lerp(anchor, trial, lo);
  }

  static Point lerp(const Point& from, const Point& to, double s) {
    Point out(from.size());
    for (std::size_t j = 0; j < from.size(); ++j) out[j] = from[j] + s * (to[j] - from[j]);
    return out;
  }

  const SolverConfig& config() const { return config_; }

 private:
  const ScalarField& objective_;
  std::span<const InequalityConstraint> constraints_;
  const SearchBox& box_;
  const SolverConfig& config_;
  std::vector<std::size_t> free_axes_;
  std::size_t evaluations_ = 0;
};

// Better value first; equal values fall back to the lexicographically smaller
// point so the ordering is total and deterministic.
bool better(const Vertex& lhs, const Vertex& rhs) {
  if (lhs.value != rhs.value) return lhs.value > rhs.value;
  return lhs.x < rhs.x;
}

std::vector<Vertex> scan_grid(Problem& problem) {
  const std::size_t dims = problem.dims();
  const int grid = problem.config().grid;
  std::vector<int> counts(dims);
  for (std::size_t j = 0; j < dims; ++j) counts[j] = problem.width(j) > 0.0 ? grid : 1;

  std::vector<Vertex> feasible;
  std::vector<int> index(dims, 0);
  Point x(dims);
  while (true) {
    for (std::size_t j = 0; j < dims; ++j) {
      const double lo = problem.lower(j);
      x[j] = counts[j] == 1 ? lo : lo + problem.width(j) * index[j] / (counts[j] - 1);
    }
    const double f = problem.value(x, problem.config().feasibility_tolerance);
    if (f > kNegInf) feasible.push_back({x, f});

    std::size_t axis = dims;
    while (axis > 0) {
      --axis;
      if (++index[axis] < counts[axis]) break;
      index[axis] = 0;
      if (axis == 0) return feasible;
    }
    if (dims == 0) return feasible;
  }
}

struct SimplexOutcome {
  Vertex best;
  bool converged = false;
};

double scaled_distance(const Problem& problem, const Point& a, const Point& b) {
  double dist = 0.0;
  for (std::size_t axis : problem.free_axes()) {
    dist = std::max(dist, std::abs(a[axis] - b[axis]) / problem.width(axis));
  }
  return dist;
}

SimplexOutcome nelder_mead(Problem& problem, const Vertex& start) {
  const auto& axes = problem.free_axes();
  const std::size_t k = axes.size();
  const auto& config = problem.config();
  if (k == 0) return {start, true};

  std::vector<Vertex> simplex{start};
  for (std::size_t axis : axes) {
    const double step = problem.width(axis) / std::max(1, config.grid - 1);
    Vertex best_candidate;
    for (double sign : {1.0, -1.0}) {
      Point trial = start.x;
      trial[axis] += sign * step;
      Point pulled = problem.pull_back(start.x, trial);
      if (scaled_distance(problem, pulled, start.x) >
          scaled_distance(problem, best_candidate.x.empty() ? start.x : best_candidate.x,
                          start.x)) {
        best_candidate = {pulled, problem.value(pulled)};
      }
    }
    if (best_candidate.x.empty()) best_candidate = start;
    simplex.push_back(best_candidate);
  }

  auto combine = [&](const Point& centroid, const Point& toward, double coefficient) {
    Point out(centroid.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] = centroid[j] + coefficient * (toward[j] - centroid[j]);
    }
    return out;
  };

  for (int iteration = 0; iteration < config.max_iterations; ++iteration) {
    std::sort(simplex.begin(), simplex.end(), better);

    double diameter = 0.0;
    for (std::size_t i = 1; i <= k; ++i) {
      diameter = std::max(diameter, scaled_distance(problem, simplex[i].x, simplex[0].x));
    }
    if (diameter < config.tolerance) return {simplex[0], true};

    const Point& best = simplex[0].x;
    Point centroid(best.size(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < centroid.size(); ++j) centroid[j] += simplex[i].x[j] / k;
    }
    const Vertex worst = simplex[k];

    auto trial = [&](double coefficient) {
      Point x = problem.pull_back(best, combine(centroid, worst.x, coefficient));
      return Vertex{x, problem.value(x)};
    };

    const Vertex reflected = trial(-1.0);
    if (better(reflected, simplex[0])) {
      const Vertex expanded = trial(-2.0);
      simplex[k] = better(expanded, reflected) ? expanded : reflected;
      continue;
    }
    if (better(reflected, simplex[k - 1])) {
      simplex[k] = reflected;
      continue;
    }
    const bool outside = better(reflected, worst);
    const Vertex contracted = trial(outside ? -0.5 : 0.5);
    if (better(contracted, outside ? reflected : worst)) {
      simplex[k] = contracted;
      continue;
    }
    for (std::size_t i = 1; i <= k; ++i) {
      Point x = problem.pull_back(best, combine(best, simplex[i].x, 0.5));
      simplex[i] = {x, problem.value(x)};
    }
  }
  std::sort(simplex.begin(), simplex.end(), better);
  return {simplex[0], false};
}

// Central-difference gradient of constraint i over the free axes.
std::optional<std::vector<double>> constraint_gradient(const Problem& problem, std::size_t i,
                                                       const Point& x) {
  std::vector<double> grad;
  for (std::size_t axis : problem.free_axes()) {
    const double h = 1e-7 * std::max(1.0, std::abs(x[axis]));
    Point up = x;
    Point down = x;
    up[axis] += h;
    down[axis] -= h;
    const auto g_up = problem.constraint(i, up);
    const auto g_down = problem.constraint(i, down);
    if (!g_up || !g_down) return std::nullopt;
    grad.push_back((*g_up - *g_down) / (2.0 * h));
  }
  return grad;
}

// Solves the square system matrix * out = rhs by partial-pivot elimination.
std::optional<std::vector<double>> solve_linear(std::vector<std::vector<double>> matrix,
                                                std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(matrix[row][col]) > std::abs(matrix[pivot][col])) pivot = row;
    }
    if (!(std::abs(matrix[pivot][col]) > 1e-300)) return std::nullopt;
    std::swap(matrix[pivot], matrix[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double factor = matrix[row][col] / matrix[col][col];
      for (std::size_t c = col; c < n; ++c) matrix[row][c] -= factor * matrix[col][c];
      rhs[row] -= factor * rhs[col];
    }
  }
  std::vector<double> out(n);
  for (std::size_t row = n; row-- > 0;) {
    double acc = rhs[row];
    for (std::size_t c = row + 1; c < n; ++c) acc -= matrix[row][c] * out[c];
    out[row] = acc / matrix[row][row];
  }
  return out;
}

// Newton iteration driving every constraint in `active` to zero. With as many
// active constraints as free axes this lands on a vertex; with fewer it takes
// minimum-norm steps onto the intersection of their boundaries.
std::optional<Point> project_onto(const Problem& problem, const std::vector<std::size_t>& active,
                                  Point x) {
  const auto& axes = problem.free_axes();
  const std::size_t m = active.size();
  for (int step = 0; step < kNewtonSteps; ++step) {
    std::vector<double> residual(m);
    std::vector<std::vector<double>> jacobian(m);
    double worst = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const auto g = problem.constraint(active[r], x);
      const auto grad = constraint_gradient(problem, active[r], x);
      if (!g || !grad) return std::nullopt;
      residual[r] = *g;
      jacobian[r] = *grad;
      worst = std::max(worst, std::abs(*g));
    }
    if (worst == 0.0) return x;

    // Minimum-norm step: J^T (J J^T)^{-1} residual.
    std::vector<std::vector<double>> gram(m, std::vector<double>(m, 0.0));
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t j = 0; j < axes.size(); ++j) gram[r][c] += jacobian[r][j] * jacobian[c][j];
      }
    }
    const auto multipliers = solve_linear(gram, residual);
    if (!multipliers) return std::nullopt;

    double change = 0.0;
    for (std::size_t j = 0; j < axes.size(); ++j) {
      double delta = 0.0;
      for (std::size_t r = 0; r < m; ++r) delta += jacobian[r][j] * (*multipliers)[r];
      x[axes[j]] -= delta;
      change = std::max(change, std::abs(delta) / problem.width(axes[j]));
    }
    x = problem.clamp(std::move(x));
    if (change < 1e-16) break;
  }
  for (std::size_t r = 0; r < m; ++r) {
    const auto g = problem.constraint(active[r], x);
    if (!g || std::abs(*g) > 0.1 * problem.config().feasibility_tolerance) return std::nullopt;
  }
  return x;
}

// Maximizes the objective along the boundary curve of one constraint (two free
// axes). The curve is parametrized by arc offset along the local tangent, each
// offset point being projected back onto the boundary.
Vertex search_curve(Problem& problem, std::size_t constraint, const Point& start) {
  Vertex best;
  const auto anchor = project_onto(problem, {constraint}, start);
  if (!anchor) return best;

  const auto& axes = problem.free_axes();
  double span = 0.0;
  for (std::size_t axis : axes) {
    span = std::max(span, 4.0 * problem.width(axis) / std::max(1, problem.config().grid - 1));
  }

  Point center = *anchor;
  for (int round = 0; round < kCurveRecenterLimit; ++round) {
    const auto grad = constraint_gradient(problem, constraint, center);
    if (!grad) return best;
    const double norm = std::hypot((*grad)[0], (*grad)[1]);
    if (!(norm > 0.0)) return best;
    Point tangent(center.size(), 0.0);
    tangent[axes[0]] = -(*grad)[1] / norm;
    tangent[axes[1]] = (*grad)[0] / norm;

    auto along = [&](double s) -> Vertex {
      Point x = center;
      for (std::size_t j = 0; j < x.size(); ++j) x[j] += s * tangent[j];
      const auto on_curve = project_onto(problem, {constraint}, problem.clamp(x));
      if (!on_curve) return {};
      return {*on_curve, problem.value(*on_curve)};
    };

    std::vector<double> offsets(kCurveScanPoints);
    std::vector<Vertex> samples(kCurveScanPoints);
    std::size_t top = 0;
    for (int i = 0; i < kCurveScanPoints; ++i) {
      offsets[i] = -span + 2.0 * span * i / (kCurveScanPoints - 1);
      samples[i] = along(offsets[i]);
      if (better(samples[i], samples[top]) && samples[i].value > kNegInf) top = i;
    }
    if (!(samples[top].value > kNegInf)) return best;

    // Golden section on the bracket around the best sample.
    double lo = offsets[top == 0 ? 0 : top - 1];
    double hi = offsets[top + 1 == offsets.size() ? top : top + 1];
    Vertex local = samples[top];
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - ratio * (hi - lo);
    double d = lo + ratio * (hi - lo);
    Vertex fc = along(c);
    Vertex fd = along(d);
    while (hi - lo > 1e-15 * std::max(1.0, span)) {
      if (fc.value >= fd.value) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - ratio * (hi - lo);
        fc = along(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + ratio * (hi - lo);
        fd = along(d);
      }
      if (fc.value > kNegInf && better(fc, local)) local = fc;
      if (fd.value > kNegInf && better(fd, local)) local = fd;
    }
    if (best.x.empty() || better(local, best)) best = local;

    // Keep walking when the maximum sits at the edge of the scanned window.
    if (top != 0 && top + 1 != offsets.size()) break;
    if (samples[top == 0 ? 1 : top - 1].value == kNegInf) break;
    center = best.x;
  }
  return best;
}

void for_each_subset(std::size_t n, std::size_t size,
                     const std::function<void(const std::vector<std::size_t>&)>& visit) {
  if (size == 0 || size > n) return;
  std::vector<std::size_t> pick(size);
  for (std::size_t i = 0; i < size; ++i) pick[i] = i;
  while (true) {
    visit(pick);
    std::size_t i = size;
    while (i > 0 && pick[i - 1] == n - size + (i - 1)) --i;
    if (i == 0) return;
    ++pick[i - 1];
    for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
  }
}

// Tries every vertex and, with two free axes, every single-constraint boundary
// curve near `current`; keeps the best feasible candidate. A boundary point
// within rounding of the current value replaces it (it is the exact corner the
// simplex was creeping toward) but does not count as an improvement.
bool polish(Problem& problem, Vertex& current) {
  const std::size_t free = problem.free_axes().size();
  const std::size_t m = problem.constraint_count();
  bool improved = false;
  const Point origin = current.x;

  auto consider = [&](const Vertex& candidate) {
    if (!(candidate.value > kNegInf)) return;
    const double rounding = 1e-13 * std::max(1.0, std::abs(current.value));
    if (candidate.value > current.value + rounding) {
      current = candidate;
      improved = true;
    } else if (candidate.value >= current.value - rounding) {
      current = candidate;
    }
  };

  for_each_subset(m, free, [&](const std::vector<std::size_t>& active) {
    const auto vertex = project_onto(problem, active, origin);
    if (vertex) consider({*vertex, problem.value(*vertex)});
  });
  if (free == 2) {
    for (std::size_t i = 0; i < m; ++i) consider(search_curve(problem, i, origin));
  }
  return improved;
}

}  // namespace

void validate(const SolverConfig& config) {
  if (config.grid < 2) throw std::invalid_argument("grid must be at least 2");
  if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!(config.feasibility_tolerance >= 0.0) || !(config.binding_tolerance >= 0.0) ||
      !(config.tie_tolerance >= 0.0)) {
    throw std::invalid_argument("tolerances must be non-negative");
  }
  if (config.max_tied_starts < 1) throw std::invalid_argument("max_tied_starts must be positive");
}

ConstrainedOptimum resolve_constrained_optimum(
    const ScalarField& objective, std::span<const InequalityConstraint> constraints,
    const SearchBox& box, const SolverConfig& config) {
  validate(config);
  if (box.lower.size() != box.upper.size() || box.lower.empty()) {
    throw std::invalid_argument("search box bounds must have equal, nonzero dimension");
  }
  for (std::size_t j = 0; j < box.lower.size(); ++j) {
    if (!(box.upper[j] >= box.lower[j])) throw std::invalid_argument("search box is empty");
  }

  Problem problem(objective, constraints, box, config);
  std::vector<Vertex> grid = scan_grid(problem);
  if (grid.empty()) throw InfeasibleModel("no feasible point on the search grid");

  std::stable_sort(grid.begin(), grid.end(), better);
  const double grid_best = grid.front().value;

  std::vector<Vertex> starts;
  for (const Vertex& v : grid) {
    if (v.value < grid_best - config.tie_tolerance || starts.size() >= config.max_tied_starts) break;
    starts.push_back(v);
  }
  // Grid order is by value; refine tied starts in (d, a) order.
  std::sort(starts.begin(), starts.end(),
            [](const Vertex& lhs, const Vertex& rhs) { return lhs.x < rhs.x; });

  std::optional<Vertex> chosen;
  bool chosen_converged = false;
  for (const Vertex& start : starts) {
    SimplexOutcome outcome = nelder_mead(problem, start);
    Vertex refined = outcome.best;
    bool converged = outcome.converged;
    for (int round = 0; round < kPolishRounds; ++round) {
      if (!polish(problem, refined)) break;
      converged = true;
    }
    const bool take =
        !chosen || refined.value > chosen->value + config.tie_tolerance ||
        (std::abs(refined.value - chosen->value) <= config.tie_tolerance && refined.x < chosen->x &&
         refined.value >= chosen->value - config.tie_tolerance);
    if (take) {
      chosen = refined;
      chosen_converged = converged;
    }
  }

  ConstrainedOptimum out;
  out.point = chosen->x;
  out.value = chosen->value;
  out.converged = chosen_converged;
  out.grid_best_value = grid_best;
  out.starts = starts.size();
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto g = problem.constraint(i, out.point);
    if (g && *g <= config.binding_tolerance) out.binding.push_back(i);
  }
  out.evaluations = problem.evaluations();
  return out;
}

}  // namespace ispmarket
