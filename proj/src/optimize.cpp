#include "tailfit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tailfit/error.hpp"

namespace tailfit {
namespace {

constexpr double kPenalty = 10.0;

struct PenalizedObjective {
  const Objective& f;
  const Projector& project;
  std::size_t evaluations = 0;

  double operator()(std::span<const double> x) {
    ++evaluations;
    const std::vector<double> p = project(x);
    double dist2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dist2 += (x[i] - p[i]) * (x[i] - p[i]);
    const double value = f(p);
    if (!std::isfinite(value)) return std::numeric_limits<double>::max();
    return value + kPenalty * std::sqrt(dist2);
  }
};

}  // namespace

std::vector<double> Box::clamp(std::span<const double> x) const {
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo[i], hi[i]);
  return out;
}

OptimumResult nelder_mead(const Objective& f, std::span<const double> start, const Box& box,
                          const Projector& project, const NelderMeadOptions& options) {
  const std::size_t p = box.dimension();
  if (start.size() != p || p == 0) fail(ErrorCode::InvalidArgument, "nelder_mead: dimension mismatch");
  PenalizedObjective objective{f, project};

  std::vector<double> width(p);
  for (std::size_t i = 0; i < p; ++i) width[i] = box.hi[i] - box.lo[i];

  std::vector<std::vector<double>> simplex(p + 1, project(start));
  for (std::size_t i = 0; i < p; ++i) {
    const double step = options.initial_step * width[i];
    double& xi = simplex[i + 1][i];
    xi = (xi + step <= box.hi[i]) ? xi + step : xi - step;
  }
  std::vector<double> values(p + 1);
  for (std::size_t i = 0; i <= p; ++i) values[i] = objective(simplex[i]);

  std::vector<std::size_t> order(p + 1);
  std::vector<double> centroid(p), trial(p), trial2(p);
  bool converged = false;

  auto point_at = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t j = 0; j < p; ++j) out[j] = centroid[j] + t * (worst[j] - centroid[j]);
  };

  while (objective.evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b] || (values[a] == values[b] && a < b);
    });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[p - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]) / width[j]);
    if (values[worst] - values[best] <= options.f_tol && diameter <= options.x_tol) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= p; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < p; ++j) centroid[j] += simplex[i][j] / static_cast<double>(p);
    }

    point_at(-1.0, trial, simplex[worst]);
    const double reflected = objective(trial);
    if (reflected < values[best]) {
      point_at(-2.0, trial2, simplex[worst]);
      const double expanded = objective(trial2);
      if (expanded < reflected) {
        simplex[worst] = trial2;
        values[worst] = expanded;
      } else {
        simplex[worst] = trial;
        values[worst] = reflected;
      }
      continue;
    }
    if (reflected < values[second]) {
      simplex[worst] = trial;
      values[worst] = reflected;
      continue;
    }
    const bool outside = reflected < values[worst];
    point_at(outside ? -0.5 : 0.5, trial2, simplex[worst]);
    const double contracted = objective(trial2);
    if (contracted < (outside ? reflected : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = contracted;
      continue;
    }
    for (std::size_t i = 0; i <= p; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < p; ++j)
        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      values[i] = objective(simplex[i]);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  const std::size_t best = static_cast<std::size_t>(best_it - values.begin());
  OptimumResult result;
  result.x = project(simplex[best]);
  result.value = f(result.x);
  result.converged = converged;
  result.evaluations = objective.evaluations + 1;
  return result;
}

std::vector<std::vector<double>> latin_hypercube(const Box& box, std::size_t count,
                                                 CounterRng& rng) {
  const std::size_t p = box.dimension();
  std::vector<std::vector<double>> points(count, std::vector<double>(p));
  std::vector<std::size_t> strata(count);
  for (std::size_t j = 0; j < p; ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    for (std::size_t i = count; i > 1; --i) {
      const std::size_t swap_with = static_cast<std::size_t>(rng() % i);
      std::swap(strata[i - 1], strata[swap_with]);
    }
    for (std::size_t i = 0; i < count; ++i) {
      const double u = (static_cast<double>(strata[i]) + rng.uniform_open()) / static_cast<double>(count);
      points[i][j] = box.lo[j] + u * (box.hi[j] - box.lo[j]);
    }
  }
  return points;
}

OptimumResult grid_refine(const Objective& f, std::span<const double> center, const Box& box,
                          const Projector& project, double half_width, unsigned points) {
  const std::size_t p = box.dimension();
  OptimumResult best;
  best.x = project(center);
  best.value = f(best.x);
  best.evaluations = 1;
  if (points < 2) return best;
  std::vector<unsigned> index(p, 0);
  std::vector<double> x(p);
  while (true) {
    for (std::size_t j = 0; j < p; ++j)
      x[j] = center[j] - half_width + 2.0 * half_width * index[j] / (points - 1);
    const std::vector<double> feasible = project(x);
    const double value = f(feasible);
    ++best.evaluations;
    if (value < best.value) {
      best.value = value;
      best.x = feasible;
    }
    std::size_t axis = 0;
    while (axis < p && ++index[axis] == points) index[axis++] = 0;
    if (axis == p) break;
  }
  best.converged = true;
  return best;
}

MultiStartResult minimize_multistart(const Objective& f, const Box& box, const Projector& project,
                                     const MultiStartOptions& options) {
  CounterRng rng(options.seed, 0x6d756c7469ull);
  std::vector<std::vector<double>> starts = latin_hypercube(box, options.restarts, rng);
  starts.insert(starts.end(), options.extra_starts.begin(), options.extra_starts.end());

  MultiStartResult out;
  out.best.value = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    OptimumResult run = nelder_mead(f, start, box, project, options.local);
    out.evaluations += run.evaluations;
    ++out.restarts_used;
    if (run.value < out.best.value) out.best = std::move(run);
  }

  OptimumResult grid = grid_refine(f, out.best.x, box, project, options.grid_half_width,
                                   options.grid_points);
  out.evaluations += grid.evaluations;
  if (grid.value < out.best.value) {
    OptimumResult polish = nelder_mead(f, grid.x, box, project, options.local);
    out.evaluations += polish.evaluations;
    out.best = polish.value <= grid.value ? std::move(polish) : std::move(grid);
  }

  // Probe each coordinate direction; a strictly better neighbour means the
  // search stopped short of a local minimum.
  const std::size_t p = box.dimension();
  out.local_minimum = true;
  const double slack = options.local.f_tol;
  for (std::size_t j = 0; j < p && out.local_minimum; ++j) {
    const double h = 1e-4 * (box.hi[j] - box.lo[j]);
    for (double sign : {-1.0, 1.0}) {
      std::vector<double> probe = out.best.x;
      probe[j] += sign * h;
      probe = project(probe);
      ++out.evaluations;
      if (f(probe) < out.best.value - slack) {
        out.local_minimum = false;
        break;
      }
    }
  }
  return out;
}

}  // namespace tailfit
