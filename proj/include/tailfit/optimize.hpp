#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tailfit/rng.hpp"

namespace tailfit {

using Objective = std::function<double(std::span<const double>)>;
// Maps an arbitrary point to the nearest feasible one.
using Projector = std::function<std::vector<double>(std::span<const double>)>;

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dimension() const noexcept { return lo.size(); }
  std::vector<double> clamp(std::span<const double> x) const;
};

struct NelderMeadOptions {
  double f_tol = 1e-8;       // spread of objective values across the simplex
  double x_tol = 1e-8;       // simplex diameter, relative to the box width
  std::size_t max_evaluations = 4000;
  double initial_step = 0.05;  // fraction of the box width
};

struct OptimumResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
};

// Nelder-Mead on a box. Infeasible trial points are evaluated at their
// projection plus a penalty proportional to the projection distance, and the
// returned point is always feasible.
OptimumResult nelder_mead(const Objective& f, std::span<const double> start, const Box& box,
                          const Projector& project, const NelderMeadOptions& options = {});

// `count` points, one per stratum on every axis, jittered within strata.
std::vector<std::vector<double>> latin_hypercube(const Box& box, std::size_t count,
                                                 CounterRng& rng);

// Evaluates a `points`^p grid of half-width `half_width` around `center` and
// returns the best feasible grid point.
OptimumResult grid_refine(const Objective& f, std::span<const double> center, const Box& box,
                          const Projector& project, double half_width, unsigned points);

struct MultiStartOptions {
  unsigned restarts = 8;
  std::uint64_t seed = 0;
  NelderMeadOptions local;
  double grid_half_width = 0.02;
  unsigned grid_points = 9;
  // Extra starting points tried in addition to the Latin hypercube.
  std::vector<std::vector<double>> extra_starts;
};

struct MultiStartResult {
  OptimumResult best;
  unsigned restarts_used = 0;
  std::size_t evaluations = 0;
  bool local_minimum = false;  // coordinate probes around the optimum do not improve it
};

MultiStartResult minimize_multistart(const Objective& f, const Box& box, const Projector& project,
                                     const MultiStartOptions& options);

}  // namespace tailfit
