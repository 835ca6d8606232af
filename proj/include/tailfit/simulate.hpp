#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailfit/families.hpp"
#include "tailfit/matrix.hpp"
#include "tailfit/rng.hpp"

namespace tailfit {

// Location coordinates, one row per site.
struct Coordinates {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const noexcept { return x.size(); }
  double distance(std::size_t a, std::size_t b) const;
};

// Draws from the max-stable copula C(u, v) = exp(-l(-log u, -log v)) by
// conditional inversion: v solves dC/du (u, v) = W for W uniform.
Matrix sample_ev_copula(StdfKind kind, std::span<const double> params, std::size_t n,
                        CounterRng& rng);
Matrix sample_ev_copula(const HuslerReissParams& p, std::size_t n, CounterRng& rng);
Matrix sample_ev_copula(const AsymLogisticParams& p, std::size_t n, CounterRng& rng);

enum class SimModel {
  M1,          // inverted Husler-Reiss with c = (xy)^theta
  M2,          // inverted asymmetric logistic (nu, phi, r)
  M3,          // Pareto random scale, alpha_W = 1 and alpha_R = lambda
  SpatialIBR,  // inverted Brown-Resnick with fractal variogram (|h| / beta)^alpha
};

enum class Margins { Uniform, Frechet };

enum class SpatialAlgorithm {
  ExtremalFunctions,   // exact
  NormalizedSpectral,  // sum-normalized spectral functions, capped Poisson sweep
};

struct SimSpec {
  SimModel model = SimModel::M1;
  double theta = 0.75;                   // M1; Husler-Reiss lambda = Phi^-1(theta)
  AsymLogisticParams logistic{};         // M2
  double lambda = 1.0;                   // M3
  Coordinates coords;                    // SpatialIBR
  double alpha = 1.0;                    // SpatialIBR
  double beta = 3.0;                     // SpatialIBR
  SpatialAlgorithm algorithm = SpatialAlgorithm::ExtremalFunctions;
  std::size_t spectral_cap = 2000;       // Poisson points per row for NormalizedSpectral
  std::size_t n = 1000;
  std::optional<double> noise_alpha;     // independent Pareto noise added to every column
  Margins margins = Margins::Frechet;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::size_t columns() const noexcept { return model == SimModel::SpatialIBR ? coords.size() : 2; }
  void validate() const;
};

// Dispatches on spec.model. Output is a deterministic function of the spec.
Matrix simulate(const SimSpec& spec);

// M1 / M2: (1 - Z1, 1 - Z2) for Z from the max-stable copula.
Matrix sample_inverted(const SimSpec& spec);
// M3: R (W1, W2) with R ~ Par(lambda), Wj ~ Par(1).
Matrix sample_random_scale(const SimSpec& spec);
// Spatial inverted Brown-Resnick field at spec.coords.
Matrix sample_inverted_brown_resnick(const SimSpec& spec);

// n x d max-stable Brown-Resnick draws with unit Frechet margins and
// variogram gamma(h) = (|h| / beta)^alpha.
Matrix sample_brown_resnick(const Coordinates& coords, double alpha, double beta, std::size_t n,
                            CounterRng& rng, SpatialAlgorithm algorithm = SpatialAlgorithm::ExtremalFunctions,
                            std::size_t spectral_cap = 2000);

// Frechet transform -1 / log(u), u clamped to [1e-300, 1 - 1e-16].
double frechet_from_uniform(double u) noexcept;

// d sites drawn uniformly on [0, side]^2 from a fixed seed.
Coordinates random_layout(std::size_t d, double side, std::uint64_t seed);

// Variogram (|h| / beta)^alpha.
double fractal_variogram(double distance, double alpha, double beta) noexcept;

}  // namespace tailfit
