#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailfit/empirical.hpp"
#include "tailfit/families.hpp"
#include "tailfit/mestim.hpp"
#include "tailfit/simulate.hpp"

namespace tailfit {

enum class SpatialLink {
  FractalVariogramIHR,  // theta(D) = Phi((D / beta)^{alpha/2} / 2), inverted Husler-Reiss pairs
};

// Locations plus all pairs (s1 < s2) in lexicographic order.
class SpatialModel {
 public:
  // Throws InvalidArgument for fewer than two sites or coinciding sites.
  explicit SpatialModel(Coordinates coords, SpatialLink link = SpatialLink::FractalVariogramIHR);

  const Coordinates& coords() const noexcept { return coords_; }
  std::size_t sites() const noexcept { return coords_.size(); }
  std::span<const PairIndex> pairs() const noexcept { return pairs_; }
  std::span<const double> distances() const noexcept { return distances_; }
  SpatialLink link() const noexcept { return link_; }
  const TailFamily& family() const noexcept { return family_; }

 private:
  Coordinates coords_;
  SpatialLink link_;
  TailFamily family_;
  std::vector<PairIndex> pairs_;
  std::vector<double> distances_;
};

// Phi((distance / beta)^{alpha/2} / 2). Throws ThetaOutOfDomain unless
// alpha in (0, 2], beta > 0 and distance >= 0.
double link_theta(double distance, double alpha, double beta);

struct PairEstimate {
  PairIndex pair;
  double distance = 0.0;
  std::size_t k = 0;
  std::size_t m = 0;
  std::vector<double> b;            // empirical moments at k
  std::optional<BivariateFit> fit;  // empty when the pair was excluded
  std::string warning;
};

struct PairwiseFits {
  std::vector<PairEstimate> pairs;  // same order as SpatialModel::pairs()
  std::vector<std::string> warnings;
  std::size_t requested_m = 0;

  std::size_t usable() const noexcept;
};

struct SpatialOptions {
  FitOptions bivariate{};
  unsigned restarts = 8;
  std::uint64_t seed = 0;
  double tolerance = 1e-10;
  ZetaProfile profile = ZetaProfile::LeastSquares;
  unsigned threads = 1;  // 0 = automatic
};

// Per-pair k from select_khat(m), moments and bivariate fit. Pairs with no
// usable tail data are excluded and reported in `warnings`.
PairwiseFits pairwise_fits(const RankedSample& sample, const SpatialModel& model, std::size_t m,
                           const WeightScheme& weights, const SpatialOptions& options = {});

enum class SpatialMethod { LeastSquares, Joint };

struct SpatialFit {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  SpatialMethod method = SpatialMethod::LeastSquares;
  std::vector<PairIndex> pairs;        // pairs used
  std::vector<double> distances;       // per used pair
  std::vector<double> pairwise_thetas; // bivariate estimates per used pair, when available
  std::vector<double> zeta_hats;       // per used pair, joint method only
  double objective = 0.0;              // sum of squares at the optimum
  std::size_t m_used = 0;
  bool converged = false;
  std::size_t evaluations = 0;
  std::vector<std::string> warnings;
};

// Eq. (12) style least squares: sum_s (h_s(alpha, beta) - theta_s)^2.
SpatialFit fit_least_squares(std::span<const double> distances, std::span<const double> thetas,
                             const SpatialOptions& options = {});
SpatialFit fit_least_squares(const PairwiseFits& fits, const SpatialOptions& options = {});

// Joint objective sum_s |zeta_s v(h_s) - b_s|^2 with each zeta_s profiled.
SpatialFit fit_joint(std::span<const double> distances, std::span<const std::vector<double>> moments,
                     const WeightScheme& weights, const SpatialOptions& options = {});
SpatialFit fit_joint(const PairwiseFits& fits, const WeightScheme& weights,
                     const SpatialOptions& options = {});

// Objective values, for checking a fit or evaluating a reference point.
double least_squares_objective(std::span<const double> distances, std::span<const double> thetas,
                               double alpha, double beta);
double joint_objective(std::span<const double> distances, std::span<const std::vector<double>> moments,
                       const WeightScheme& weights, double alpha, double beta,
                       ZetaProfile profile = ZetaProfile::LeastSquares);

// The standard weight scheme for the inverted Husler-Reiss pair family.
WeightScheme spatial_weights(WeightPreset preset = WeightPreset::G1);

}  // namespace tailfit
