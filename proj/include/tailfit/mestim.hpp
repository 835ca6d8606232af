#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tailfit/empirical.hpp"
#include "tailfit/families.hpp"
#include "tailfit/geometry.hpp"

namespace tailfit {

// The five basic rectangles I1..I5.
Rectangle basic_rectangle(int index);

// Rectangle subsets g(1)..g(7); g(1) uses all five.
enum class WeightPreset { G1 = 1, G2, G3, G4, G5, G6, G7 };

WeightPreset weight_preset_from_name(std::string_view name);
std::vector<Rectangle> preset_rectangles(WeightPreset preset);

// Normalized rectangle indicators: component j is 1{(x,y) in rect_j} / a_j
// with a_j the integral of c at the reference parameter over rect_j.
class WeightScheme {
 public:
  WeightScheme(const TailFamily& family, const ThetaVector& reference, std::vector<Rectangle> rects);

  // All five rectangles at the family's default reference point.
  static WeightScheme standard(const TailFamily& family);
  static WeightScheme preset(const TailFamily& family, const ThetaVector& reference,
                             WeightPreset preset);

  const TailFamily& family() const noexcept { return family_; }
  const ThetaVector& reference() const noexcept { return reference_; }
  std::span<const Rectangle> rects() const noexcept { return rects_; }
  std::span<const double> norms() const noexcept { return norms_; }
  std::size_t size() const noexcept { return rects_.size(); }
  // Largest rectangle corner coordinate (the integration bound T).
  double upper_bound() const noexcept { return upper_; }

 private:
  TailFamily family_;
  ThetaVector reference_;
  std::vector<Rectangle> rects_;
  std::vector<double> norms_;
  double upper_ = 0.0;
};

inline WeightScheme default_weights(const TailFamily& family, const ThetaVector& reference) {
  return WeightScheme::preset(family, reference, WeightPreset::G1);
}

// v_j(theta) = integral of c_theta over rect_j, divided by a_j.
std::vector<double> model_moment_vector(const TailFamily& family, const ThetaVector& theta,
                                        const WeightScheme& weights);

// b_j = exact integral of the empirical tail function over rect_j, divided by a_j.
std::vector<double> empirical_moment_vector(const RankedSample& sample, PairIndex pair,
                                            std::size_t k, const WeightScheme& weights);

enum class ZetaProfile {
  LeastSquares,  // <v, b> / <v, v>, the exact minimizer of |zeta v - b|
  RatioOfSums,   // sum(b) / sum(v)
};

inline constexpr double kZetaFloor = 1e-12;

// Scale minimizing |zeta v - b| over zeta > 0 (floored at kZetaFloor). The
// ratio-of-sums variant throws NonPositiveZeta instead of flooring.
double profile_zeta(std::span<const double> v, std::span<const double> b,
                    ZetaProfile profile = ZetaProfile::LeastSquares);

struct FitOptions {
  unsigned restarts = 8;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
  double grid_half_width = 0.02;
  unsigned grid_points = 9;
  std::size_t max_evaluations = 4000;
  ZetaProfile profile = ZetaProfile::LeastSquares;
};

struct BivariateFit {
  std::vector<double> theta_hat;
  double zeta_hat = 0.0;
  double sigma_hat = 0.0;  // n zeta / m; NaN when m = 0
  double eta_hat = 0.0;
  double objective = 0.0;
  std::size_t k_used = 0;
  std::size_t m_used = 0;
  std::size_t n = 0;
  bool converged = false;
  bool at_boundary = false;
  unsigned restarts_used = 0;
  std::size_t evaluations = 0;
};

// |zeta(theta) v(theta) - b| with zeta profiled out.
double profiled_objective(const TailFamily& family, std::span<const double> theta,
                          const WeightScheme& weights, std::span<const double> b,
                          ZetaProfile profile = ZetaProfile::LeastSquares);

// Minimizes the profiled objective for given empirical moments b. k, m and n
// are only recorded (and used for sigma_hat).
BivariateFit fit_to_moments(const TailFamily& family, const WeightScheme& weights,
                            std::span<const double> b, std::size_t k, std::size_t m,
                            std::size_t n, const FitOptions& options = {});

// Bivariate M-estimator on the columns `pair` of a ranked sample. Throws
// NoTailData when the empirical moments vanish.
BivariateFit fit_bivariate(const RankedSample& sample, PairIndex pair, const TailFamily& family,
                           const WeightScheme& weights, TailIndexChoice choice,
                           const FitOptions& options = {});

// Jacobian of Psi(theta, sigma) = sigma v(theta) - v(theta_hat) at
// (theta_hat, 1), by central differences with relative step `step`.
Eigen::MatrixXd moment_jacobian(const TailFamily& family, std::span<const double> theta_hat,
                                const WeightScheme& weights, double step = 1e-5);

// A_jl = integral over rect_j x rect_l of c(x ^ x', y ^ y') / (a_j a_l), for
// the product families (closed form).
Eigen::MatrixXd ai_covariance_kernel(const TailFamily& family, const ThetaVector& theta,
                                     const WeightScheme& weights);

// Plug-in covariance of (theta_hat, n zeta_hat / m) under asymptotic
// independence: (J'J)^-1 J'AJ (J'J)^-1 / m.
Eigen::MatrixXd plugin_covariance_ai(const TailFamily& family, const BivariateFit& fit,
                                     const WeightScheme& weights);

}  // namespace tailfit
