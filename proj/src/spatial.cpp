#include "tailfit/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tailfit/error.hpp"
#include "tailfit/numeric.hpp"
#include "tailfit/optimize.hpp"
#include "tailfit/parallel.hpp"

namespace tailfit {
namespace {

const TailFamily kPairFamily(FamilyId::InvertedHuslerReiss);

constexpr double kAlphaMin = 1e-3;
constexpr double kAlphaMax = 2.0;
constexpr double kBetaSpan = 1e3;  // beta searched in [min D / span, max D * span]

std::string pair_label(PairIndex p) {
  std::ostringstream os;
  os << "pair (" << p.first + 1 << ", " << p.second + 1 << ")";
  return os.str();
}

void check_distances(std::span<const double> distances) {
  if (distances.empty()) fail(ErrorCode::SpatialNoData, "no usable location pairs");
  for (double d : distances)
    if (!(d > 0.0) || !std::isfinite(d))
      fail(ErrorCode::InvalidArgument, "pair distances must be positive and finite");
  const auto [lo, hi] = std::minmax_element(distances.begin(), distances.end());
  if (distances.size() < 2 || *hi - *lo <= 1e-12 * *hi)
    fail(ErrorCode::Underidentified, "(alpha, beta) needs at least two distinct pair distances");
}

// Search over (alpha, log beta).
Box search_box(std::span<const double> distances) {
  const auto [lo, hi] = std::minmax_element(distances.begin(), distances.end());
  return Box{{kAlphaMin, std::log(*lo / kBetaSpan)}, {kAlphaMax, std::log(*hi * kBetaSpan)}};
}

// Starting points spread over the plausible range, in addition to the Latin
// hypercube: beta at the smallest, median and largest distance.
std::vector<std::vector<double>> extra_starts(std::span<const double> distances) {
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::vector<double>> starts;
  for (double beta : {sorted.front(), sorted[sorted.size() / 2], sorted.back()})
    for (double alpha : {0.5, 1.0, 1.5}) starts.push_back({alpha, std::log(beta)});
  return starts;
}

struct Minimum {
  double alpha = 0.0;
  double beta = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
};

Minimum minimize(const Objective& f, std::span<const double> distances, const SpatialOptions& options,
                 std::vector<std::vector<double>> starts) {
  const Box box = search_box(distances);
  const Projector project = [&box](std::span<const double> x) { return box.clamp(x); };
  MultiStartOptions ms;
  ms.restarts = options.restarts;
  ms.seed = options.seed;
  ms.local.f_tol = options.tolerance;
  ms.local.x_tol = 1e-10;
  ms.local.max_evaluations = 4000;
  ms.grid_half_width = 0.02;
  ms.grid_points = 9;
  ms.extra_starts = std::move(starts);
  const MultiStartResult r = minimize_multistart(f, box, project, ms);
  return {r.best.x[0], std::exp(r.best.x[1]), r.best.converged && r.local_minimum, r.evaluations};
}

double pair_theta(double distance, double alpha, double beta) {
  // Keep strictly inside (1/2, 1] where the link underflows to 1/2.
  return std::max(link_theta(distance, alpha, beta), std::nextafter(0.5, 1.0));
}

}  // namespace

SpatialModel::SpatialModel(Coordinates coords, SpatialLink link)
    : coords_(std::move(coords)), link_(link), family_(kPairFamily) {
  if (coords_.x.size() != coords_.y.size())
    fail(ErrorCode::InvalidArgument, "coordinate columns differ in length");
  if (coords_.size() < 2) fail(ErrorCode::InvalidArgument, "a spatial model needs at least two sites");
  for (std::size_t a = 0; a < coords_.size(); ++a)
    for (std::size_t b = a + 1; b < coords_.size(); ++b) {
      const double d = coords_.distance(a, b);
      if (!(d > 0.0) || !std::isfinite(d))
        fail(ErrorCode::InvalidArgument, "sites " + std::to_string(a + 1) + " and " +
                                             std::to_string(b + 1) + " coincide");
      pairs_.push_back({a, b});
      distances_.push_back(d);
    }
}

double link_theta(double distance, double alpha, double beta) {
  if (!(alpha > 0.0 && alpha <= 2.0) || !(beta > 0.0) || !std::isfinite(beta) || !(distance >= 0.0))
    fail(ErrorCode::ThetaOutOfDomain, "fractal variogram link needs alpha in (0, 2], beta > 0");
  return normal_cdf(0.5 * std::pow(distance / beta, 0.5 * alpha));
}

std::size_t PairwiseFits::usable() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const PairEstimate& p) { return p.fit.has_value(); }));
}

PairwiseFits pairwise_fits(const RankedSample& sample, const SpatialModel& model, std::size_t m,
                           const WeightScheme& weights, const SpatialOptions& options) {
  if (sample.d() != model.sites())
    fail(ErrorCode::InvalidArgument, "data has " + std::to_string(sample.d()) + " columns but the model has " +
                                         std::to_string(model.sites()) + " sites");
  if (m == 0 || m > sample.n()) fail(ErrorCode::InvalidArgument, "m must be in 1..n");
  if (weights.family() != model.family())
    fail(ErrorCode::InvalidArgument, "weight scheme belongs to a different family");

  PairwiseFits out;
  out.requested_m = m;
  out.pairs.resize(model.pairs().size());
  parallel_for(out.pairs.size(), options.threads, [&](std::size_t s) {
    PairEstimate& est = out.pairs[s];
    est.pair = model.pairs()[s];
    est.distance = model.distances()[s];
    try {
      const TailIndexChoice choice = select_khat(sample, est.pair, m);
      est.k = choice.resolved_k;
      est.m = choice.resolved_m;
      est.b = empirical_moment_vector(sample, est.pair, est.k, weights);
      FitOptions fo = options.bivariate;
      fo.profile = options.profile;
      est.fit = fit_to_moments(model.family(), weights, est.b, est.k, est.m, sample.n(), fo);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoTailData && e.code() != ErrorCode::Unreachable) throw;
      est.fit.reset();
      est.warning = pair_label(est.pair) + " excluded: " + e.what();
    }
  });
  for (const auto& est : out.pairs)
    if (!est.warning.empty()) out.warnings.push_back(est.warning);
  return out;
}

double least_squares_objective(std::span<const double> distances, std::span<const double> thetas,
                               double alpha, double beta) {
  double sum = 0.0;
  for (std::size_t s = 0; s < distances.size(); ++s) {
    const double r = link_theta(distances[s], alpha, beta) - thetas[s];
    sum += r * r;
  }
  return sum;
}

double joint_objective(std::span<const double> distances, std::span<const std::vector<double>> moments,
                       const WeightScheme& weights, double alpha, double beta, ZetaProfile profile) {
  double sum = 0.0;
  for (std::size_t s = 0; s < distances.size(); ++s) {
    const ThetaVector theta(kPairFamily, {pair_theta(distances[s], alpha, beta)});
    const std::vector<double> v = model_moment_vector(kPairFamily, theta, weights);
    const double zeta = profile_zeta(v, moments[s], profile);
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double r = zeta * v[j] - moments[s][j];
      sum += r * r;
    }
  }
  return sum;
}

SpatialFit fit_least_squares(std::span<const double> distances, std::span<const double> thetas,
                             const SpatialOptions& options) {
  if (distances.size() != thetas.size())
    fail(ErrorCode::InvalidArgument, "one pairwise estimate per distance is required");
  check_distances(distances);
  // The norm rather than its square is minimized so that the simplex
  // tolerance acts on the residual scale.
  const Objective f = [&](std::span<const double> x) {
    return std::sqrt(least_squares_objective(distances, thetas, x[0], std::exp(x[1])));
  };
  const Minimum best = minimize(f, distances, options, extra_starts(distances));
  SpatialFit fit;
  fit.method = SpatialMethod::LeastSquares;
  fit.alpha_hat = best.alpha;
  fit.beta_hat = best.beta;
  fit.distances.assign(distances.begin(), distances.end());
  fit.pairwise_thetas.assign(thetas.begin(), thetas.end());
  fit.objective = least_squares_objective(distances, thetas, best.alpha, best.beta);
  fit.converged = best.converged;
  fit.evaluations = best.evaluations;
  return fit;
}

namespace {

struct UsablePairs {
  std::vector<PairIndex> pairs;
  std::vector<double> distances;
  std::vector<double> thetas;
  std::vector<std::vector<double>> moments;
  std::size_t m = 0;
};

UsablePairs collect(const PairwiseFits& fits) {
  UsablePairs u;
  u.m = fits.requested_m;
  for (const auto& est : fits.pairs) {
    if (!est.fit) continue;
    u.pairs.push_back(est.pair);
    u.distances.push_back(est.distance);
    u.thetas.push_back(est.fit->theta_hat[0]);
    u.moments.push_back(est.b);
  }
  if (u.pairs.empty()) fail(ErrorCode::SpatialNoData, "every location pair was excluded");
  return u;
}

}  // namespace

SpatialFit fit_least_squares(const PairwiseFits& fits, const SpatialOptions& options) {
  const UsablePairs u = collect(fits);
  SpatialFit fit = fit_least_squares(u.distances, u.thetas, options);
  fit.pairs = u.pairs;
  fit.m_used = u.m;
  fit.warnings = fits.warnings;
  return fit;
}

namespace {

SpatialFit joint_impl(std::span<const double> distances, std::span<const std::vector<double>> moments,
                      const WeightScheme& weights, const SpatialOptions& options,
                      std::vector<std::vector<double>> starts) {
  if (distances.size() != moments.size())
    fail(ErrorCode::InvalidArgument, "one moment vector per distance is required");
  if (weights.family() != kPairFamily)
    fail(ErrorCode::InvalidArgument, "the joint spatial fit needs inverted Husler-Reiss weights");
  check_distances(distances);
  for (const auto& b : moments)
    if (b.size() != weights.size())
      fail(ErrorCode::InvalidArgument, "moment vector does not match the weight scheme");

  const Objective f = [&](std::span<const double> x) {
    return std::sqrt(joint_objective(distances, moments, weights, x[0], std::exp(x[1]), options.profile));
  };
  const Minimum best = minimize(f, distances, options, std::move(starts));

  SpatialFit fit;
  fit.method = SpatialMethod::Joint;
  fit.alpha_hat = best.alpha;
  fit.beta_hat = best.beta;
  fit.distances.assign(distances.begin(), distances.end());
  for (std::size_t s = 0; s < distances.size(); ++s) {
    const double theta = pair_theta(distances[s], best.alpha, best.beta);
    const std::vector<double> v = model_moment_vector(kPairFamily, ThetaVector(kPairFamily, {theta}), weights);
    fit.zeta_hats.push_back(profile_zeta(v, moments[s], options.profile));
  }
  fit.objective = joint_objective(distances, moments, weights, best.alpha, best.beta, options.profile);
  fit.converged = best.converged;
  fit.evaluations = best.evaluations;
  return fit;
}

}  // namespace

SpatialFit fit_joint(std::span<const double> distances, std::span<const std::vector<double>> moments,
                     const WeightScheme& weights, const SpatialOptions& options) {
  check_distances(distances);
  return joint_impl(distances, moments, weights, options, extra_starts(distances));
}

SpatialFit fit_joint(const PairwiseFits& fits, const WeightScheme& weights, const SpatialOptions& options) {
  const UsablePairs u = collect(fits);
  check_distances(u.distances);
  // The least-squares solution is a natural extra starting point.
  std::vector<std::vector<double>> starts = extra_starts(u.distances);
  const SpatialFit ls = fit_least_squares(u.distances, u.thetas, options);
  starts.push_back({ls.alpha_hat, std::log(ls.beta_hat)});
  SpatialFit fit = joint_impl(u.distances, u.moments, weights, options, std::move(starts));
  fit.pairs = u.pairs;
  fit.pairwise_thetas = u.thetas;
  fit.m_used = u.m;
  fit.warnings = fits.warnings;
  return fit;
}

WeightScheme spatial_weights(WeightPreset preset) {
  return WeightScheme::preset(kPairFamily, kPairFamily.default_reference(), preset);
}

}  // namespace tailfit
