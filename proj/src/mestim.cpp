#include "tailfit/mestim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tailfit/error.hpp"
#include "tailfit/optimize.hpp"

namespace tailfit {

Rectangle basic_rectangle(int index) {
  switch (index) {
    case 1: return {0.0, 1.0, 0.0, 1.0};
    case 2: return {0.0, 2.0, 0.0, 2.0};
    case 3: return {0.5, 1.5, 0.5, 1.5};
    case 4: return {0.0, 1.0, 0.0, 3.0};
    case 5: return {0.0, 3.0, 0.0, 1.0};
    default: fail(ErrorCode::InvalidArgument, "basic rectangles are numbered 1..5");
  }
}

WeightPreset weight_preset_from_name(std::string_view name) {
  if (name.size() == 2 && (name[0] == 'g' || name[0] == 'G') && name[1] >= '1' && name[1] <= '7')
    return static_cast<WeightPreset>(name[1] - '0');
  fail(ErrorCode::InvalidArgument, "unknown weight preset '" + std::string(name) + "' (expected g1..g7)");
}

std::vector<Rectangle> preset_rectangles(WeightPreset preset) {
  std::vector<int> ids;
  switch (preset) {
    case WeightPreset::G1: ids = {1, 2, 3, 4, 5}; break;
    case WeightPreset::G2: ids = {1, 2}; break;
    case WeightPreset::G3: ids = {1, 3}; break;
    case WeightPreset::G4: ids = {1, 4, 5}; break;
    case WeightPreset::G5: ids = {1, 2, 3}; break;
    case WeightPreset::G6: ids = {1, 2, 4, 5}; break;
    case WeightPreset::G7: ids = {1, 3, 4, 5}; break;
  }
  std::vector<Rectangle> rects;
  for (int id : ids) rects.push_back(basic_rectangle(id));
  return rects;
}

WeightScheme::WeightScheme(const TailFamily& family, const ThetaVector& reference,
                           std::vector<Rectangle> rects)
    : family_(family), reference_(reference), rects_(std::move(rects)) {
  if (reference.family() != family.id())
    fail(ErrorCode::InvalidArgument, "reference parameter belongs to a different family");
  if (rects_.size() < family.dimension() + 1)
    fail(ErrorCode::Underidentified,
         "weight scheme needs at least dim(theta) + 1 = " + std::to_string(family.dimension() + 1) +
             " rectangles to identify (theta, zeta)");
  norms_.reserve(rects_.size());
  for (const auto& rect : rects_) {
    rect.validate();
    const double a = rect_integral_c(family_, reference_, rect);
    if (!(a > 0.0))
      fail(ErrorCode::InvalidArgument, "weight rectangle has zero mass under the reference c");
    norms_.push_back(a);
    upper_ = std::max({upper_, rect.x_hi, rect.y_hi});
  }
}

WeightScheme WeightScheme::standard(const TailFamily& family) {
  return preset(family, family.default_reference(), WeightPreset::G1);
}

WeightScheme WeightScheme::preset(const TailFamily& family, const ThetaVector& reference,
                                  WeightPreset preset) {
  return WeightScheme(family, reference, preset_rectangles(preset));
}

std::vector<double> model_moment_vector(const TailFamily& family, const ThetaVector& theta,
                                        const WeightScheme& weights) {
  if (family != weights.family())
    fail(ErrorCode::InvalidArgument, "weight scheme was built for a different family");
  std::vector<double> v(weights.size());
  for (std::size_t j = 0; j < v.size(); ++j)
    v[j] = rect_integral_c(family, theta, weights.rects()[j]) / weights.norms()[j];
  return v;
}

std::vector<double> empirical_moment_vector(const RankedSample& sample, PairIndex pair,
                                            std::size_t k, const WeightScheme& weights) {
  std::vector<double> b(weights.size());
  for (std::size_t j = 0; j < b.size(); ++j)
    b[j] = rect_integral_q(sample, pair, k, weights.rects()[j]) / weights.norms()[j];
  return b;
}

double profile_zeta(std::span<const double> v, std::span<const double> b, ZetaProfile profile) {
  if (v.size() != b.size()) fail(ErrorCode::InvalidArgument, "profile_zeta: length mismatch");
  if (profile == ZetaProfile::RatioOfSums) {
    const double sv = std::accumulate(v.begin(), v.end(), 0.0);
    const double sb = std::accumulate(b.begin(), b.end(), 0.0);
    if (sv == 0.0) fail(ErrorCode::ZeroModelVector, "model moment vector sums to zero");
    const double zeta = sb / sv;
    if (!(zeta > 0.0)) fail(ErrorCode::NonPositiveZeta, "ratio-of-sums scale is not positive");
    return zeta;
  }
  const double vv = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
  if (vv == 0.0) fail(ErrorCode::ZeroModelVector, "model moment vector is zero");
  const double vb = std::inner_product(v.begin(), v.end(), b.begin(), 0.0);
  return std::max(vb / vv, kZetaFloor);
}

namespace {

double residual_norm(std::span<const double> v, std::span<const double> b, double zeta) {
  double total = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double r = zeta * v[j] - b[j];
    total += r * r;
  }
  return std::sqrt(total);
}

bool on_boundary(const TailFamily& family, std::span<const double> theta) {
  const SearchBox box = family.search_box();
  if (family.id() == FamilyId::AsymLogisticAD) {
    // Only the ratio of (nu, phi) and r are identified.
    const double ratio = std::min(theta[0], theta[1]) / std::max(theta[0], theta[1]);
    return ratio <= box.lo[0] + 1e-6 || theta[2] - box.lo[2] <= 1e-6 * (box.hi[2] - box.lo[2]) ||
           box.hi[2] - theta[2] <= 1e-6 * (box.hi[2] - box.lo[2]);
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double tol = 1e-6 * (box.hi[i] - box.lo[i]);
    if (theta[i] - box.lo[i] <= tol || box.hi[i] - theta[i] <= tol) return true;
  }
  if (family.has_sum_constraint() && theta[0] + theta[1] - 1.0 <= 1e-6) return true;
  return false;
}

}  // namespace

double profiled_objective(const TailFamily& family, std::span<const double> theta,
                          const WeightScheme& weights, std::span<const double> b,
                          ZetaProfile profile) {
  const ThetaVector t(family, theta);
  const std::vector<double> v = model_moment_vector(family, t, weights);
  return residual_norm(v, b, profile_zeta(v, b, profile));
}

BivariateFit fit_to_moments(const TailFamily& family, const WeightScheme& weights,
                            std::span<const double> b, std::size_t k, std::size_t m,
                            std::size_t n, const FitOptions& options) {
  if (b.size() != weights.size())
    fail(ErrorCode::InvalidArgument, "empirical moments do not match the weight scheme");
  if (std::all_of(b.begin(), b.end(), [](double x) { return x == 0.0; }))
    fail(ErrorCode::NoTailData, "no joint tail observations inside the weight rectangles");

  const SearchBox search = family.search_box();
  const Box box{search.lo, search.hi};
  const Projector project = [&](std::span<const double> x) { return family.project(x); };
  const Objective objective = [&](std::span<const double> theta) {
    try {
      return profiled_objective(family, theta, weights, b, options.profile);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonPositiveZeta) return std::numeric_limits<double>::infinity();
      throw;
    }
  };

  MultiStartOptions ms;
  ms.restarts = options.restarts;
  ms.seed = options.seed;
  ms.local.f_tol = options.tolerance;
  ms.local.max_evaluations = options.max_evaluations;
  ms.grid_half_width = options.grid_half_width;
  ms.grid_points = options.grid_points;
  const MultiStartResult result = minimize_multistart(objective, box, project, ms);

  BivariateFit fit;
  fit.theta_hat = canonical_theta(family, result.best.x);
  const ThetaVector theta(family, fit.theta_hat);
  const std::vector<double> v = model_moment_vector(family, theta, weights);
  fit.zeta_hat = profile_zeta(v, b, options.profile);
  fit.objective = residual_norm(v, b, fit.zeta_hat);
  fit.eta_hat = eta_of(family, theta);
  fit.k_used = k;
  fit.m_used = m;
  fit.n = n;
  fit.sigma_hat = m > 0 ? static_cast<double>(n) * fit.zeta_hat / static_cast<double>(m)
                        : std::numeric_limits<double>::quiet_NaN();
  fit.converged = result.best.converged && result.local_minimum;
  fit.at_boundary = on_boundary(family, fit.theta_hat);
  fit.restarts_used = result.restarts_used;
  fit.evaluations = result.evaluations;
  return fit;
}

BivariateFit fit_bivariate(const RankedSample& sample, PairIndex pair, const TailFamily& family,
                           const WeightScheme& weights, TailIndexChoice choice,
                           const FitOptions& options) {
  const TailIndexChoice resolved = resolve(sample, pair, choice);
  const std::vector<double> b = empirical_moment_vector(sample, pair, resolved.resolved_k, weights);
  return fit_to_moments(family, weights, b, resolved.resolved_k, resolved.resolved_m, sample.n(),
                        options);
}

// ---------------------------------------------------------------------------
// Plug-in covariance

Eigen::MatrixXd moment_jacobian(const TailFamily& family, std::span<const double> theta_hat,
                                const WeightScheme& weights, double step) {
  const std::size_t p = family.dimension();
  const std::size_t q = weights.size();
  const ThetaVector center(family, theta_hat);
  const std::vector<double> v0 = model_moment_vector(family, center, weights);
  Eigen::MatrixXd jac(q, p + 1);
  std::vector<double> plus(theta_hat.begin(), theta_hat.end());
  std::vector<double> minus = plus;
  for (std::size_t i = 0; i < p; ++i) {
    const double h = step * std::max(std::abs(theta_hat[i]), 1e-3);
    plus = minus = std::vector<double>(theta_hat.begin(), theta_hat.end());
    plus[i] += h;
    minus[i] -= h;
    const bool has_plus = family.contains(plus);
    const bool has_minus = family.contains(minus);
    std::vector<double> vp = has_plus ? model_moment_vector(family, ThetaVector(family, plus), weights) : v0;
    std::vector<double> vm = has_minus ? model_moment_vector(family, ThetaVector(family, minus), weights) : v0;
    const double span = (has_plus ? h : 0.0) + (has_minus ? h : 0.0);
    if (span == 0.0) fail(ErrorCode::SingularJacobian, "no room for a finite difference step");
    for (std::size_t j = 0; j < q; ++j) jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = (vp[j] - vm[j]) / span;
  }
  for (std::size_t j = 0; j < q; ++j) jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p)) = v0[j];
  return jac;
}

namespace {

double power_integral(double s, double t, double p) {
  if (!(t > s)) return 0.0;
  return (std::pow(t, p + 1.0) - std::pow(s, p + 1.0)) / (p + 1.0);
}

// \int_c^d \int_a^b min(x, x')^p dx dx'.
double min_power_integral(double a, double b, double c, double d, double p) {
  double total = 0.0;
  // x' <= a: the inner integral is x'^p (b - a).
  total += (b - a) * power_integral(c, std::min(d, a), p);
  // a < x' < b: b x'^p - p/(p+1) x'^{p+1} - a^{p+1}/(p+1).
  const double s = std::max(c, a);
  const double t = std::min(d, b);
  if (t > s)
    total += b * power_integral(s, t, p) - p / (p + 1.0) * power_integral(s, t, p + 1.0) -
             std::pow(a, p + 1.0) / (p + 1.0) * (t - s);
  // x' >= b: constant (b^{p+1} - a^{p+1}) / (p+1).
  const double from = std::max(c, b);
  if (d > from) total += power_integral(a, b, p) * (d - from);
  return total;
}

}  // namespace

Eigen::MatrixXd ai_covariance_kernel(const TailFamily& family, const ThetaVector& theta,
                                     const WeightScheme& weights) {
  if (!family.product_form())
    fail(ErrorCode::UnsupportedFamily,
         std::string("plug-in covariance is only available for the inverted families, not ") +
             std::string(family.name()));
  const double px = theta[0];
  const double py = family.id() == FamilyId::InvertedHuslerReiss ? theta[0] : theta[1];
  const std::size_t q = weights.size();
  Eigen::MatrixXd a(q, q);
  for (std::size_t j = 0; j < q; ++j) {
    for (std::size_t l = 0; l <= j; ++l) {
      const Rectangle& rj = weights.rects()[j];
      const Rectangle& rl = weights.rects()[l];
      const double value = min_power_integral(rj.x_lo, rj.x_hi, rl.x_lo, rl.x_hi, px) *
                           min_power_integral(rj.y_lo, rj.y_hi, rl.y_lo, rl.y_hi, py) /
                           (weights.norms()[j] * weights.norms()[l]);
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = value;
      a(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = value;
    }
  }
  return a;
}

Eigen::MatrixXd plugin_covariance_ai(const TailFamily& family, const BivariateFit& fit,
                                     const WeightScheme& weights) {
  if (!family.product_form())
    fail(ErrorCode::UnsupportedFamily,
         std::string("plug-in covariance assumes asymptotic independence; unsupported for ") +
             std::string(family.name()));
  if (fit.m_used == 0) fail(ErrorCode::NoTailData, "plug-in covariance needs m > 0");
  const ThetaVector theta(family, fit.theta_hat);
  const Eigen::MatrixXd jac = moment_jacobian(family, fit.theta_hat, weights);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jtj);
  const double largest = eig.eigenvalues().maxCoeff();
  if (!(eig.eigenvalues().minCoeff() > 1e-10 * largest))
    fail(ErrorCode::SingularJacobian, "J'J is not invertible at relative tolerance 1e-10");
  const Eigen::MatrixXd jtj_inv = jtj.inverse();
  const Eigen::MatrixXd kernel = ai_covariance_kernel(family, theta, weights);
  Eigen::MatrixXd sigma = jtj_inv * jac.transpose() * kernel * jac * jtj_inv;
  sigma = 0.5 * (sigma + sigma.transpose());
  return sigma / static_cast<double>(fit.m_used);
}

}  // namespace tailfit
