#include "tailfit/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tailfit/error.hpp"
#include "tailfit/numeric.hpp"

namespace tailfit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadratureTol = 1e-9;

// Finite caps for the unbounded coordinates of the search boxes.
constexpr double kRandomScaleSearchMax = 2.0;
constexpr double kHuslerReissSearchMax = 10.0;
constexpr double kLogisticRSearchMax = 20.0;

constexpr ParamBound kIhrBounds[] = {{0.5, 1.0, true, false}};
constexpr ParamBound kIalBounds[] = {{0.0, 1.0, true, false}, {0.0, 1.0, true, false}};
constexpr ParamBound kRsBounds[] = {{0.0, kInf, true, true}};
constexpr ParamBound kHrAdBounds[] = {{0.0, kInf, true, true}};
constexpr ParamBound kAlAdBounds[] = {
    {0.0, 1.0, true, false}, {0.0, 1.0, true, false}, {1.0, kInf, true, true}};

std::string describe(const TailFamily& family, std::span<const double> theta) {
  std::ostringstream os;
  os << family.name() << " parameter (";
  for (std::size_t i = 0; i < theta.size(); ++i) os << (i ? ", " : "") << theta[i];
  os << ") outside the parameter space";
  return os.str();
}

// \int_a^b t^p dt for p > -1.
double power_integral(double a, double b, double p) {
  return (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
}

double random_scale_c(double lambda, double x, double y) {
  const double mu = std::min(x, y);
  const double big = std::max(x, y);
  if (mu <= 0.0) return 0.0;
  if (lambda < 1.0) {
    const double s = 1.0 / lambda;
    return ((2.0 - lambda) * mu - lambda * std::pow(mu, s) * std::pow(big, 1.0 - s)) /
           (2.0 * (1.0 - lambda));
  }
  if (lambda == 1.0) return mu * (1.0 + 0.5 * std::log(big / mu));
  if (lambda < 2.0) {
    return (lambda * mu * std::pow(big, lambda - 1.0) - (2.0 - lambda) * std::pow(mu, lambda)) /
           (2.0 * (lambda - 1.0));
  }
  return mu * big;
}

// x + y - l(x, y) for Husler-Reiss, written with upper tail probabilities to
// avoid cancellation when l is close to x + y.
double husler_reiss_excess(double lambda, double x, double y) {
  if (x <= 0.0 || y <= 0.0) return 0.0;
  const double log_ratio = std::log(x / y) / (2.0 * lambda);
  return x * normal_sf(lambda + log_ratio) + y * normal_sf(lambda - log_ratio);
}

// (nu^r x^r + phi^r y^r)^{1/r}, scaled to avoid overflow.
double logistic_norm(double nu, double phi, double r, double x, double y) {
  const double a = nu * x;
  const double b = phi * y;
  const double top = std::max(a, b);
  if (top <= 0.0) return 0.0;
  return top * std::pow(std::pow(a / top, r) + std::pow(b / top, r), 1.0 / r);
}

// nu x + phi y - (nu^r x^r + phi^r y^r)^{1/r}. With q = small / top this is
// small - top ((1 + q^r)^{1/r} - 1), evaluated without cancellation.
double logistic_excess(double nu, double phi, double r, double x, double y) {
  const double a = nu * x;
  const double b = phi * y;
  const double top = std::max(a, b);
  const double small = std::min(a, b);
  if (small <= 0.0) return 0.0;
  const double q = small / top;
  return small - top * std::expm1(std::log1p(std::pow(q, r)) / r);
}

double asym_logistic_chi(double nu, double phi, double r) {
  return logistic_excess(nu, phi, r, 1.0, 1.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// TailFamily

TailFamily TailFamily::from_name(std::string_view name) {
  if (name == "ihr" || name == "inverted-husler-reiss") return TailFamily(FamilyId::InvertedHuslerReiss);
  if (name == "ial" || name == "inverted-asym-logistic") return TailFamily(FamilyId::InvertedAsymLogistic);
  if (name == "rs" || name == "random-scale") return TailFamily(FamilyId::RandomScale);
  if (name == "hr-ad" || name == "husler-reiss-ad") return TailFamily(FamilyId::HuslerReissAD);
  if (name == "al-ad" || name == "asym-logistic-ad") return TailFamily(FamilyId::AsymLogisticAD);
  fail(ErrorCode::InvalidArgument, "unknown tail family '" + std::string(name) + "'");
}

std::string_view TailFamily::name() const noexcept {
  switch (id_) {
    case FamilyId::InvertedHuslerReiss: return "inverted-husler-reiss";
    case FamilyId::InvertedAsymLogistic: return "inverted-asym-logistic";
    case FamilyId::RandomScale: return "random-scale";
    case FamilyId::HuslerReissAD: return "husler-reiss-ad";
    case FamilyId::AsymLogisticAD: return "asym-logistic-ad";
  }
  return "unknown";
}

std::span<const ParamBound> TailFamily::bounds() const noexcept {
  switch (id_) {
    case FamilyId::InvertedHuslerReiss: return kIhrBounds;
    case FamilyId::InvertedAsymLogistic: return kIalBounds;
    case FamilyId::RandomScale: return kRsBounds;
    case FamilyId::HuslerReissAD: return kHrAdBounds;
    case FamilyId::AsymLogisticAD: return kAlAdBounds;
  }
  return {};
}

std::size_t TailFamily::dimension() const noexcept { return bounds().size(); }

bool TailFamily::contains(std::span<const double> theta) const noexcept {
  const auto b = bounds();
  if (theta.size() != b.size()) return false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double t = theta[i];
    if (!std::isfinite(t)) return false;
    if (b[i].lo_open ? !(t > b[i].lo) : !(t >= b[i].lo)) return false;
    if (b[i].hi_open ? !(t < b[i].hi) : !(t <= b[i].hi)) return false;
  }
  if (has_sum_constraint() && !(theta[0] + theta[1] > 1.0)) return false;
  return true;
}

SearchBox TailFamily::search_box() const {
  SearchBox box;
  for (const auto& b : bounds()) {
    box.lo.push_back(b.lo_open ? b.lo + kThetaMargin : b.lo);
    box.hi.push_back(b.hi_open ? b.hi - kThetaMargin : b.hi);
  }
  switch (id_) {
    case FamilyId::RandomScale: box.hi[0] = kRandomScaleSearchMax; break;
    case FamilyId::HuslerReissAD: box.hi[0] = kHuslerReissSearchMax; break;
    case FamilyId::AsymLogisticAD: box.hi[2] = kLogisticRSearchMax; break;
    default: break;
  }
  return box;
}

std::vector<double> TailFamily::project(std::span<const double> theta) const {
  const SearchBox box = search_box();
  std::vector<double> out(theta.begin(), theta.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], box.lo[i], box.hi[i]);
  if (has_sum_constraint()) {
    const double deficit = 1.0 + kThetaMargin - (out[0] + out[1]);
    if (deficit > 0.0) {
      // Move onto the constraint line; both coordinates are at most 1, so
      // the shifted point stays in the box after clamping the other one.
      out[0] += 0.5 * deficit;
      out[1] += 0.5 * deficit;
      if (out[0] > box.hi[0]) {
        out[1] += out[0] - box.hi[0];
        out[0] = box.hi[0];
      }
      if (out[1] > box.hi[1]) {
        out[0] += out[1] - box.hi[1];
        out[1] = box.hi[1];
      }
    }
  }
  return out;
}

ThetaVector TailFamily::default_reference() const {
  switch (id_) {
    case FamilyId::InvertedHuslerReiss: return ThetaVector(*this, {0.6});
    case FamilyId::InvertedAsymLogistic: return ThetaVector(*this, {0.6, 0.6});
    case FamilyId::RandomScale: return ThetaVector(*this, {1.0});
    case FamilyId::HuslerReissAD: return ThetaVector(*this, {1.0});
    case FamilyId::AsymLogisticAD: return ThetaVector(*this, {0.5, 0.5, 2.0});
  }
  fail(ErrorCode::InvalidArgument, "unknown family");
}

ThetaVector::ThetaVector(const TailFamily& family, std::span<const double> values)
    : family_(family.id()), size_(values.size()) {
  if (values.size() != family.dimension() || !family.contains(values))
    fail(ErrorCode::ThetaOutOfDomain, describe(family, values));
  std::copy(values.begin(), values.end(), values_.begin());
}

// ---------------------------------------------------------------------------
// c, eta, chi

namespace {

void check_family(const TailFamily& family, const ThetaVector& theta) {
  if (theta.family() != family.id())
    fail(ErrorCode::InvalidArgument, "parameter vector belongs to a different family");
}

}  // namespace

double eval_c(const TailFamily& family, const ThetaVector& theta, double x, double y) {
  check_family(family, theta);
  if (!(x >= 0.0) || !(y >= 0.0))
    fail(ErrorCode::InvalidArgument, "c is defined on [0,inf)^2");
  switch (family.id()) {
    case FamilyId::InvertedHuslerReiss:
      return std::pow(x * y, theta[0]);
    case FamilyId::InvertedAsymLogistic:
      return std::pow(x, theta[0]) * std::pow(y, theta[1]);
    case FamilyId::RandomScale:
      return random_scale_c(theta[0], x, y);
    case FamilyId::HuslerReissAD:
      return husler_reiss_excess(theta[0], x, y) / (2.0 * normal_sf(theta[0]));
    case FamilyId::AsymLogisticAD: {
      const double nu = theta[0], phi = theta[1], r = theta[2];
      return logistic_excess(nu, phi, r, x, y) / asym_logistic_chi(nu, phi, r);
    }
  }
  return 0.0;
}

double eta_of(const TailFamily& family, const ThetaVector& theta) {
  check_family(family, theta);
  switch (family.id()) {
    case FamilyId::InvertedHuslerReiss: return 1.0 / (2.0 * theta[0]);
    case FamilyId::InvertedAsymLogistic: return 1.0 / (theta[0] + theta[1]);
    case FamilyId::RandomScale: {
      const double lambda = theta[0];
      if (lambda <= 1.0) return 1.0;
      if (lambda < 2.0) return 1.0 / lambda;
      return 0.5;
    }
    case FamilyId::HuslerReissAD:
    case FamilyId::AsymLogisticAD: return 1.0;
  }
  return 1.0;
}

ChiValue chi_of(const TailFamily& family, const ThetaVector& theta) {
  check_family(family, theta);
  switch (family.id()) {
    case FamilyId::InvertedHuslerReiss:
    case FamilyId::InvertedAsymLogistic: return {0.0, false};
    case FamilyId::RandomScale:
      if (theta[0] < 1.0) return {random_scale_constant(theta[0]), true};
      return {0.0, false};
    case FamilyId::HuslerReissAD: return {2.0 * normal_sf(theta[0]), true};
    case FamilyId::AsymLogisticAD:
      return {asym_logistic_chi(theta[0], theta[1], theta[2]), true};
  }
  return {0.0, false};
}

std::vector<double> canonical_theta(const TailFamily& family, std::span<const double> theta) {
  std::vector<double> out(theta.begin(), theta.end());
  if (family.id() == FamilyId::AsymLogisticAD && out.size() == 3) {
    const double scale = std::max(out[0], out[1]);
    if (scale > 0.0) {
      out[0] = std::min(out[0] / scale, 1.0);
      out[1] = std::min(out[1] / scale, 1.0);
    }
  }
  return out;
}

double random_scale_constant(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    fail(ErrorCode::ParamOutOfRange, "K_lambda requires lambda > 0");
  if (lambda < 1.0) return 2.0 * (1.0 - lambda) / (2.0 - lambda);
  if (lambda == 1.0) return 2.0;
  if (lambda < 2.0)
    return std::pow(1.0 - 1.0 / lambda, lambda - 1.0) * 2.0 * (lambda - 1.0) /
           (lambda * (2.0 - lambda));
  if (lambda == 2.0) return 0.5;
  const double a = 1.0 - 1.0 / lambda;
  return a * a / (1.0 - 2.0 / lambda);
}

double rect_integral_c_quadrature(const TailFamily& family, const ThetaVector& theta,
                                  const Rectangle& rect) {
  check_family(family, theta);
  rect.validate();
  if (rect.degenerate()) return 0.0;
  return integrate_rectangle([&](double x, double y) { return eval_c(family, theta, x, y); },
                             rect, kQuadratureTol);
}

namespace {

// Integral of t^e over [a, b].
double power_segment(double e, double a, double b) {
  if (e == -1.0) return std::log(b / a);
  return (std::pow(b, e + 1.0) - std::pow(a, e + 1.0)) / (e + 1.0);
}

// Integral of c(1, t) over [a, b] for the random scale model, where c(1, t)
// is a combination of powers of t (and t log t at lambda = 1) on either side
// of t = 1.
double random_scale_segment(double lambda, double a, double b) {
  if (a >= b) return 0.0;
  if (a < 1.0 && b > 1.0) return random_scale_segment(lambda, a, 1.0) + random_scale_segment(lambda, 1.0, b);
  const bool below = b <= 1.0;
  if (lambda >= 2.0) return power_segment(1.0, a, b);
  if (lambda == 1.0) {
    // t (1 - log(t) / 2) below the diagonal, 1 + log(t) / 2 above.
    auto lower = [](double t) { return t <= 0.0 ? 0.0 : 0.5 * t * t - 0.25 * t * t * std::log(t) + 0.125 * t * t; };
    auto upper = [](double t) { return t + 0.5 * (t * std::log(t) - t); };
    return below ? lower(b) - lower(a) : upper(b) - upper(a);
  }
  if (lambda < 1.0) {
    const double s = 1.0 / lambda, denom = 2.0 * (1.0 - lambda);
    if (below) return ((2.0 - lambda) * power_segment(1.0, a, b) - lambda * power_segment(s, a, b)) / denom;
    return ((2.0 - lambda) * (b - a) - lambda * power_segment(1.0 - s, a, b)) / denom;
  }
  const double denom = 2.0 * (lambda - 1.0);
  if (below) return (lambda * power_segment(1.0, a, b) - (2.0 - lambda) * power_segment(lambda, a, b)) / denom;
  return (lambda * power_segment(lambda - 1.0, a, b) - (2.0 - lambda) * (b - a)) / denom;
}

// Integral of c(1, t) over [0, upper].
double ray_integral(const TailFamily& family, const ThetaVector& theta, double upper, bool swap) {
  if (family.id() == FamilyId::RandomScale) return random_scale_segment(theta[0], 0.0, upper);
  auto g = [&](double t) { return swap ? eval_c(family, theta, t, 1.0) : eval_c(family, theta, 1.0, t); };
  // The asymmetric logistic excess is smooth but changes scale where
  // nu x = phi y; split there unless the split point is close to an end.
  if (family.id() == FamilyId::AsymLogisticAD) {
    const double scale = swap ? theta[1] / theta[0] : theta[0] / theta[1];
    if (scale < (1.0 - 1e-3) * upper)
      return integrate_tanh_sinh(g, 0.0, scale, kQuadratureTol) +
             integrate_tanh_sinh(g, scale, upper, kQuadratureTol);
  }
  return integrate_tanh_sinh(g, 0.0, upper, kQuadratureTol);
}

// Integral of c over [0, X] x [0, Y]. With p the homogeneity order and s = Y/X,
// substituting y = t x below the ray and x = w y above it gives
//   X^(p+2) / (p+2) * ( int_0^s c(1,t) dt + s^(p+2) int_0^(1/s) c(w,1) dw ).
double corner_integral(const TailFamily& family, const ThetaVector& theta, double p, double x_max,
                       double y_max) {
  if (x_max <= 0.0 || y_max <= 0.0) return 0.0;
  const double s = y_max / x_max;
  const double below = ray_integral(family, theta, s, false);
  const double above = ray_integral(family, theta, 1.0 / s, true);
  return std::pow(x_max, p + 2.0) / (p + 2.0) * (below + std::pow(s, p + 2.0) * above);
}

}  // namespace

double rect_integral_c(const TailFamily& family, const ThetaVector& theta, const Rectangle& rect) {
  check_family(family, theta);
  rect.validate();
  if (rect.degenerate()) return 0.0;
  switch (family.id()) {
    case FamilyId::InvertedHuslerReiss:
      return power_integral(rect.x_lo, rect.x_hi, theta[0]) *
             power_integral(rect.y_lo, rect.y_hi, theta[0]);
    case FamilyId::InvertedAsymLogistic:
      return power_integral(rect.x_lo, rect.x_hi, theta[0]) *
             power_integral(rect.y_lo, rect.y_hi, theta[1]);
    default: {
      const double p = 1.0 / eta_of(family, theta);
      auto corner = [&](double x, double y) { return corner_integral(family, theta, p, x, y); };
      return corner(rect.x_hi, rect.y_hi) - corner(rect.x_lo, rect.y_hi) -
             corner(rect.x_hi, rect.y_lo) + corner(rect.x_lo, rect.y_lo);
    }
  }
}

// ---------------------------------------------------------------------------
// Stable tail dependence functions

void validate(const HuslerReissParams& p) {
  if (!p.infinite && !(p.lambda >= 0.0 && std::isfinite(p.lambda)))
    fail(ErrorCode::ParamOutOfRange, "Husler-Reiss lambda must lie in [0, inf]");
}

void validate(const AsymLogisticParams& p) {
  if (!(p.nu >= 0.0 && p.nu <= 1.0 && p.phi >= 0.0 && p.phi <= 1.0 && p.r >= 1.0 &&
        std::isfinite(p.r)))
    fail(ErrorCode::ParamOutOfRange, "asymmetric logistic requires nu, phi in [0,1] and r >= 1");
}

namespace {

void check_args(double x, double y) {
  if (!(x >= 0.0) || !(y >= 0.0) || !std::isfinite(x) || !std::isfinite(y))
    fail(ErrorCode::InvalidArgument, "stable tail dependence function is defined on [0,inf)^2");
}

}  // namespace

double eval_stdf(const HuslerReissParams& p, double x, double y) {
  validate(p);
  check_args(x, y);
  if (p.infinite) return x + y;
  if (x == 0.0) return y;
  if (y == 0.0) return x;
  if (p.lambda == 0.0) return std::max(x, y);
  const double log_ratio = std::log(x / y) / (2.0 * p.lambda);
  return x * normal_cdf(p.lambda + log_ratio) + y * normal_cdf(p.lambda - log_ratio);
}

double eval_stdf(const AsymLogisticParams& p, double x, double y) {
  validate(p);
  check_args(x, y);
  return (1.0 - p.nu) * x + (1.0 - p.phi) * y + logistic_norm(p.nu, p.phi, p.r, x, y);
}

double eval_stdf(StdfKind kind, std::span<const double> params, double x, double y) {
  switch (kind) {
    case StdfKind::HuslerReiss:
      if (params.size() != 1) fail(ErrorCode::ParamOutOfRange, "Husler-Reiss takes one parameter");
      if (std::isinf(params[0]) && params[0] > 0) return eval_stdf(HuslerReissParams::independence(), x, y);
      return eval_stdf(HuslerReissParams{params[0], false}, x, y);
    case StdfKind::AsymLogistic:
      if (params.size() != 3)
        fail(ErrorCode::ParamOutOfRange, "asymmetric logistic takes (nu, phi, r)");
      return eval_stdf(AsymLogisticParams{params[0], params[1], params[2]}, x, y);
  }
  return 0.0;
}

double stdf_dx(const HuslerReissParams& p, double x, double y) {
  validate(p);
  check_args(x, y);
  if (p.infinite || y == 0.0) return 1.0;
  if (x == 0.0) return 0.0;
  if (p.lambda == 0.0) return x > y ? 1.0 : (x < y ? 0.0 : 0.5);
  return normal_cdf(p.lambda + std::log(x / y) / (2.0 * p.lambda));
}

double stdf_dx(const AsymLogisticParams& p, double x, double y) {
  validate(p);
  check_args(x, y);
  const double norm = logistic_norm(p.nu, p.phi, p.r, x, y);
  if (norm <= 0.0) return 1.0 - p.nu + (p.phi * y == 0.0 ? p.nu : 0.0);
  return (1.0 - p.nu) + p.nu * std::pow(p.nu * x / norm, p.r - 1.0);
}

std::array<double, 2> inverted_asym_logistic_theta(const AsymLogisticParams& p) {
  validate(p);
  const double nr = std::pow(p.nu, p.r);
  const double pr = std::pow(p.phi, p.r);
  const double s = std::pow(nr + pr, 1.0 / p.r - 1.0);
  return {1.0 - p.nu + nr * s, 1.0 - p.phi + pr * s};
}

}  // namespace tailfit
