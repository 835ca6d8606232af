#include "tailfit/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "tailfit/error.hpp"
#include "tailfit/geometry.hpp"

namespace tailfit {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -HUGE_VAL;
    if (p == 1.0) return HUGE_VAL;
    fail(ErrorCode::InvalidArgument, "normal_quantile: p outside [0,1]");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double rel_tol) {
  if (!(b > a)) return 0.0;
  using Integrator = boost::math::quadrature::gauss_kronrod<double, 15>;
  return Integrator::integrate(f, a, b, 15, rel_tol);
}

double integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                           double rel_tol) {
  if (!(b > a)) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b, rel_tol);
}

namespace {

// Breakpoints of [lo, hi] at the given interior points, sorted and unique.
template <std::size_t N>
int split_points(double lo, double hi, const double (&cuts)[N], double* out) {
  int count = 0;
  out[count++] = lo;
  for (double c : cuts)
    if (c > lo && c < hi) out[count++] = c;
  out[count++] = hi;
  std::sort(out, out + count);
  return static_cast<int>(std::unique(out, out + count) - out);
}

double integrate_split(const std::function<double(double, double)>& f,
                                const Rectangle& rect, double rel_tol) {
  const double inner_tol = rel_tol;
  auto inner = [&](double x) {
    // Split the y-range at the diagonal point y = x.
    double ys[3];
    const double cuts[] = {x};
    const int ny = split_points(rect.y_lo, rect.y_hi, cuts, ys);
    double total = 0.0;
    for (int i = 0; i + 1 < ny; ++i)
      total += integrate_1d([&](double y) { return f(x, y); }, ys[i], ys[i + 1], inner_tol);
    return total;
  };
  // The inner integral, as a function of x, changes form where the diagonal
  // enters and leaves the rectangle.
  double xs[4];
  const double cuts[] = {rect.y_lo, rect.y_hi};
  const int nx = split_points(rect.x_lo, rect.x_hi, cuts, xs);
  double total = 0.0;
  for (int i = 0; i + 1 < nx; ++i) total += integrate_1d(inner, xs[i], xs[i + 1], rel_tol);
  return total;
}

}  // namespace

double integrate_rectangle(const std::function<double(double, double)>& f,
                           const Rectangle& rect, double rel_tol) {
  rect.validate();
  if (rect.degenerate()) return 0.0;
  return integrate_split(f, rect, rel_tol);
}

void Rectangle::validate() const {
  const bool finite = std::isfinite(x_lo) && std::isfinite(x_hi) && std::isfinite(y_lo) &&
                      std::isfinite(y_hi);
  if (!finite || x_lo < 0.0 || y_lo < 0.0 || x_hi < x_lo || y_hi < y_lo)
    fail(ErrorCode::InvalidArgument,
         "rectangle [" + std::to_string(x_lo) + "," + std::to_string(x_hi) + "]x[" +
             std::to_string(y_lo) + "," + std::to_string(y_hi) + "] is not a valid box in [0,inf)^2");
}

}  // namespace tailfit
