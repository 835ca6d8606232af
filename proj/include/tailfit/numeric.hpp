#pragma once

#include <functional>

namespace tailfit {

struct Rectangle;

// Standard normal distribution function, via erfc so that both tails keep
// full relative precision.
double normal_cdf(double x) noexcept;
// 1 - normal_cdf(x) without cancellation.
double normal_sf(double x) noexcept;
double normal_pdf(double x) noexcept;
double normal_quantile(double p);

// Adaptive Gauss-Kronrod (7/15) on [a, b].
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double rel_tol);

// Tanh-sinh quadrature on [a, b]; copes with integrands that vary on very
// small scales near an endpoint.
double integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                           double rel_tol);
// Adaptive 2-D quadrature of f over a rectangle. The integration domain is
// split along the diagonal y = x, where min/max-type integrands have a kink.
double integrate_rectangle(const std::function<double(double, double)>& f,
                           const Rectangle& rect, double rel_tol);

}  // namespace tailfit
