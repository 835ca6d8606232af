#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tailfit/geometry.hpp"

namespace tailfit {

// Margin kept between optimizer iterates and open boundaries of a parameter
// space.
inline constexpr double kThetaMargin = 1e-8;

enum class FamilyId {
  InvertedHuslerReiss,   // c = (xy)^theta, theta in (1/2, 1]
  InvertedAsymLogistic,  // c = x^theta1 y^theta2, theta in (0,1]^2, theta1 + theta2 > 1
  RandomScale,           // Pareto random scale construction, lambda = alpha_R / alpha_W
  HuslerReissAD,         // c = (x + y - l(x,y)) / chi, Husler-Reiss l
  AsymLogisticAD,        // same, asymmetric logistic l with (nu, phi, r)
};

struct ParamBound {
  double lo;
  double hi;
  bool lo_open;
  bool hi_open;
};

// Closed box the optimizers search in; open ends are pulled in by
// kThetaMargin and unbounded ends are capped.
struct SearchBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

class ThetaVector;

// A parametric family of survival tail functions c_theta.
class TailFamily {
 public:
  explicit TailFamily(FamilyId id) noexcept : id_(id) {}

  // Accepts the long names ("inverted-husler-reiss") and the short ones
  // ("ihr", "ial", "rs", "hr-ad", "al-ad").
  static TailFamily from_name(std::string_view name);

  FamilyId id() const noexcept { return id_; }
  std::string_view name() const noexcept;
  std::size_t dimension() const noexcept;
  std::span<const ParamBound> bounds() const noexcept;
  // InvertedAsymLogistic additionally requires theta1 + theta2 > 1.
  bool has_sum_constraint() const noexcept { return id_ == FamilyId::InvertedAsymLogistic; }
  bool product_form() const noexcept {
    return id_ == FamilyId::InvertedHuslerReiss || id_ == FamilyId::InvertedAsymLogistic;
  }
  bool asymptotically_dependent_family() const noexcept {
    return id_ == FamilyId::HuslerReissAD || id_ == FamilyId::AsymLogisticAD;
  }

  bool contains(std::span<const double> theta) const noexcept;
  SearchBox search_box() const;
  // Nearest point of the search box that also satisfies the sum constraint.
  std::vector<double> project(std::span<const double> theta) const;
  // Reference point of the default weight scheme.
  ThetaVector default_reference() const;

  friend bool operator==(const TailFamily&, const TailFamily&) = default;

 private:
  FamilyId id_;
};

// Parameter vector of a family; construction validates membership in the
// family's parameter space.
class ThetaVector {
 public:
  static constexpr std::size_t kMaxDim = 3;

  ThetaVector(const TailFamily& family, std::span<const double> values);
  ThetaVector(const TailFamily& family, std::initializer_list<double> values)
      : ThetaVector(family, std::span<const double>(values.begin(), values.size())) {}

  FamilyId family() const noexcept { return family_; }
  std::size_t size() const noexcept { return size_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return {values_.data(), size_}; }
  std::vector<double> to_vector() const { return {values_.begin(), values_.begin() + size_}; }

  friend bool operator==(const ThetaVector&, const ThetaVector&) = default;

 private:
  FamilyId family_;
  std::array<double, kMaxDim> values_{};
  std::size_t size_ = 0;
};

double eval_c(const TailFamily& family, const ThetaVector& theta, double x, double y);

// Residual tail dependence coefficient: c_theta is homogeneous of order 1/eta.
double eta_of(const TailFamily& family, const ThetaVector& theta);

struct ChiValue {
  double value;
  bool positive;
};

// Extremal dependence coefficient lim q(t)/t. For RandomScale with lambda < 1
// this is the scaling constant K_lambda.
ChiValue chi_of(const TailFamily& family, const ThetaVector& theta);

// Integral of c_theta over a rectangle: closed form for the product families,
// one-dimensional quadrature
// (relative tolerance 1e-9) otherwise, using homogeneity of c.
double rect_integral_c(const TailFamily& family, const ThetaVector& theta, const Rectangle& rect);

// Always uses the adaptive quadrature path.
double rect_integral_c_quadrature(const TailFamily& family, const ThetaVector& theta,
                                  const Rectangle& rect);

// Representative of theta's equivalence class of identical tail functions.
// For AsymLogisticAD, x + y - l(x, y) depends on (nu, phi) only through
// (nu x, phi y) and is 1-homogeneous, so c is unchanged when nu and phi are
// scaled together; the representative has max(nu, phi) = 1. Other families
// are returned unchanged.
std::vector<double> canonical_theta(const TailFamily& family, std::span<const double> theta);

// Multiplicative constant K_lambda of the random scale scaling function.
double random_scale_constant(double lambda);

// ---------------------------------------------------------------------------
// Stable tail dependence functions.

struct HuslerReissParams {
  double lambda = 1.0;
  bool infinite = false;  // lambda = +inf, exact independence

  static HuslerReissParams independence() noexcept { return {0.0, true}; }
};

struct AsymLogisticParams {
  double nu = 1.0;
  double phi = 1.0;
  double r = 2.0;
};

enum class StdfKind { HuslerReiss, AsymLogistic };

double eval_stdf(const HuslerReissParams& p, double x, double y);
double eval_stdf(const AsymLogisticParams& p, double x, double y);
// Generic entry point: params = {lambda} (lambda = +inf allowed) or
// {nu, phi, r}.
double eval_stdf(StdfKind kind, std::span<const double> params, double x, double y);

// Partial derivative of l with respect to its first argument.
double stdf_dx(const HuslerReissParams& p, double x, double y);
double stdf_dx(const AsymLogisticParams& p, double x, double y);

void validate(const HuslerReissParams& p);
void validate(const AsymLogisticParams& p);

// (theta1, theta2) of the inverted asymmetric logistic model: the right
// partial derivatives of l at (1, 1).
std::array<double, 2> inverted_asym_logistic_theta(const AsymLogisticParams& p);

}  // namespace tailfit
