#include "tailfit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "tailfit/error.hpp"
#include "tailfit/numeric.hpp"

namespace tailfit {
namespace {

constexpr std::uint64_t kNoiseKey = 0x6e6f697365ull;

// dC/du at (u, v) for C(u, v) = exp(-l(x, y)), x = -log u, y = -log v.
template <class Params>
double conditional_cdf(const Params& p, double u, double v) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  const double x = -std::log(u);
  const double y = -std::log(v);
  return std::exp(-eval_stdf(p, x, y)) * stdf_dx(p, x, y) / u;
}

template <class Params>
double invert_conditional(const Params& p, double u, double w) {
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double h = conditional_cdf(p, u, mid);
    if (!std::isfinite(h)) fail(ErrorCode::BisectionFailure, "conditional distribution is not finite");
    if (std::abs(h - w) < 1e-12) return mid;
    (h < w ? lo : hi) = mid;
  }
  const double mid = 0.5 * (lo + hi);
  // The loop only stops early at the resolution of doubles; check that the
  // bracket really straddles w.
  if (conditional_cdf(p, u, lo) > w + 1e-9 || conditional_cdf(p, u, hi) < w - 1e-9)
    fail(ErrorCode::BisectionFailure, "conditional distribution is not monotone");
  return mid;
}

template <class Params>
Matrix ev_copula(const Params& p, std::size_t n, CounterRng& rng) {
  Matrix out(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    const double w = rng.uniform_open();
    out(i, 0) = u;
    out(i, 1) = invert_conditional(p, u, w);
  }
  return out;
}

Matrix independent_uniforms(std::size_t n, CounterRng& rng) {
  Matrix out(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    out(i, 0) = rng.uniform_open();
    out(i, 1) = rng.uniform_open();
  }
  return out;
}

void add_noise(Matrix& data, const SimSpec& spec) {
  if (!spec.noise_alpha) return;
  CounterRng rng(spec.seed ^ kNoiseKey, spec.stream);
  for (std::size_t i = 0; i < data.rows(); ++i)
    for (std::size_t j = 0; j < data.cols(); ++j) data(i, j) += rng.pareto(*spec.noise_alpha);
}

// Frechet value of 1 - z, keeping precision for small z.
double inverted_frechet(double z) noexcept {
  const double clamped = std::clamp(z, 1e-16, 1.0 - 1e-300);
  return -1.0 / std::log1p(-clamped);
}

// Cholesky factors of Cov(W(a) - W(j), W(b) - W(j)) over a, b != j.
struct SpectralFactors {
  Eigen::MatrixXd gamma;
  std::vector<Eigen::MatrixXd> chol;
};

SpectralFactors spectral_factors(const Coordinates& coords, double alpha, double beta) {
  const std::size_t d = coords.size();
  SpectralFactors f;
  f.gamma.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      f.gamma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          fractal_variogram(coords.distance(a, b), alpha, beta);
  const auto m = static_cast<Eigen::Index>(d);
  for (Eigen::Index j = 0; j < m; ++j) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b)
        if (a != j && b != j) cov(a, b) = 0.5 * (f.gamma(a, j) + f.gamma(b, j) - f.gamma(a, b));
    for (Eigen::Index a = 0; a < m; ++a) cov(a, a) += (a == j) ? 1.0 : 1e-10;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      fail(ErrorCode::CholeskyFailure, "variogram matrix is not conditionally negative definite");
    Eigen::MatrixXd l = llt.matrixL();
    // Row and column j carry a unit placeholder; zero them so W(j) - W(j) = 0.
    l.row(j).setZero();
    l.col(j).setZero();
    f.chol.push_back(std::move(l));
  }
  return f;
}

// Spectral function anchored at j: exp(W(a) - W(j) - gamma(a, j) / 2).
void spectral_draw(const SpectralFactors& f, std::size_t j, CounterRng& rng, Eigen::VectorXd& g,
                   Eigen::VectorXd& y) {
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
  y.noalias() = f.chol[j].triangularView<Eigen::Lower>() * g;
  for (Eigen::Index a = 0; a < y.size(); ++a)
    y(a) = std::exp(y(a) - 0.5 * f.gamma(a, static_cast<Eigen::Index>(j)));
}

void extremal_functions_row(const SpectralFactors& f, CounterRng& rng, Eigen::VectorXd& g,
                            Eigen::VectorXd& y, std::span<double> z) {
  const std::size_t d = z.size();
  std::fill(z.begin(), z.end(), 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double e = rng.exponential();
    while (1.0 / e > z[j]) {
      const double zeta = 1.0 / e;
      spectral_draw(f, j, rng, g, y);
      bool fresh = true;
      for (std::size_t i = 0; i < j && fresh; ++i)
        if (zeta * y(static_cast<Eigen::Index>(i)) > z[i]) fresh = false;
      if (fresh)
        for (std::size_t a = 0; a < d; ++a) z[a] = std::max(z[a], zeta * y(static_cast<Eigen::Index>(a)));
      e += rng.exponential();
    }
  }
}

void normalized_spectral_row(const SpectralFactors& f, CounterRng& rng, std::size_t cap,
                             Eigen::VectorXd& g, Eigen::VectorXd& y, std::span<double> z) {
  const std::size_t d = z.size();
  const double bound = static_cast<double>(d);
  std::fill(z.begin(), z.end(), 0.0);
  double e = 0.0;
  for (std::size_t point = 0; point < cap; ++point) {
    e += rng.exponential();
    const double zeta = 1.0 / e;
    if (point > 0 && zeta * bound <= *std::min_element(z.begin(), z.end())) break;
    const auto j = static_cast<std::size_t>(rng() % d);
    spectral_draw(f, j, rng, g, y);
    const double scale = bound / y.sum();
    for (std::size_t a = 0; a < d; ++a)
      z[a] = std::max(z[a], zeta * scale * y(static_cast<Eigen::Index>(a)));
  }
}

}  // namespace

double Coordinates::distance(std::size_t a, std::size_t b) const {
  return std::hypot(x.at(a) - x.at(b), y.at(a) - y.at(b));
}

Coordinates random_layout(std::size_t d, double side, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  Coordinates c;
  for (std::size_t i = 0; i < d; ++i) {
    c.x.push_back(side * rng.uniform());
    c.y.push_back(side * rng.uniform());
  }
  return c;
}

double frechet_from_uniform(double u) noexcept {
  const double clamped = std::clamp(u, 1e-300, 1.0 - 1e-16);
  return -1.0 / std::log(clamped);
}

double fractal_variogram(double distance, double alpha, double beta) noexcept {
  return std::pow(distance / beta, alpha);
}

Matrix sample_ev_copula(const HuslerReissParams& p, std::size_t n, CounterRng& rng) {
  validate(p);
  if (p.infinite) return independent_uniforms(n, rng);
  return ev_copula(p, n, rng);
}

Matrix sample_ev_copula(const AsymLogisticParams& p, std::size_t n, CounterRng& rng) {
  validate(p);
  return ev_copula(p, n, rng);
}

Matrix sample_ev_copula(StdfKind kind, std::span<const double> params, std::size_t n,
                        CounterRng& rng) {
  if (kind == StdfKind::HuslerReiss) {
    if (params.size() != 1) fail(ErrorCode::InvalidArgument, "Husler-Reiss takes one parameter");
    if (std::isinf(params[0]) && params[0] > 0) return sample_ev_copula(HuslerReissParams::independence(), n, rng);
    return sample_ev_copula(HuslerReissParams{params[0]}, n, rng);
  }
  if (params.size() != 3) fail(ErrorCode::InvalidArgument, "asymmetric logistic takes (nu, phi, r)");
  return sample_ev_copula(AsymLogisticParams{params[0], params[1], params[2]}, n, rng);
}

void SimSpec::validate() const {
  if (n < 1) fail(ErrorCode::InvalidArgument, "sample size must be at least 1");
  if (noise_alpha && !(*noise_alpha > 0.0))
    fail(ErrorCode::ParamOutOfRange, "noise Pareto index must be positive");
  if (noise_alpha && margins == Margins::Uniform && model != SimModel::M3)
    fail(ErrorCode::InvalidArgument, "additive noise needs heavy-tailed (Frechet) margins");
  switch (model) {
    case SimModel::M1:
      if (!(theta > 0.5 && theta <= 1.0))
        fail(ErrorCode::ParamOutOfRange, "M1 needs theta in (1/2, 1]");
      break;
    case SimModel::M2: tailfit::validate(logistic); break;
    case SimModel::M3:
      if (!(lambda > 0.0) || !std::isfinite(lambda))
        fail(ErrorCode::ParamOutOfRange, "M3 needs lambda > 0");
      break;
    case SimModel::SpatialIBR: {
      if (coords.x.size() != coords.y.size() || coords.size() < 2)
        fail(ErrorCode::InvalidArgument, "spatial model needs at least two locations");
      if (coords.size() > 64) fail(ErrorCode::InvalidArgument, "at most 64 locations are supported");
      if (!(alpha > 0.0 && alpha <= 2.0) || !(beta > 0.0) || !std::isfinite(beta))
        fail(ErrorCode::ParamOutOfRange, "fractal variogram needs alpha in (0, 2] and beta > 0");
      for (std::size_t a = 0; a < coords.size(); ++a)
        for (std::size_t b = a + 1; b < coords.size(); ++b)
          if (!(coords.distance(a, b) > 0.0))
            fail(ErrorCode::InvalidArgument, "locations " + std::to_string(a + 1) + " and " +
                                                 std::to_string(b + 1) + " coincide");
      break;
    }
  }
}

Matrix sample_inverted(const SimSpec& spec) {
  spec.validate();
  CounterRng rng(spec.seed, spec.stream);
  Matrix z;
  if (spec.model == SimModel::M1) {
    const HuslerReissParams p = spec.theta >= 1.0 ? HuslerReissParams::independence()
                                                  : HuslerReissParams{normal_quantile(spec.theta)};
    z = sample_ev_copula(p, spec.n, rng);
  } else if (spec.model == SimModel::M2) {
    z = sample_ev_copula(spec.logistic, spec.n, rng);
  } else {
    fail(ErrorCode::InvalidArgument, "sample_inverted handles M1 and M2 only");
  }
  for (double& v : z.data())
    v = spec.margins == Margins::Frechet ? inverted_frechet(v) : 1.0 - v;
  add_noise(z, spec);
  return z;
}

Matrix sample_random_scale(const SimSpec& spec) {
  spec.validate();
  if (spec.model != SimModel::M3) fail(ErrorCode::InvalidArgument, "sample_random_scale handles M3 only");
  CounterRng rng(spec.seed, spec.stream);
  Matrix out(spec.n, 2);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double r = rng.pareto(spec.lambda);
    out(i, 0) = r * rng.pareto(1.0);
    out(i, 1) = r * rng.pareto(1.0);
  }
  add_noise(out, spec);
  return out;
}

Matrix sample_brown_resnick(const Coordinates& coords, double alpha, double beta, std::size_t n,
                            CounterRng& rng, SpatialAlgorithm algorithm, std::size_t spectral_cap) {
  const std::size_t d = coords.size();
  const SpectralFactors factors = spectral_factors(coords, alpha, beta);
  Matrix out(n, d);
  Eigen::VectorXd g(static_cast<Eigen::Index>(d)), y(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    if (algorithm == SpatialAlgorithm::ExtremalFunctions)
      extremal_functions_row(factors, rng, g, y, out.row(i));
    else
      normalized_spectral_row(factors, rng, spectral_cap, g, y, out.row(i));
  }
  return out;
}

Matrix sample_inverted_brown_resnick(const SimSpec& spec) {
  spec.validate();
  if (spec.model != SimModel::SpatialIBR)
    fail(ErrorCode::InvalidArgument, "sample_inverted_brown_resnick handles SpatialIBR only");
  CounterRng rng(spec.seed, spec.stream);
  Matrix z = sample_brown_resnick(spec.coords, spec.alpha, spec.beta, spec.n, rng, spec.algorithm,
                                  spec.spectral_cap);
  for (double& v : z.data()) {
    // The max-stable margin is exp(-1/v) on the uniform scale, so the
    // inverted value is 1 - exp(-1/v); its logarithm is formed without
    // rounding 1 - exp(-t) to 1.
    const double t = 1.0 / v;
    if (spec.margins == Margins::Uniform) {
      v = -std::expm1(-t);
    } else {
      const double log_inverted = t > 1.0 ? std::log1p(-std::exp(-t)) : std::log(-std::expm1(-t));
      v = -1.0 / std::min(log_inverted, -1e-300);
    }
  }
  add_noise(z, spec);
  return z;
}

Matrix simulate(const SimSpec& spec) {
  switch (spec.model) {
    case SimModel::M1:
    case SimModel::M2: return sample_inverted(spec);
    case SimModel::M3: return sample_random_scale(spec);
    case SimModel::SpatialIBR: return sample_inverted_brown_resnick(spec);
  }
  fail(ErrorCode::InvalidArgument, "unknown model");
}

}  // namespace tailfit
