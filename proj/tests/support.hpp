// Helpers shared by the unit and acceptance suites: parameter generators,
// goodness-of-fit statistics and simple summaries. Everything here is written
// independently of the library code it is used to check.
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "tailfit/empirical.hpp"
#include "tailfit/families.hpp"
#include "tailfit/matrix.hpp"
#include "tailfit/rng.hpp"

namespace tailfit::testing {

inline double uniform_in(CounterRng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform();
}

// Interior parameter values away from numerically delicate corners.
inline std::vector<double> random_interior_theta(const TailFamily& family, CounterRng& rng) {
  switch (family.id()) {
    case FamilyId::InvertedHuslerReiss: return {uniform_in(rng, 0.52, 0.98)};
    case FamilyId::InvertedAsymLogistic:
      while (true) {
        const double a = uniform_in(rng, 0.1, 0.98), b = uniform_in(rng, 0.1, 0.98);
        if (a + b > 1.05) return {a, b};
      }
    case FamilyId::RandomScale: return {uniform_in(rng, 0.1, 1.9)};
    case FamilyId::HuslerReissAD: return {uniform_in(rng, 0.1, 2.5)};
    case FamilyId::AsymLogisticAD:
      return {uniform_in(rng, 0.2, 1.0), uniform_in(rng, 0.2, 1.0), uniform_in(rng, 1.3, 5.0)};
  }
  return {};
}

inline const std::vector<TailFamily>& all_families() {
  static const std::vector<TailFamily> families = {
      TailFamily(FamilyId::InvertedHuslerReiss), TailFamily(FamilyId::InvertedAsymLogistic),
      TailFamily(FamilyId::RandomScale), TailFamily(FamilyId::HuslerReissAD),
      TailFamily(FamilyId::AsymLogisticAD)};
  return families;
}

// Asymptotic Kolmogorov distribution: P(sqrt(n) D > t).
inline double kolmogorov_pvalue(double t) {
  if (t < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// One-sample KS test of uniformity on (0,1); returns the p-value.
inline double ks_uniform_pvalue(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - x[i]);
    d = std::max(d, x[i] - static_cast<double>(i) / n);
  }
  const double sn = std::sqrt(n);
  return kolmogorov_pvalue((sn + 0.12 + 0.11 / sn) * d);
}

// Two-sample KS test; returns the p-value.
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return kolmogorov_pvalue((ne + 0.12 + 0.11 / ne) * d);
}

// F-madogram estimate of the extremal coefficient of a pair with uniform
// margins: nu = E|U - V| / 2, theta = (1 + 2 nu) / (1 - 2 nu).
inline double madogram_extremal_coefficient(const std::vector<double>& u,
                                            const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::abs(u[i] - v[i]);
  const double nu = 0.5 * s / static_cast<double>(u.size());
  return (1.0 + 2.0 * nu) / (1.0 - 2.0 * nu);
}

inline double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double sample_sd(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

// Linear-interpolation quantile (type 7).
inline double quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

// Kendall's tau for samples without ties: sort by x, then count inversions
// of y by merge sort.
inline double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> v(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = y[order[i]];
  long long inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, out = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          inversions += static_cast<long long>(mid - i);
          buf[out++] = v[j++];
        } else {
          buf[out++] = v[i++];
        }
      }
      while (i < mid) buf[out++] = v[i++];
      while (j < hi) buf[out++] = v[j++];
    }
    v.swap(buf);
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return 1.0 - 2.0 * static_cast<double>(inversions) / pairs;
}

// Standard error of Kendall's tau under independence.
inline double kendall_tau_null_sd(std::size_t n) {
  const double m = static_cast<double>(n);
  return std::sqrt(2.0 * (2.0 * m + 5.0) / (9.0 * m * (m - 1.0)));
}

// Spearman correlation for samples without ties.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = static_cast<double>(i);
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double m = 0.5 * (static_cast<double>(x.size()) - 1.0);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - m) * (ry[i] - m);
    sxx += (rx[i] - m) * (rx[i] - m);
  }
  return sxy / sxx;
}

// Hill estimator of the tail index 1/gamma from the k largest values.
inline double hill_tail_index(std::vector<double> x, std::size_t k) {
  std::sort(x.begin(), x.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::log(x[i] / x[k]);
  return static_cast<double>(k) / s;
}

inline Matrix correlated_normals(std::size_t n, std::size_t d, CounterRng& rng) {
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double common = rng.normal();
    for (std::size_t j = 0; j < d; ++j) m(i, j) = common + rng.normal();
  }
  return m;
}

// Midpoint-rule integral of the empirical tail function on a g x g grid. The
// count at (x, y) is #{i : u_i <= x, v_i <= y}, evaluated with bitmasks
// (n <= 64).
inline double riemann_oracle(const RankedSample& s, std::size_t k, const Rectangle& r, int g) {
  const std::size_t n = s.n();
  const double dx = (r.x_hi - r.x_lo) / g, dy = (r.y_hi - r.y_lo) / g;
  std::vector<std::uint64_t> mx(g), my(g);
  for (int a = 0; a < g; ++a) {
    const double x = r.x_lo + (a + 0.5) * dx, y = r.y_lo + (a + 0.5) * dy;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::floor(k * x) >= static_cast<double>(n + 1 - s.rank(i, 0))) mx[a] |= 1ull << i;
      if (std::floor(k * y) >= static_cast<double>(n + 1 - s.rank(i, 1))) my[a] |= 1ull << i;
    }
  }
  std::uint64_t total = 0;
  for (int a = 0; a < g; ++a)
    for (int b = 0; b < g; ++b) total += static_cast<unsigned>(std::popcount(mx[a] & my[b]));
  return static_cast<double>(total) * dx * dy / static_cast<double>(n);
}

}  // namespace tailfit::testing
