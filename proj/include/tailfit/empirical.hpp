#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tailfit/geometry.hpp"
#include "tailfit/matrix.hpp"

namespace tailfit {

// Column-wise ranks of an n x d data matrix, rank n being the largest value.
// Ties are broken by order of occurrence and reported through tied_columns().
class RankedSample {
 public:
  // Throws NonFiniteInput on NaN/inf entries and InvalidArgument for n < 2.
  static RankedSample from_data(const Matrix& data);
  // Builds a sample from precomputed ranks (column-major: ranks[j][i]). Each
  // column must be a permutation of 1..n.
  static RankedSample from_ranks(std::vector<std::vector<std::uint32_t>> ranks);

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return ranks_.size(); }
  std::uint32_t rank(std::size_t i, std::size_t j) const { return ranks_[j][i]; }
  std::span<const std::uint32_t> column(std::size_t j) const { return ranks_[j]; }

  bool has_ties() const noexcept { return !tied_columns_.empty(); }
  std::span<const std::size_t> tied_columns() const noexcept { return tied_columns_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<std::uint32_t>> ranks_;
  std::vector<std::size_t> tied_columns_;
};

inline RankedSample rank_transform(const Matrix& data) { return RankedSample::from_data(data); }

struct PairIndex {
  std::size_t first = 0;
  std::size_t second = 1;
};

// Empirical tail function evaluated at (k x / n, k y / n):
//   (1/n) #{i : R_i1 >= n + 1 - floor(k x), R_i2 >= n + 1 - floor(k y)}.
double empirical_q(const RankedSample& sample, PairIndex pair, std::size_t k, double x, double y);

// Number of joint exceedances at level k, i.e. n * empirical_q(k, 1, 1).
std::size_t joint_exceedances(const RankedSample& sample, PairIndex pair, std::size_t k);

// Ratio estimator empirical_q(x, y) / empirical_q(1, 1). Throws
// ZeroDenominator when there is no joint exceedance at level k.
double tilde_c(const RankedSample& sample, PairIndex pair, std::size_t k, double x, double y);

struct TailIndexChoice {
  enum class Mode { FixedK, EffectiveM };

  Mode mode = Mode::FixedK;
  std::size_t requested = 0;   // k for FixedK, m for EffectiveM
  std::size_t resolved_k = 0;
  std::size_t resolved_m = 0;  // achieved joint exceedance count at resolved_k

  static TailIndexChoice fixed_k(std::size_t k) { return {Mode::FixedK, k, 0, 0}; }
  static TailIndexChoice effective_m(std::size_t m) { return {Mode::EffectiveM, m, 0, 0}; }
};

// Smallest k whose joint exceedance count reaches m. Throws Unreachable when
// even k = n falls short, and InvalidArgument for m = 0 or m > n.
TailIndexChoice select_khat(const RankedSample& sample, PairIndex pair, std::size_t m);

// Fills in resolved_k / resolved_m for either mode.
TailIndexChoice resolve(const RankedSample& sample, PairIndex pair, TailIndexChoice choice);

// Exact integral of (x, y) -> empirical_q(k, x, y) over a rectangle:
//   (1/n) sum_i (b - max(a, u_i))_+ (d - max(c, v_i))_+,
// with u_i = (n + 1 - R_i1) / k and v_i = (n + 1 - R_i2) / k.
double rect_integral_q(const RankedSample& sample, PairIndex pair, std::size_t k,
                       const Rectangle& rect);

}  // namespace tailfit
