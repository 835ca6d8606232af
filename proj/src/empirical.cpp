#include "tailfit/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tailfit/error.hpp"

namespace tailfit {
namespace {

void check_pair(const RankedSample& sample, PairIndex pair) {
  if (pair.first >= sample.d() || pair.second >= sample.d() || pair.first == pair.second)
    fail(ErrorCode::InvalidArgument, "invalid column pair (" + std::to_string(pair.first) + ", " +
                                         std::to_string(pair.second) + ")");
}

void check_k(const RankedSample& sample, std::size_t k) {
  if (k < 1 || k > sample.n())
    fail(ErrorCode::InvalidArgument,
         "k = " + std::to_string(k) + " outside 1.." + std::to_string(sample.n()));
}

// Rank threshold n + 1 - floor(k t), as a signed value (may be <= 0).
long long rank_threshold(std::size_t n, std::size_t k, double t) {
  const double scaled = std::floor(static_cast<double>(k) * t);
  const double limit = static_cast<double>(n) + 1.0;
  return static_cast<long long>(limit - std::min(scaled, limit));
}

}  // namespace

RankedSample RankedSample::from_data(const Matrix& data) {
  const std::size_t n = data.rows();
  if (n < 2) fail(ErrorCode::InvalidArgument, "rank transform needs at least two observations");
  if (data.cols() < 1) fail(ErrorCode::InvalidArgument, "data matrix has no columns");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < data.cols(); ++j)
      if (!std::isfinite(data(i, j)))
        fail(ErrorCode::NonFiniteInput, "non-finite value at row " + std::to_string(i + 1) +
                                            ", column " + std::to_string(j + 1));

  RankedSample out;
  out.n_ = n;
  out.ranks_.resize(data.cols());
  std::vector<std::uint32_t> order(n);
  for (std::size_t j = 0; j < data.cols(); ++j) {
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return data(a, j) < data(b, j); });
    auto& col = out.ranks_[j];
    col.resize(n);
    bool tied = false;
    for (std::size_t r = 0; r < n; ++r) {
      col[order[r]] = static_cast<std::uint32_t>(r + 1);
      if (r > 0 && data(order[r], j) == data(order[r - 1], j)) tied = true;
    }
    if (tied) out.tied_columns_.push_back(j);
  }
  return out;
}

RankedSample RankedSample::from_ranks(std::vector<std::vector<std::uint32_t>> ranks) {
  if (ranks.empty()) fail(ErrorCode::InvalidArgument, "no rank columns");
  const std::size_t n = ranks.front().size();
  if (n < 2) fail(ErrorCode::InvalidArgument, "ranked sample needs n >= 2");
  std::vector<char> seen(n + 1);
  for (const auto& col : ranks) {
    if (col.size() != n) fail(ErrorCode::InvalidArgument, "rank columns differ in length");
    std::fill(seen.begin(), seen.end(), 0);
    for (std::uint32_t r : col) {
      if (r < 1 || r > n || seen[r]) fail(ErrorCode::InvalidArgument, "rank column is not a permutation of 1..n");
      seen[r] = 1;
    }
  }
  RankedSample out;
  out.n_ = n;
  out.ranks_ = std::move(ranks);
  return out;
}

double empirical_q(const RankedSample& sample, PairIndex pair, std::size_t k, double x, double y) {
  check_pair(sample, pair);
  check_k(sample, k);
  if (!(x >= 0.0) || !(y >= 0.0)) fail(ErrorCode::InvalidArgument, "empirical_q needs x, y >= 0");
  const std::size_t n = sample.n();
  const long long tx = rank_threshold(n, k, x);
  const long long ty = rank_threshold(n, k, y);
  if (tx > static_cast<long long>(n) || ty > static_cast<long long>(n)) return 0.0;
  const auto c1 = sample.column(pair.first);
  const auto c2 = sample.column(pair.second);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    count += (c1[i] >= tx) & (c2[i] >= ty);
  return static_cast<double>(count) / static_cast<double>(n);
}

std::size_t joint_exceedances(const RankedSample& sample, PairIndex pair, std::size_t k) {
  check_pair(sample, pair);
  check_k(sample, k);
  const long long threshold = static_cast<long long>(sample.n()) + 1 - static_cast<long long>(k);
  const auto c1 = sample.column(pair.first);
  const auto c2 = sample.column(pair.second);
  std::size_t count = 0;
  for (std::size_t i = 0; i < sample.n(); ++i)
    count += (c1[i] >= threshold) & (c2[i] >= threshold);
  return count;
}

double tilde_c(const RankedSample& sample, PairIndex pair, std::size_t k, double x, double y) {
  const double denom = empirical_q(sample, pair, k, 1.0, 1.0);
  if (denom <= 0.0)
    fail(ErrorCode::ZeroDenominator,
         "no joint exceedance at level k = " + std::to_string(k) + "; ratio estimator undefined");
  return empirical_q(sample, pair, k, x, y) / denom;
}

TailIndexChoice select_khat(const RankedSample& sample, PairIndex pair, std::size_t m) {
  check_pair(sample, pair);
  const std::size_t n = sample.n();
  if (m == 0 || m > n)
    fail(ErrorCode::InvalidArgument, "effective sample size m must lie in 1..n");
  // Observation i is a joint exceedance from level k_i = n + 1 - min(R_i1, R_i2)
  // on, so the count at level k is #{i : k_i <= k}; k-hat is the m-th
  // smallest k_i.
  const auto c1 = sample.column(pair.first);
  const auto c2 = sample.column(pair.second);
  std::vector<std::uint32_t> entry(n);
  for (std::size_t i = 0; i < n; ++i)
    entry[i] = static_cast<std::uint32_t>(n + 1 - std::min(c1[i], c2[i]));
  std::nth_element(entry.begin(), entry.begin() + static_cast<std::ptrdiff_t>(m - 1), entry.end());
  const std::size_t k = entry[m - 1];
  if (k > n) fail(ErrorCode::Unreachable, "no level k reaches the requested joint count");
  TailIndexChoice choice = TailIndexChoice::effective_m(m);
  choice.resolved_k = k;
  choice.resolved_m = joint_exceedances(sample, pair, k);
  return choice;
}

TailIndexChoice resolve(const RankedSample& sample, PairIndex pair, TailIndexChoice choice) {
  if (choice.mode == TailIndexChoice::Mode::EffectiveM)
    return select_khat(sample, pair, choice.requested);
  check_pair(sample, pair);
  check_k(sample, choice.requested);
  choice.resolved_k = choice.requested;
  choice.resolved_m = joint_exceedances(sample, pair, choice.requested);
  return choice;
}

double rect_integral_q(const RankedSample& sample, PairIndex pair, std::size_t k,
                       const Rectangle& rect) {
  check_pair(sample, pair);
  check_k(sample, k);
  rect.validate();
  if (rect.degenerate()) return 0.0;
  const std::size_t n = sample.n();
  const auto c1 = sample.column(pair.first);
  const auto c2 = sample.column(pair.second);
  const double inv_k = 1.0 / static_cast<double>(k);
  const double top = static_cast<double>(n + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (top - c1[i]) * inv_k;
    if (u >= rect.x_hi) continue;
    const double v = (top - c2[i]) * inv_k;
    if (v >= rect.y_hi) continue;
    total += (rect.x_hi - std::max(rect.x_lo, u)) * (rect.y_hi - std::max(rect.y_lo, v));
  }
  return total / static_cast<double>(n);
}

}  // namespace tailfit
