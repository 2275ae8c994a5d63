#include "fqn/matrix_select.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "fqn/error.hpp"

namespace fqn {

// The sweeps walk the staircase one step at a time: each step either moves
// to the next row or the next column, so there are at most 2m steps. Written
// without data-dependent branches; on continuous data the exit point of a
// per-row inner loop is unpredictable and mispredictions dominate the cost.

std::uint64_t rank_minus(DiffMatrixView A, double a, std::uint64_t* evaluations) {
  const std::size_t m = A.order();
  const double* x = A.vector().data();
  std::uint64_t count = 0;
  std::size_t i = 0;
  std::size_t j = 0;  // row i holds entries < a in columns [j, m)
  while (i < m && j < m) {
    const bool step_right = x[i] - x[j] >= a;
    count += step_right ? 0 : m - j;
    j += step_right;
    i += !step_right;
  }
  if (evaluations) *evaluations += i + j;
  return count;
}

std::uint64_t rank_plus(DiffMatrixView A, double a, std::uint64_t* evaluations) {
  const std::size_t m = A.order();
  const double* x = A.vector().data();
  std::uint64_t count = 0;
  std::size_t i = 0;
  std::size_t p = 0;  // row i holds entries > a in columns [0, p)
  while (i < m && p < m) {
    const bool step_right = x[i] - x[p] > a;
    count += step_right ? 0 : p;
    p += step_right;
    i += !step_right;
  }
  if (evaluations) *evaluations += i + p;
  // Once p reaches m every remaining row is entirely above a.
  count += static_cast<std::uint64_t>(m - i) * m;
  return count;
}

void collect_between(DiffMatrixView A, double b, double a, std::vector<double>& out,
                     std::uint64_t* evaluations) {
  const std::size_t m = A.order();
  const double* x = A.vector().data();
  std::uint64_t evals = 0;
  std::size_t below_a = 0;  // first column with a(i,j) < a
  std::size_t above_b = 0;  // columns [0, above_b) hold a(i,j) > b
  for (std::size_t i = 0; i < m; ++i) {
    while (below_a < m && x[i] - x[below_a] >= a) ++below_a;
    while (above_b < m && x[i] - x[above_b] > b) ++above_b;
    for (std::size_t j = below_a; j < above_b; ++j) out.push_back(x[i] - x[j]);
    if (above_b > below_a) evals += above_b - below_a;
  }
  if (evaluations) *evaluations += evals + below_a + above_b + 2 * m;
}

std::vector<double> collect_between(DiffMatrixView A, double b, double a) {
  std::vector<double> out;
  collect_between(A, b, a, out);
  return out;
}

std::size_t sub_order(std::size_t m) { return (m + 2) / 2; }  // ceil((m+1)/2)

std::uint64_t sub_upper_rank(std::size_t m, std::uint64_t k1, OddUpperRank rule) {
  const std::uint64_t mm = m;
  if (m % 2 == 0) return mm + 1 + (k1 + 3) / 4;
  if (rule == OddUpperRank::kLiteral) return (k1 + 3) / 4 + 2 * mm + 1;
  return (k1 + 2 * mm + 1 + 3) / 4;
}

std::uint64_t sub_lower_rank(std::uint64_t k2) { return (k2 + 3) / 4; }

namespace {

void check_ranks(std::uint64_t m2, std::uint64_t k1, std::uint64_t k2) {
  if (k2 < 1 || k2 > k1 || k1 > m2) {
    raise(ErrorCode::kInvalidRank, "biselect: ranks (" + std::to_string(k1) + ", " +
                                       std::to_string(k2) + ") invalid for " +
                                       std::to_string(m2) + " entries");
  }
}

}  // namespace

RankPair MatrixSelector::biselect(DiffMatrixView A, std::uint64_t k1, std::uint64_t k2) {
  stats_ = SelectStats{};
  check_ranks(A.entries(), k1, k2);
  return recurse(A.vector(), k1, k2, 0);
}

double MatrixSelector::select(DiffMatrixView A, std::uint64_t k) {
  return biselect(A, k, k).hi;
}

void MatrixSelector::bracket_pass(std::span<const double> x, double a, double b,
                                  std::uint64_t& below_a, std::uint64_t& above_b) {
  const std::size_t m = x.size();
  const double* v = x.data();
  first_below_a_.resize(m);
  end_above_b_.resize(m);
  std::size_t* fa = first_below_a_.data();
  std::size_t* eb = end_above_b_.data();

  // Two independent staircase walks advanced in lockstep so their load
  // latencies overlap. Walk A tracks the first column with a(i,j) < a, walk B
  // the end of the prefix with a(i,j) > b.
  std::size_t ia = 0, ja = 0, ib = 0, pb = 0;
  while (ia < m && ja < m && ib < m && pb < m) {
    const bool right_a = v[ia] - v[ja] >= a;
    fa[ia] = ja;
    ja += right_a;
    ia += !right_a;
    const bool right_b = v[ib] - v[pb] > b;
    eb[ib] = pb;
    pb += right_b;
    ib += !right_b;
  }
  while (ia < m && ja < m) {
    const bool right_a = v[ia] - v[ja] >= a;
    fa[ia] = ja;
    ja += right_a;
    ia += !right_a;
  }
  while (ib < m && pb < m) {
    const bool right_b = v[ib] - v[pb] > b;
    eb[ib] = pb;
    pb += right_b;
    ib += !right_b;
  }
  stats_.evaluations += ia + ja + ib + pb;
  for (; ia < m; ++ia) fa[ia] = m;
  for (; ib < m; ++ib) eb[ib] = m;

  below_a = 0;
  above_b = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < m; ++i) {
    below_a += m - fa[i];
    above_b += eb[i];
    total += eb[i] > fa[i] ? eb[i] - fa[i] : 0;
  }

  // Rows hold about two entries of L on average. Each row is written with a
  // fixed eight-wide store from a padded copy of x, so the trip count of a
  // per-row loop never reaches the branch predictor; longer rows finish in a
  // loop.
  constexpr std::size_t kRowBlock = 8;
  padded_.assign(v, v + m);
  padded_.resize(m + kRowBlock, 0.0);
  const double* pv = padded_.data();
  if (between_.size() < total + kRowBlock) between_.resize(total + kRowBlock);
  double* out = between_.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double xi = v[i];
    const std::size_t from = fa[i];
    const std::size_t to = eb[i] > from ? eb[i] : from;
    for (std::size_t t = 0; t < kRowBlock; ++t) out[t] = xi - pv[from + t];
    if (to - from > kRowBlock) {
      for (std::size_t j = from + kRowBlock; j < to; ++j) out[j - from] = xi - v[j];
    }
    out += to - from;
  }
  between_size_ = total;
  stats_.evaluations += total;
  if (total > stats_.max_collected) {
    stats_.max_collected = total;
    stats_.max_collected_order = m;
  }
}

RankPair MatrixSelector::recurse(std::span<const double> x, std::uint64_t k1,
                                 std::uint64_t k2, std::size_t depth) {
  const std::size_t m = x.size();
  const DiffMatrixView A(x);
  const std::uint64_t m2 = A.entries();
  check_ranks(m2, k1, k2);
  stats_.depth = std::max(stats_.depth, depth);

  if (m <= 2) {
    std::array<double, 4> e{};
    std::size_t n = 0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) e[n++] = A.at(i, j);
    stats_.evaluations += n;
    std::sort(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n));
    return {e[k2 - 1], e[k1 - 1]};
  }

  // Odd-indexed rows/columns (1-based), plus the last one when m is even.
  // Subsampling rows and columns alike keeps the submatrix a difference matrix.
  if (levels_.size() <= depth) levels_.resize(depth + 1);
  std::vector<double>& sub = levels_[depth];
  sub.clear();
  for (std::size_t i = 0; i < m; i += 2) sub.push_back(x[i]);
  if (m % 2 == 0) sub.push_back(x[m - 1]);

  const RankPair bounds =
      recurse(sub, sub_upper_rank(m, k1, rule_), sub_lower_rank(k2), depth + 1);
  const double a = bounds.hi;
  const double b = bounds.lo;

  // rank^-(A, a), rank^+(A, b) and L = {b < a(i,j) < a} in one pass.
  std::uint64_t ra_minus = 0;
  std::uint64_t rb_plus = 0;
  bracket_pass(x, a, b, ra_minus, rb_plus);

  // Position inside L, or 0 when the threshold tests settle the rank.
  // Entries <= b number m2 - rb_plus.
  auto position = [&](std::uint64_t k) -> std::uint64_t {
    if (ra_minus <= k - 1) return 0;
    if (k + rb_plus <= m2) return 0;
    return k + rb_plus - m2;
  };
  auto threshold = [&](std::uint64_t k) { return ra_minus <= k - 1 ? a : b; };

  const std::uint64_t pos1 = position(k1);
  const std::uint64_t pos2 = k2 == k1 ? pos1 : position(k2);
  const std::span<double> between(between_.data(), between_size_);
  if (pos1 && pos2) return select_pair(between, pos2, pos1, select_scratch_);
  const double hi = pos1 ? select_pair(between, pos1, pos1, select_scratch_).hi : threshold(k1);
  const double lo =
      k2 == k1 ? hi : (pos2 ? select_pair(between, pos2, pos2, select_scratch_).hi : threshold(k2));
  return {lo, hi};
}

RankPair biselect(DiffMatrixView A, std::uint64_t k1, std::uint64_t k2) {
  MatrixSelector selector;
  return selector.biselect(A, k1, k2);
}

double ma_select(DiffMatrixView A, std::uint64_t k) {
  MatrixSelector selector;
  return selector.select(A, k);
}

}  // namespace fqn
