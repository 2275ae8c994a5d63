#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fqn/selection.hpp"

namespace fqn {

// Virtual m x m matrix a(i,j) = x(i) - x(j) over a nondecreasing vector x.
// Rows are nonincreasing in j, columns nondecreasing in i. Only x is held.
class DiffMatrixView {
 public:
  constexpr DiffMatrixView() = default;
  constexpr explicit DiffMatrixView(std::span<const double> x) : x_(x) {}

  std::size_t order() const noexcept { return x_.size(); }
  std::uint64_t entries() const noexcept {
    return static_cast<std::uint64_t>(x_.size()) * x_.size();
  }
  // 0-based.
  double at(std::size_t i, std::size_t j) const noexcept { return x_[i] - x_[j]; }
  std::span<const double> vector() const noexcept { return x_; }

 private:
  std::span<const double> x_;
};

// Counters filled by MatrixSelector; reset at the start of every call.
struct SelectStats {
  std::uint64_t evaluations = 0;    // virtual entries computed
  std::size_t depth = 0;            // recursion levels below the top call
  std::size_t max_collected = 0;    // largest |{b < a(i,j) < a}| over all levels
  std::size_t max_collected_order = 0;  // matrix order at that level
};

// Reading of the recursive upper rank for odd orders. kGrouped is
// ceil((k1 + 2m + 1) / 4); kLiteral is ceil(k1 / 4) + 2m + 1, which can exceed
// the submatrix size and is kept only so the oracle tests can reject it.
enum class OddUpperRank { kGrouped, kLiteral };

// |{(i,j) : a(i,j) < a}| by a staircase sweep, O(m).
std::uint64_t rank_minus(DiffMatrixView A, double a, std::uint64_t* evaluations = nullptr);
// |{(i,j) : a(i,j) > a}|, O(m).
std::uint64_t rank_plus(DiffMatrixView A, double a, std::uint64_t* evaluations = nullptr);
// Appends every entry strictly between b and a to `out`, O(m + output).
void collect_between(DiffMatrixView A, double b, double a, std::vector<double>& out,
                     std::uint64_t* evaluations = nullptr);
std::vector<double> collect_between(DiffMatrixView A, double b, double a);


// Recursive rank bounds used by biselect; exposed for tests.
std::uint64_t sub_upper_rank(std::size_t m, std::uint64_t k1, OddUpperRank rule);
std::uint64_t sub_lower_rank(std::uint64_t k2);
std::size_t sub_order(std::size_t m);

// Linear-time selection in X + (-X). Owns scratch buffers so repeated calls
// on windows of the same size do not allocate.
class MatrixSelector {
 public:
  MatrixSelector() = default;
  explicit MatrixSelector(OddUpperRank rule) : rule_(rule) {}

  // (k1-th, k2-th) smallest entries; requires 1 <= k2 <= k1 <= m^2.
  RankPair biselect(DiffMatrixView A, std::uint64_t k1, std::uint64_t k2);
  double select(DiffMatrixView A, std::uint64_t k);

  const SelectStats& stats() const noexcept { return stats_; }

 private:
  RankPair recurse(std::span<const double> x, std::uint64_t k1, std::uint64_t k2,
                   std::size_t depth);
  void bracket_pass(std::span<const double> x, double a, double b, std::uint64_t& below_a,
                    std::uint64_t& above_b);

  OddUpperRank rule_ = OddUpperRank::kGrouped;
  std::vector<std::vector<double>> levels_;
  std::vector<double> between_;  // L, valid in [0, between_size_)
  std::vector<double> padded_;
  SelectWorkspace select_scratch_;
  std::size_t between_size_ = 0;
  std::vector<std::size_t> first_below_a_;
  std::vector<std::size_t> end_above_b_;
  SelectStats stats_;
};

RankPair biselect(DiffMatrixView A, std::uint64_t k1, std::uint64_t k2);
double ma_select(DiffMatrixView A, std::uint64_t k);

}  // namespace fqn
