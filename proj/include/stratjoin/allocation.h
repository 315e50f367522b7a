#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace stratjoin {

using BigInt = boost::multiprecision::cpp_int;

/// Stratum sizes m[i][j] of relation i in stratum j. Rows are relations,
/// columns strata. Every entry is positive.
class StrataMatrix {
 public:
  explicit StrataMatrix(std::vector<std::vector<std::uint64_t>> rows);

  /// Drops strata that are empty in any relation; their original column
  /// indices are written to `excluded` when given.
  static StrataMatrix common_strata_only(
      const std::vector<std::vector<std::uint64_t>>& rows,
      std::vector<std::size_t>* excluded = nullptr);

  std::size_t relations() const { return rows_.size(); }
  std::size_t strata() const { return rows_.front().size(); }
  std::uint64_t at(std::size_t relation, std::size_t stratum) const {
    return rows_[relation][stratum];
  }
  std::uint64_t stratum_total(std::size_t stratum) const;
  std::uint64_t total() const;
  const std::vector<std::vector<std::uint64_t>>& rows() const { return rows_; }

 private:
  std::vector<std::vector<std::uint64_t>> rows_;
};

/// Sample counts mm[i][j], same shape as the matrix it allocates.
struct AllocationPlan {
  std::vector<std::vector<std::uint64_t>> mm;

  std::vector<std::uint64_t> stratum_totals() const;  // k^j
  std::uint64_t total() const;                        // k

  friend bool operator==(const AllocationPlan&, const AllocationPlan&) = default;
};

/// Product of C(m[i][j], mm[i][j]) over all cells. `exact` is filled when
/// every cell population is at most kExactCellLimit.
struct SampleCount {
  std::optional<BigInt> exact;
  double log_value = 0;
};

inline constexpr std::uint64_t kExactCellLimit = 10'000;

SampleCount count_possible_samples(const StrataMatrix& m, const AllocationPlan& plan);

/// Proportional split mm_i = round(k * m_i / sum m), then a largest-remainder
/// repair so the result sums to k and never exceeds m_i.
std::vector<std::uint64_t> allocate_single_stratum(std::span<const std::uint64_t> m,
                                                   std::uint64_t k);

/// k^j = round(k * column total / grand total), repaired to sum to k, then
/// each k^j split across relations with allocate_single_stratum.
AllocationPlan allocate_multi_strata(const StrataMatrix& m, std::uint64_t k);

struct OptimalAllocation {
  AllocationPlan plan;
  SampleCount count;
  std::uint64_t candidates = 0;
};

inline constexpr std::uint64_t kDefaultSearchCap = 100'000'000;

/// Exhaustive search over every plan with sum k and mm <= m. Returns a plan
/// with the largest sample count; among equal counts the lexicographically
/// smallest plan in row-major order.
OptimalAllocation brute_force_optimal(const StrataMatrix& m, std::uint64_t k,
                                      std::uint64_t cap = kDefaultSearchCap);

/// Number of plans brute_force_optimal would visit, saturating at UINT64_MAX.
std::uint64_t count_candidate_plans(const StrataMatrix& m, std::uint64_t k);

/// Exact optimum by marginal analysis. Each unit added to a cell multiplies
/// the count by (m - x) / (x + 1), which strictly decreases in x, so taking
/// the k largest unit gains is optimal. Equal gains go to the highest
/// row-major cell first, which yields the same plan as brute_force_optimal.
AllocationPlan marginal_optimal(const StrataMatrix& m, std::uint64_t k);

/// 100 * (samples achievable under the plan) / C(total population, k).
double uniformity_confidence(const StrataMatrix& m, const AllocationPlan& plan);

struct AllocationError {
  double mse = 0;
  double msre = 0;
  std::uint64_t max_diff = 0;
  std::size_t cells = 0;
  std::size_t excluded_cells = 0;  // optimal cell of 0, left out of MSRE
};

/// Cell-wise error of a predicted plan against the optimal plan.
/// MSRE averages ((optimal - predicted) / optimal)^2.
AllocationError allocation_error(const AllocationPlan& predicted,
                                 const AllocationPlan& optimal);

/// Pools cells across many instances.
class AllocationErrorAccumulator {
 public:
  void add(const AllocationPlan& predicted, const AllocationPlan& optimal);
  AllocationError result() const;
  std::size_t instances() const { return instances_; }

 private:
  double squared_ = 0;
  double relative_squared_ = 0;
  std::size_t cells_ = 0;
  std::size_t relative_cells_ = 0;
  std::uint64_t max_diff_ = 0;
  std::size_t instances_ = 0;
};

}  // namespace stratjoin
