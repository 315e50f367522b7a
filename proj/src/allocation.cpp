#include "stratjoin/allocation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stratjoin/error.h"

namespace stratjoin {

namespace {

using u128 = unsigned __int128;

double log_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  const auto dn = static_cast<double>(n);
  const auto dk = static_cast<double>(k);
  return std::lgamma(dn + 1) - std::lgamma(dk + 1) - std::lgamma(dn - dk + 1);
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

void check_shape(const StrataMatrix& m, const AllocationPlan& plan) {
  if (plan.mm.size() != m.relations()) {
    throw Error(ErrorKind::kShapeMismatch, "plan has " + std::to_string(plan.mm.size()) +
                                               " relations, matrix has " +
                                               std::to_string(m.relations()));
  }
  for (std::size_t i = 0; i < m.relations(); ++i) {
    if (plan.mm[i].size() != m.strata()) {
      throw Error(ErrorKind::kShapeMismatch,
                  "plan row " + std::to_string(i) + " has " +
                      std::to_string(plan.mm[i].size()) + " strata, matrix has " +
                      std::to_string(m.strata()));
    }
    for (std::size_t j = 0; j < m.strata(); ++j) {
      if (plan.mm[i][j] > m.at(i, j)) {
        throw Error(ErrorKind::kInvalidPlan,
                    "plan allocates " + std::to_string(plan.mm[i][j]) +
                        " tuples to cell (" + std::to_string(i) + "," +
                        std::to_string(j) + ") of size " + std::to_string(m.at(i, j)));
      }
    }
  }
}

BigInt exact_count(const StrataMatrix& m, const AllocationPlan& plan) {
  BigInt product = 1;
  for (std::size_t i = 0; i < m.relations(); ++i) {
    for (std::size_t j = 0; j < m.strata(); ++j) {
      product *= binomial(m.at(i, j), plan.mm[i][j]);
    }
  }
  return product;
}

}  // namespace

// ---------------------------------------------------------------------------

StrataMatrix::StrataMatrix(std::vector<std::vector<std::uint64_t>> rows)
    : rows_(std::move(rows)) {
  if (rows_.empty() || rows_.front().empty()) {
    throw Error(ErrorKind::kShapeMismatch, "strata matrix needs at least one cell");
  }
  for (const auto& r : rows_) {
    if (r.size() != rows_.front().size()) {
      throw Error(ErrorKind::kShapeMismatch, "strata matrix rows differ in length");
    }
    for (std::uint64_t v : r) {
      if (v == 0) {
        throw Error(ErrorKind::kShapeMismatch,
                    "strata matrix entries must be positive; exclude empty strata first");
      }
    }
  }
}

StrataMatrix StrataMatrix::common_strata_only(
    const std::vector<std::vector<std::uint64_t>>& rows,
    std::vector<std::size_t>* excluded) {
  if (rows.empty()) throw Error(ErrorKind::kShapeMismatch, "strata matrix has no rows");
  const std::size_t n = rows.front().size();
  std::vector<std::vector<std::uint64_t>> kept(rows.size());
  for (std::size_t j = 0; j < n; ++j) {
    bool all_present = true;
    for (const auto& r : rows) {
      if (r.size() != n) {
        throw Error(ErrorKind::kShapeMismatch, "strata matrix rows differ in length");
      }
      all_present = all_present && r[j] > 0;
    }
    if (!all_present) {
      if (excluded) excluded->push_back(j);
      continue;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) kept[i].push_back(rows[i][j]);
  }
  return StrataMatrix(std::move(kept));
}

std::uint64_t StrataMatrix::stratum_total(std::size_t stratum) const {
  std::uint64_t s = 0;
  for (const auto& r : rows_) s += r[stratum];
  return s;
}

std::uint64_t StrataMatrix::total() const {
  std::uint64_t s = 0;
  for (const auto& r : rows_) {
    for (std::uint64_t v : r) s += v;
  }
  return s;
}

std::vector<std::uint64_t> AllocationPlan::stratum_totals() const {
  std::vector<std::uint64_t> out(mm.empty() ? 0 : mm.front().size(), 0);
  for (const auto& r : mm) {
    for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j];
  }
  return out;
}

std::uint64_t AllocationPlan::total() const {
  std::uint64_t s = 0;
  for (const auto& r : mm) {
    for (std::uint64_t v : r) s += v;
  }
  return s;
}

SampleCount count_possible_samples(const StrataMatrix& m, const AllocationPlan& plan) {
  check_shape(m, plan);
  SampleCount out;
  bool small = true;
  for (std::size_t i = 0; i < m.relations(); ++i) {
    for (std::size_t j = 0; j < m.strata(); ++j) {
      out.log_value += log_binomial(m.at(i, j), plan.mm[i][j]);
      small = small && m.at(i, j) <= kExactCellLimit;
    }
  }
  if (small) out.exact = exact_count(m, plan);
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form allocation

std::vector<std::uint64_t> allocate_single_stratum(std::span<const std::uint64_t> m,
                                                   std::uint64_t k) {
  u128 population = 0;
  for (std::uint64_t v : m) population += v;
  if (k > population) {
    throw Error(ErrorKind::kCapacity,
                "budget " + std::to_string(k) + " exceeds population " +
                    std::to_string(static_cast<std::uint64_t>(population)));
  }
  std::vector<std::uint64_t> mm(m.size(), 0);
  if (k == 0) return mm;

  // quota_i = k * m_i / population; remainder_i = (quota_i - mm_i) * population.
  std::vector<__int128> remainder(m.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const u128 q = static_cast<u128>(k) * m[i];
    u128 whole = q / population;
    if (2 * (q % population) >= population) ++whole;
    mm[i] = static_cast<std::uint64_t>(whole);
    remainder[i] = static_cast<__int128>(q) - static_cast<__int128>(whole * population);
    assigned += mm[i];
  }
  const auto pop = static_cast<__int128>(population);
  while (assigned < k) {
    std::size_t best = m.size();
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (mm[i] >= m[i]) continue;
      if (best == m.size() || remainder[i] > remainder[best]) best = i;
    }
    ++mm[best];
    remainder[best] -= pop;
    ++assigned;
  }
  while (assigned > k) {
    std::size_t best = m.size();
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (mm[i] == 0) continue;
      // Ties shed the highest index so that growth and shrinkage both favour low indices.
      if (best == m.size() || remainder[i] <= remainder[best]) best = i;
    }
    --mm[best];
    remainder[best] += pop;
    --assigned;
  }
  return mm;
}

AllocationPlan allocate_multi_strata(const StrataMatrix& m, std::uint64_t k) {
  if (k > m.total()) {
    throw Error(ErrorKind::kCapacity, "budget " + std::to_string(k) +
                                          " exceeds population " +
                                          std::to_string(m.total()));
  }
  std::vector<std::uint64_t> column_totals(m.strata());
  for (std::size_t j = 0; j < m.strata(); ++j) column_totals[j] = m.stratum_total(j);
  const auto per_stratum = allocate_single_stratum(column_totals, k);

  AllocationPlan plan;
  plan.mm.assign(m.relations(), std::vector<std::uint64_t>(m.strata(), 0));
  std::vector<std::uint64_t> column(m.relations());
  for (std::size_t j = 0; j < m.strata(); ++j) {
    for (std::size_t i = 0; i < m.relations(); ++i) column[i] = m.at(i, j);
    const auto split = allocate_single_stratum(column, per_stratum[j]);
    for (std::size_t i = 0; i < m.relations(); ++i) plan.mm[i][j] = split[i];
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Optimal allocation

std::uint64_t count_candidate_plans(const StrataMatrix& m, std::uint64_t k) {
  constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();
  // ways[b]: number of ways to fill the cells seen so far with total b.
  std::vector<std::uint64_t> ways(k + 1, 0);
  ways[0] = 1;
  for (std::size_t i = 0; i < m.relations(); ++i) {
    for (std::size_t j = 0; j < m.strata(); ++j) {
      const std::uint64_t cap = m.at(i, j);
      std::vector<std::uint64_t> next(k + 1, 0);
      for (std::uint64_t b = 0; b <= k; ++b) {
        if (ways[b] == 0) continue;
        for (std::uint64_t x = 0; x <= cap && b + x <= k; ++x) {
          const u128 sum = static_cast<u128>(next[b + x]) + ways[b];
          next[b + x] = sum > kSaturated ? kSaturated : static_cast<std::uint64_t>(sum);
        }
      }
      ways = std::move(next);
    }
  }
  return ways[k];
}

namespace {

struct Search {
  std::vector<std::uint64_t> caps;            // row-major cells
  std::vector<std::vector<double>> log_table;  // log C(cap, x)
  std::vector<std::uint64_t> suffix_capacity;
  std::vector<std::uint64_t> current;
  std::vector<std::uint64_t> best;
  double best_log = -std::numeric_limits<double>::infinity();
  std::optional<BigInt> best_exact;
  std::uint64_t visited = 0;

  BigInt exact_of(const std::vector<std::uint64_t>& cells) const {
    BigInt p = 1;
    for (std::size_t c = 0; c < cells.size(); ++c) p *= binomial(caps[c], cells[c]);
    return p;
  }

  void consider(double log_value) {
    ++visited;
    if (best.empty()) {
      best = current;
      best_log = log_value;
      best_exact.reset();
      return;
    }
    const double scale = std::max({1.0, std::abs(log_value), std::abs(best_log)});
    if (log_value > best_log + 1e-9 * scale) {
      best = current;
      best_log = log_value;
      best_exact.reset();
    } else if (log_value >= best_log - 1e-9 * scale) {
      // Too close to call in floating point; settle it exactly. Enumeration is
      // in ascending lexicographic order, so only a strictly larger count wins.
      if (!best_exact) best_exact = exact_of(best);
      BigInt candidate = exact_of(current);
      if (candidate > *best_exact) {
        best = current;
        best_log = log_value;
        best_exact = std::move(candidate);
      }
    }
  }

  void recurse(std::size_t cell, std::uint64_t remaining, double log_value) {
    if (cell + 1 == caps.size()) {
      current[cell] = remaining;
      consider(log_value + log_table[cell][remaining]);
      return;
    }
    const std::uint64_t rest = suffix_capacity[cell + 1];
    const std::uint64_t lo = remaining > rest ? remaining - rest : 0;
    const std::uint64_t hi = std::min(caps[cell], remaining);
    for (std::uint64_t x = lo; x <= hi; ++x) {
      current[cell] = x;
      recurse(cell + 1, remaining - x, log_value + log_table[cell][x]);
    }
  }
};

AllocationPlan unflatten(const StrataMatrix& m, const std::vector<std::uint64_t>& cells) {
  AllocationPlan plan;
  plan.mm.assign(m.relations(), std::vector<std::uint64_t>(m.strata(), 0));
  for (std::size_t i = 0; i < m.relations(); ++i) {
    for (std::size_t j = 0; j < m.strata(); ++j) {
      plan.mm[i][j] = cells[i * m.strata() + j];
    }
  }
  return plan;
}

}  // namespace

OptimalAllocation brute_force_optimal(const StrataMatrix& m, std::uint64_t k,
                                      std::uint64_t cap) {
  if (k > m.total()) {
    throw Error(ErrorKind::kCapacity, "budget " + std::to_string(k) +
                                          " exceeds population " +
                                          std::to_string(m.total()));
  }
  const std::uint64_t candidates = count_candidate_plans(m, k);
  if (candidates > cap) {
    throw Error(ErrorKind::kSearchTooLarge,
                std::to_string(candidates) + " candidate plans exceed the cap of " +
                    std::to_string(cap));
  }
  Search s;
  for (const auto& r : m.rows()) s.caps.insert(s.caps.end(), r.begin(), r.end());
  s.log_table.resize(s.caps.size());
  for (std::size_t c = 0; c < s.caps.size(); ++c) {
    s.log_table[c].resize(s.caps[c] + 1);
    for (std::uint64_t x = 0; x <= s.caps[c]; ++x) {
      s.log_table[c][x] = log_binomial(s.caps[c], x);
    }
  }
  s.suffix_capacity.assign(s.caps.size() + 1, 0);
  for (std::size_t c = s.caps.size(); c-- > 0;) {
    s.suffix_capacity[c] = s.suffix_capacity[c + 1] + s.caps[c];
  }
  s.current.assign(s.caps.size(), 0);
  s.recurse(0, k, 0.0);

  OptimalAllocation out;
  out.plan = unflatten(m, s.best);
  out.count = count_possible_samples(m, out.plan);
  out.candidates = s.visited;
  return out;
}

AllocationPlan marginal_optimal(const StrataMatrix& m, std::uint64_t k) {
  if (k > m.total()) {
    throw Error(ErrorKind::kCapacity, "budget " + std::to_string(k) +
                                          " exceeds population " +
                                          std::to_string(m.total()));
  }
  std::vector<std::uint64_t> caps;
  for (const auto& r : m.rows()) caps.insert(caps.end(), r.begin(), r.end());
  std::vector<std::uint64_t> x(caps.size(), 0);
  for (std::uint64_t step = 0; step < k; ++step) {
    // Gain of the next unit in cell c is (caps[c] - x[c]) / (x[c] + 1).
    std::size_t best = caps.size();
    for (std::size_t c = caps.size(); c-- > 0;) {
      if (x[c] >= caps[c]) continue;
      if (best == caps.size()) {
        best = c;
        continue;
      }
      const u128 lhs = static_cast<u128>(caps[c] - x[c]) * (x[best] + 1);
      const u128 rhs = static_cast<u128>(caps[best] - x[best]) * (x[c] + 1);
      if (lhs > rhs) best = c;  // scanning high to low keeps ties on the higher cell
    }
    ++x[best];
  }
  return unflatten(m, x);
}

double uniformity_confidence(const StrataMatrix& m, const AllocationPlan& plan) {
  const SampleCount achievable = count_possible_samples(m, plan);
  const double possible = log_binomial(m.total(), plan.total());
  return 100.0 * std::exp(achievable.log_value - possible);
}

// ---------------------------------------------------------------------------
// Error metrics

AllocationError allocation_error(const AllocationPlan& predicted,
                                 const AllocationPlan& optimal) {
  AllocationErrorAccumulator acc;
  acc.add(predicted, optimal);
  return acc.result();
}

void AllocationErrorAccumulator::add(const AllocationPlan& predicted,
                                     const AllocationPlan& optimal) {
  if (predicted.mm.size() != optimal.mm.size()) {
    throw Error(ErrorKind::kShapeMismatch, "plans differ in relation count");
  }
  for (std::size_t i = 0; i < predicted.mm.size(); ++i) {
    if (predicted.mm[i].size() != optimal.mm[i].size()) {
      throw Error(ErrorKind::kShapeMismatch, "plans differ in strata count");
    }
    for (std::size_t j = 0; j < predicted.mm[i].size(); ++j) {
      const double p = static_cast<double>(predicted.mm[i][j]);
      const double a = static_cast<double>(optimal.mm[i][j]);
      const double d = a - p;
      squared_ += d * d;
      ++cells_;
      if (optimal.mm[i][j] != 0) {
        relative_squared_ += (d / a) * (d / a);
        ++relative_cells_;
      }
      const std::uint64_t diff = predicted.mm[i][j] > optimal.mm[i][j]
                                     ? predicted.mm[i][j] - optimal.mm[i][j]
                                     : optimal.mm[i][j] - predicted.mm[i][j];
      max_diff_ = std::max(max_diff_, diff);
    }
  }
  ++instances_;
}

AllocationError AllocationErrorAccumulator::result() const {
  AllocationError e;
  e.cells = cells_;
  e.excluded_cells = cells_ - relative_cells_;
  e.mse = cells_ ? squared_ / static_cast<double>(cells_) : 0.0;
  e.msre = relative_cells_ ? relative_squared_ / static_cast<double>(relative_cells_) : 0.0;
  e.max_diff = max_diff_;
  return e;
}

}  // namespace stratjoin
