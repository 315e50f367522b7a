#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stratjoin/join_algorithms.h"
#include "stratjoin/strata.h"

namespace stratjoin {

/// Deliberately broken samplers used as negative controls.
enum class Control {
  kNone,
  /// stratjoin_nn whose first output tuple in each stratum is always the
  /// stratum's first left and first right tuple.
  kBiasedFirst,
  /// stratjoin_both with S2 mirroring the positions drawn for S1, so the two
  /// inputs to mini_join are correlated.
  kCorrelatedBoth,
};

struct TrialSubject {
  Algorithm algorithm = Algorithm::kStratJoinOverall;
  Control control = Control::kNone;

  std::string name() const;
  /// Sampling within a stratum is with replacement (all but the
  /// foreign-key/primary-key algorithms).
  bool with_replacement() const;
};

TrialSubject parse_subject(std::string_view name);

inline constexpr std::uint64_t kMaxStratumJoinTuples = 10'000;
/// Pair co-occurrences are only collected for strata with at most this many
/// join tuples.
inline constexpr std::uint64_t kMaxPairTuples = 256;

/// Counters for one stratum. Join tuple (l, r) is indexed as
/// rank(l) * m2 + rank(r), ranks taken within the stratum.
struct StratumStatistics {
  Key key;
  std::uint64_t m1 = 0;
  std::uint64_t m2 = 0;
  std::uint64_t target = 0;  // intended per-trial output count
  std::vector<std::uint64_t> occurrences;
  bool pairs_collected = false;
  /// Ordered pair of two distinct output slots chosen at random per trial,
  /// indexed first * P + second.
  std::vector<std::uint64_t> pair_counts;
  std::uint64_t pair_trials = 0;

  std::uint64_t join_tuples() const { return m1 * m2; }
};

struct TrialStatistics {
  std::string subject;
  bool with_replacement = true;
  std::uint64_t trials = 0;
  std::vector<StratumStatistics> strata;  // joinable strata, sorted by key
  /// strata_counts[t * strata.size() + s]: output count of stratum s in trial t.
  std::vector<std::uint32_t> strata_counts;

  std::uint32_t count(std::uint64_t trial, std::size_t stratum) const {
    return strata_counts[trial * strata.size() + stratum];
  }
};

/// Runs `subject` `trials` times with per-trial streams derived from
/// (seed, trial index) and accumulates the counters.
TrialStatistics run_trials(const TrialSubject& subject, const StratifiedRelation& r1,
                           const StratifiedRelation& r2, const SamplingRate& f,
                           std::uint64_t trials, std::uint64_t seed);

struct TestReport {
  std::string criterion;
  std::string subject;
  double statistic = 0;
  double degrees_of_freedom = 0;
  double p_value = 1;
  double alpha = 0.001;
  bool pass = true;
  std::string note;
};

inline constexpr double kDefaultAlpha = 0.001;

/// Upper tail P(X >= x) for X ~ chi-square(df).
double chi_square_p_value(double statistic, double degrees_of_freedom);

/// Every trial's stratum counts equal the targets exactly. Deterministic;
/// p-value is 1 on pass and 0 otherwise.
TestReport check_strs1(const TrialStatistics& stats);
TestReport check_strs1(const TrialStatistics& stats,
                       const std::map<Key, std::uint64_t>& targets);

/// Per-stratum chi-square of occurrence counts against uniform, combined by
/// Bonferroni over the strata tested.
TestReport check_strs2(const TrialStatistics& stats, double alpha = kDefaultAlpha);

/// Per-stratum chi-square on co-occurring output pairs. With replacement:
/// independence against the product of the marginals. Without replacement:
/// uniform over ordered pairs of distinct join tuples.
TestReport check_strs3(const TrialStatistics& stats, double alpha = kDefaultAlpha);

/// Variance of the Pearson statistic sum (X_i - n p_i)^2 / (n p_i) when X is
/// multinomial(n, p): 2(k-1) + (sum 1/p_i - k^2 - 2k + 2) / n. Its mean is k-1.
double pearson_variance(const std::vector<double>& p, double n);

/// Stratum counts of a simple random sample of the join against
/// multinomial(n, p_i = m1*m2 / |join|): a pooled goodness-of-fit test plus a
/// two-sided dispersion test on the per-trial Pearson statistics, whose exact
/// mean and variance under the multinomial are known.
TestReport check_multinomial(const TrialStatistics& stats, double alpha = kDefaultAlpha);

}  // namespace stratjoin
