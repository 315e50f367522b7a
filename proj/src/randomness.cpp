#include "stratjoin/randomness.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "stratjoin/error.h"
#include "stratjoin/mini_join.h"
#include "stratjoin/sampler.h"

namespace stratjoin {

std::string TrialSubject::name() const {
  switch (control) {
    case Control::kBiasedFirst: return "biased_first";
    case Control::kCorrelatedBoth: return "correlated_both";
    case Control::kNone: break;
  }
  return std::string(to_string(algorithm));
}

bool TrialSubject::with_replacement() const {
  return !(control == Control::kNone && (algorithm == Algorithm::kStratJoin1n ||
                                         algorithm == Algorithm::kSimplifiedAqua));
}

TrialSubject parse_subject(std::string_view name) {
  if (name == "biased_first") return {Algorithm::kStratJoinNn, Control::kBiasedFirst};
  if (name == "correlated_both") {
    return {Algorithm::kStratJoinBoth, Control::kCorrelatedBoth};
  }
  return {parse_algorithm(name), Control::kNone};
}

namespace {

std::vector<std::uint32_t> stratum_ranks(const StratifiedRelation& r) {
  std::vector<std::uint32_t> rank(r.cardinality(), 0);
  for (const auto& key : r.keys()) {
    const auto ids = r.stratum(key);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      rank[ids[i]] = static_cast<std::uint32_t>(i);
    }
  }
  return rank;
}

JoinRun correlated_both(const StratifiedRelation& r1, const StratifiedRelation& r2,
                        const SamplingRate& f, const RngHandle& rng,
                        const std::vector<std::uint32_t>& rank1) {
  const auto prof = profile(r1, r2);
  StrataDraws s1;
  StrataDraws s2;
  for (const auto& key : common_strata(prof)) {
    const auto left = r1.stratum(key);
    const auto right = r2.stratum(key);
    RngHandle stream = rng.derive("left:" + r1.name(), key);
    s1[key] = draw_with_replacement(left, f.rounded(left.size(), right.size()), stream);
    DrawSet mirrored{{}, true};
    for (TupleId id : s1[key].tuple_ids) {
      mirrored.tuple_ids.push_back(right[rank1[id] % right.size()]);
    }
    s2[key] = std::move(mirrored);
  }
  JoinRun run;
  run.sample = mini_join(s1, s2, rng);
  return run;
}

JoinRun execute(const TrialSubject& subject, const StratifiedRelation& r1,
                const StratifiedRelation& r2, const SamplingRate& f,
                const RngHandle& rng, const std::vector<std::uint32_t>& rank1) {
  switch (subject.control) {
    case Control::kNone:
      return run_algorithm(subject.algorithm, r1, r2, f, rng);
    case Control::kBiasedFirst: {
      JoinRun run = stratjoin_nn(r1, r2, f, rng);
      for (auto& [key, tuples] : run.sample.strata) {
        if (tuples.empty()) continue;
        tuples.front() = JoinedTuple{key, r1.stratum(key)[0], r2.stratum(key)[0]};
      }
      return run;
    }
    case Control::kCorrelatedBoth:
      return correlated_both(r1, r2, f, rng, rank1);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown trial subject");
}

}  // namespace

TrialStatistics run_trials(const TrialSubject& subject, const StratifiedRelation& r1,
                           const StratifiedRelation& r2, const SamplingRate& f,
                           std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw Error(ErrorKind::kInvalidArgument, "trial count must be >= 1");
  const auto prof = profile(r1, r2);
  const bool fk_pk = subject.control == Control::kNone &&
                     (subject.algorithm == Algorithm::kStratJoin1n ||
                      subject.algorithm == Algorithm::kSimplifiedAqua);

  TrialStatistics stats;
  stats.subject = subject.name();
  stats.with_replacement = subject.with_replacement();
  stats.trials = trials;
  std::map<Key, std::size_t> slot;
  for (const auto& key : common_strata(prof)) {
    const auto& c = prof.strata.at(key);
    if (c.left * c.right > kMaxStratumJoinTuples) {
      throw Error(ErrorKind::kInstanceTooLarge,
                  "stratum " + key.to_string() + " has " +
                      std::to_string(c.left * c.right) +
                      " join tuples; the verification cap is " +
                      std::to_string(kMaxStratumJoinTuples));
    }
    StratumStatistics s;
    s.key = key;
    s.m1 = c.left;
    s.m2 = c.right;
    s.target = fk_pk ? f.rounded(c.left) : f.rounded(c.left, c.right);
    s.occurrences.assign(s.join_tuples(), 0);
    s.pairs_collected = s.join_tuples() <= kMaxPairTuples;
    if (s.pairs_collected) s.pair_counts.assign(s.join_tuples() * s.join_tuples(), 0);
    slot[key] = stats.strata.size();
    stats.strata.push_back(std::move(s));
  }
  stats.strata_counts.assign(trials * stats.strata.size(), 0);

  const auto rank1 = stratum_ranks(r1);
  const auto rank2 = stratum_ranks(r2);
  const RngHandle master(seed);
  std::vector<std::uint64_t> indices;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const RngHandle trial_rng = master.derive(t);
    RngHandle verifier = trial_rng.derive("verify");
    const JoinRun run = execute(subject, r1, r2, f, trial_rng, rank1);
    for (const auto& [key, tuples] : run.sample.strata) {
      auto it = slot.find(key);
      if (it == slot.end()) continue;
      StratumStatistics& s = stats.strata[it->second];
      stats.strata_counts[t * stats.strata.size() + it->second] =
          static_cast<std::uint32_t>(tuples.size());
      indices.clear();
      for (const auto& jt : tuples) {
        const std::uint64_t idx = rank1[jt.left_id] * s.m2 + rank2[jt.right_id];
        ++s.occurrences[idx];
        indices.push_back(idx);
      }
      if (s.pairs_collected && indices.size() >= 2) {
        const std::uint64_t a = verifier.uniform_index(indices.size());
        std::uint64_t b = verifier.uniform_index(indices.size() - 1);
        if (b >= a) ++b;
        ++s.pair_counts[indices[a] * s.join_tuples() + indices[b]];
        ++s.pair_trials;
      }
    }
  }
  return stats;
}

// ---------------------------------------------------------------------------

double chi_square_p_value(double statistic, double degrees_of_freedom) {
  if (degrees_of_freedom <= 0) return statistic > 0 ? 0.0 : 1.0;
  if (statistic <= 0) return 1.0;
  return boost::math::gamma_q(degrees_of_freedom / 2.0, statistic / 2.0);
}

namespace {

// Running minimum of per-stratum p-values with Bonferroni adjustment.
struct Combined {
  double min_p = 1.0;
  double statistic = 0;
  double dof = 0;
  std::size_t tested = 0;
  std::string worst;

  void add(const Key& key, double stat, double df, double p) {
    ++tested;
    if (tested == 1 || p < min_p) {
      min_p = p;
      statistic = stat;
      dof = df;
      worst = key.to_string();
    }
  }

  TestReport finish(std::string criterion, const TrialStatistics& stats, double alpha,
                    std::string note) const {
    TestReport r;
    r.criterion = std::move(criterion);
    r.subject = stats.subject;
    r.alpha = alpha;
    r.statistic = statistic;
    r.degrees_of_freedom = dof;
    r.p_value = std::min(1.0, min_p * static_cast<double>(std::max<std::size_t>(tested, 1)));
    r.pass = r.p_value >= alpha;
    std::ostringstream os;
    os << tested << " strata tested, Bonferroni-adjusted";
    if (tested > 0) os << "; weakest stratum " << worst;
    if (!note.empty()) os << "; " << note;
    r.note = os.str();
    return r;
  }
};

[[noreturn]] void underpowered(const std::string& criterion, const Key& key,
                               double expected) {
  std::ostringstream os;
  os << criterion << ": stratum " << key.to_string() << " expects only " << expected
     << " counts per cell; at least 5 are needed";
  throw Error(ErrorKind::kUnderpowered, os.str());
}

constexpr double kMinExpected = 5.0;

}  // namespace

TestReport check_strs1(const TrialStatistics& stats) {
  std::map<Key, std::uint64_t> targets;
  for (const auto& s : stats.strata) targets[s.key] = s.target;
  return check_strs1(stats, targets);
}

TestReport check_strs1(const TrialStatistics& stats,
                       const std::map<Key, std::uint64_t>& targets) {
  std::uint64_t mismatches = 0;
  for (std::size_t s = 0; s < stats.strata.size(); ++s) {
    auto it = targets.find(stats.strata[s].key);
    const std::uint64_t target = it == targets.end() ? 0 : it->second;
    for (std::uint64_t t = 0; t < stats.trials; ++t) {
      if (stats.count(t, s) != target) ++mismatches;
    }
  }
  TestReport r;
  r.criterion = "StRS_1";
  r.subject = stats.subject;
  r.statistic = static_cast<double>(mismatches);
  r.p_value = mismatches == 0 ? 1.0 : 0.0;
  r.pass = mismatches == 0;
  r.note = std::to_string(mismatches) + " (trial, stratum) counts off target";
  return r;
}

TestReport check_strs2(const TrialStatistics& stats, double alpha) {
  Combined combined;
  std::size_t vacuous = 0;
  for (const auto& s : stats.strata) {
    std::uint64_t total = 0;
    for (std::uint64_t c : s.occurrences) total += c;
    const std::uint64_t p = s.join_tuples();
    if (total == 0 || p < 2) {
      ++vacuous;
      continue;
    }
    const double expected = static_cast<double>(total) / static_cast<double>(p);
    if (expected < kMinExpected) underpowered("StRS_2", s.key, expected);
    double chi = 0;
    for (std::uint64_t c : s.occurrences) {
      const double d = static_cast<double>(c) - expected;
      chi += d * d / expected;
    }
    const double df = static_cast<double>(p - 1);
    combined.add(s.key, chi, df, chi_square_p_value(chi, df));
  }
  return combined.finish("StRS_2", stats, alpha,
                         std::to_string(vacuous) + " strata vacuous");
}

TestReport check_strs3(const TrialStatistics& stats, double alpha) {
  Combined combined;
  std::size_t vacuous = 0;
  std::size_t skipped = 0;
  for (const auto& s : stats.strata) {
    const std::uint64_t p = s.join_tuples();
    if (s.pair_trials == 0 || p < 2) {
      ++vacuous;
      continue;
    }
    if (!s.pairs_collected) {
      ++skipped;
      continue;
    }
    const auto n = static_cast<double>(s.pair_trials);
    if (stats.with_replacement) {
      const double null_expected = n / static_cast<double>(p * p);
      if (null_expected < kMinExpected) underpowered("StRS_3", s.key, null_expected);
      std::vector<double> row(p, 0.0);
      std::vector<double> col(p, 0.0);
      for (std::uint64_t u = 0; u < p; ++u) {
        for (std::uint64_t v = 0; v < p; ++v) {
          const auto c = static_cast<double>(s.pair_counts[u * p + v]);
          row[u] += c;
          col[v] += c;
        }
      }
      std::uint64_t live_rows = 0;
      std::uint64_t live_cols = 0;
      for (std::uint64_t u = 0; u < p; ++u) live_rows += row[u] > 0;
      for (std::uint64_t v = 0; v < p; ++v) live_cols += col[v] > 0;
      double chi = 0;
      for (std::uint64_t u = 0; u < p; ++u) {
        if (row[u] == 0) continue;
        for (std::uint64_t v = 0; v < p; ++v) {
          if (col[v] == 0) continue;
          const double e = row[u] * col[v] / n;
          const double d = static_cast<double>(s.pair_counts[u * p + v]) - e;
          chi += d * d / e;
        }
      }
      if (live_rows < 2 || live_cols < 2) {
        // With enough trials every tuple of a uniform sampler shows up; a
        // margin stuck on one tuple is a failure, not a test to run.
        combined.add(s.key, chi, 0, 0.0);
        continue;
      }
      const double df = static_cast<double>((live_rows - 1) * (live_cols - 1));
      combined.add(s.key, chi, df, chi_square_p_value(chi, df));
    } else {
      const double cells = static_cast<double>(p * (p - 1));
      const double e = n / cells;
      if (e < kMinExpected) underpowered("StRS_3", s.key, e);
      double chi = 0;
      bool diagonal_hit = false;
      for (std::uint64_t u = 0; u < p; ++u) {
        for (std::uint64_t v = 0; v < p; ++v) {
          const auto c = static_cast<double>(s.pair_counts[u * p + v]);
          if (u == v) {
            diagonal_hit = diagonal_hit || c > 0;
            continue;
          }
          chi += (c - e) * (c - e) / e;
        }
      }
      const double df = cells - 1;
      combined.add(s.key, chi, df, diagonal_hit ? 0.0 : chi_square_p_value(chi, df));
    }
  }
  std::string note = std::to_string(vacuous) + " strata vacuous";
  if (skipped) note += ", " + std::to_string(skipped) + " strata too large for pair counts";
  return combined.finish("StRS_3", stats, alpha, note);
}

double pearson_variance(const std::vector<double>& p, double n) {
  double inv_sum = 0;
  for (double pi : p) inv_sum += 1.0 / pi;
  const auto k = static_cast<double>(p.size());
  return 2 * (k - 1) + (inv_sum - k * k - 2 * k + 2) / n;
}

TestReport check_multinomial(const TrialStatistics& stats, double alpha) {
  TestReport r;
  r.criterion = "multinomial";
  r.subject = stats.subject;
  r.alpha = alpha;
  const std::size_t k = stats.strata.size();
  double join = 0;
  for (const auto& s : stats.strata) join += static_cast<double>(s.join_tuples());
  if (k < 2 || join == 0) {
    r.note = "fewer than two joinable strata; vacuous";
    return r;
  }
  std::vector<double> p(k);
  for (std::size_t i = 0; i < k; ++i) {
    p[i] = static_cast<double>(stats.strata[i].join_tuples()) / join;
  }
  // Sample size per trial; constant for a simple random sample of the join.
  double n = 0;
  for (std::size_t i = 0; i < k; ++i) n += stats.count(0, i);
  if (n == 0) {
    r.note = "empty samples; vacuous";
    return r;
  }
  const auto trials = static_cast<double>(stats.trials);

  // Pooled goodness of fit.
  std::vector<double> pooled(k, 0.0);
  for (std::uint64_t t = 0; t < stats.trials; ++t) {
    for (std::size_t i = 0; i < k; ++i) pooled[i] += stats.count(t, i);
  }
  double gof = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = trials * n * p[i];
    if (e < kMinExpected) underpowered("multinomial", stats.strata[i].key, e);
    gof += (pooled[i] - e) * (pooled[i] - e) / e;
  }
  const double gof_df = static_cast<double>(k - 1);
  const double gof_p = chi_square_p_value(gof, gof_df);

  // Dispersion of the per-trial Pearson statistics around their known mean.
  double dispersion = 0;
  for (std::uint64_t t = 0; t < stats.trials; ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      const double e = n * p[i];
      const double d = stats.count(t, i) - e;
      dispersion += d * d / e;
    }
  }
  const double mean = static_cast<double>(k) - 1;
  const double var = pearson_variance(p, n);
  const double z = (dispersion - trials * mean) / std::sqrt(trials * var);
  const double dispersion_p = std::erfc(std::abs(z) / std::sqrt(2.0));

  r.statistic = gof;
  r.degrees_of_freedom = gof_df;
  r.p_value = std::min(1.0, 2 * std::min(gof_p, dispersion_p));
  r.pass = r.p_value >= alpha;
  std::ostringstream os;
  os << "pooled chi-square p=" << gof_p << ", dispersion z=" << z
     << " p=" << dispersion_p << "; Bonferroni over 2 tests";
  r.note = os.str();
  return r;
}

}  // namespace stratjoin
