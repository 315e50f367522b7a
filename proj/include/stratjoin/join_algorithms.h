#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stratjoin/mini_join.h"
#include "stratjoin/sampler.h"
#include "stratjoin/strata.h"

namespace stratjoin {

/// Join sampling rate f in (0, 1], held as an exact fraction so that gate
/// tests (f * m < 1) and per-stratum targets are computed without floating
/// point error.
class SamplingRate {
 public:
  /// Nearest fraction with denominator 10^12, reduced.
  explicit SamplingRate(double f);
  static SamplingRate from_ratio(std::uint64_t numerator, std::uint64_t denominator);
  /// Parses a plain decimal ("0.1") or a fraction ("1/3"); exponents are rejected.
  static SamplingRate parse(std::string_view text);

  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::uint64_t numerator() const { return num_; }
  std::uint64_t denominator() const { return den_; }

  /// f * m < 1.
  bool scaled_below_one(std::uint64_t m) const;
  /// round(f * a * b), halves rounded away from zero.
  std::uint64_t rounded(std::uint64_t a, std::uint64_t b = 1) const;
  /// f * a * b is an integer.
  bool integral(std::uint64_t a, std::uint64_t b = 1) const;

  friend bool operator==(const SamplingRate&, const SamplingRate&) = default;

 private:
  SamplingRate(std::uint64_t num, std::uint64_t den);
  std::uint64_t num_ = 1;
  std::uint64_t den_ = 1;
};

enum class Strategy { kSampleNeither, kSampleLeft, kSampleRight, kSampleBoth, kFkPk };

std::string_view to_string(Strategy s);

struct StratumPlan {
  Key key;
  std::uint64_t m1 = 0;
  std::uint64_t m2 = 0;
  Strategy strategy = Strategy::kSampleNeither;
  std::uint64_t target = 0;  // n(a)
  std::uint64_t left_input = 0;
  std::uint64_t right_input = 0;
  bool zero_target = false;  // joinable stratum whose target rounds to 0

  bool left_sampled() const {
    return strategy == Strategy::kSampleLeft || strategy == Strategy::kSampleBoth ||
           strategy == Strategy::kFkPk;
  }
  bool right_sampled() const {
    return strategy == Strategy::kSampleRight || strategy == Strategy::kSampleBoth;
  }
};

/// The rounded-target form of the gate, round(f*m1*m2) < m_i, agrees with
/// the strict gate f*m_other < 1 for every sampled side.
bool gate_consistent(const StratumPlan& stratum);

struct SamplePlan {
  SamplingRate rate{1.0};
  std::vector<StratumPlan> strata;  // sorted by key

  std::uint64_t left_total() const;
  std::uint64_t right_total() const;
  std::uint64_t total() const { return left_total() + right_total(); }
  std::uint64_t target_total() const;
  /// Joinable strata where at least one side is sampled.
  std::uint64_t sampled_strata() const;
  std::uint64_t joinable_strata() const;
};

struct StratumAccount {
  Key key;
  std::uint64_t left = 0;
  std::uint64_t right = 0;
};

/// Tuples from each relation that have entered the join when the first output
/// tuple is emitted. Unsampled sides are charged in full.
struct SizeAccount {
  std::uint64_t left = 0;
  std::uint64_t right = 0;
  std::uint64_t no_sampling = 0;  // |R1| + |R2|
  std::vector<StratumAccount> strata;

  std::uint64_t total() const { return left + right; }
  std::int64_t savings() const {
    return static_cast<std::int64_t>(no_sampling) - static_cast<std::int64_t>(total());
  }
};

enum class Algorithm {
  kSimplifiedAqua,
  kStreamSample,
  kSrsBoth,
  kStratJoin1n,
  kStratJoinNn,
  kStratJoinBoth,
  kStratJoinOverall,
};

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
const std::vector<Algorithm>& all_algorithms();

struct JoinRun {
  JoinSample sample;
  SizeAccount account;
  std::optional<StrataDraws> left_sample;   // algorithms that materialize S1
  std::optional<StrataDraws> right_sample;  // and S2
  std::optional<SamplePlan> plan;
};

/// Output materialization limit; larger targets raise a capacity error.
inline constexpr std::uint64_t kMaxMaterializedTuples = 50'000'000;

/// SRS without replacement of round(f*|R_fk|) foreign-key tuples, each joined
/// with its primary-key partner.
JoinRun simplified_aqua(const StratifiedRelation& r_fk, const StratifiedRelation& r_pk,
                        const SamplingRate& f, const RngHandle& rng);

/// With-replacement SRS of the join: R1 tuples drawn with weight m2(t.A),
/// each joined with a uniform partner from its R2 stratum.
JoinRun stream_sample(const StratifiedRelation& r1, const StratifiedRelation& r2,
                      const SamplingRate& f, const RngHandle& rng);

/// stream_sample with the R2 partners materialized into S2 first, then
/// consumed in insertion order. Same rng streams give the same output.
JoinRun srs_both(const StratifiedRelation& r1, const StratifiedRelation& r2,
                 const SamplingRate& f, const RngHandle& rng);

/// Per-stratum SRS without replacement of round(f*m1(a)) foreign-key tuples.
JoinRun stratjoin_1n(const StratifiedRelation& r1_fk, const StratifiedRelation& r2_pk,
                     const SamplingRate& f, const RngHandle& rng);

/// Per stratum, round(f*m1*m2) with-replacement draws from R1, each joined
/// with a uniform partner from the R2 stratum.
JoinRun stratjoin_nn(const StratifiedRelation& r1, const StratifiedRelation& r2,
                     const SamplingRate& f, const RngHandle& rng);

/// Both sides draw round(f*m1*m2) per stratum with replacement, then
/// mini_join.
JoinRun stratjoin_both(const StratifiedRelation& r1, const StratifiedRelation& r2,
                       const SamplingRate& f, const RngHandle& rng);

/// Per stratum: side i is sampled iff f * m_other(a) < 1. Sampled sides get
/// round(f*m1*m2) inputs, unsampled sides the full stratum.
SamplePlan plan_overall(const StrataProfile& profile, const SamplingRate& f);

/// Plan record for the foreign-key/primary-key variant.
SamplePlan plan_1n(const StrataProfile& profile, const SamplingRate& f);

JoinRun stratjoin_overall(const StratifiedRelation& r1, const StratifiedRelation& r2,
                          const SamplingRate& f, const RngHandle& rng);

JoinRun run_algorithm(Algorithm algorithm, const StratifiedRelation& r1,
                      const StratifiedRelation& r2, const SamplingRate& f,
                      const RngHandle& rng);

/// Tuples saved by the gated plan:
/// sum over both relations and all strata of max(m_i - f*m1*m2, 0).
double savings(const StrataProfile& profile, const SamplingRate& f);

/// Accounts computed from counts alone, without executing the sampling.
/// The totals are exactly what an execution reports.
SizeAccount overall_account(const StrataProfile& profile, const SamplingRate& f);
SizeAccount stream_sample_account(const StrataProfile& profile, const SamplingRate& f);
SizeAccount srs_both_account(const StrataProfile& profile, const SamplingRate& f);

struct ExpectedStratumAccount {
  Key key;
  double left = 0;
  double right = 0;
  double total() const { return left + right; }
};

/// Mean per-stratum account of an algorithm. For the stratified algorithms
/// this is the deterministic account; for stream_sample and srs_both it is
/// the expectation f*m1*m2 of the multinomial stratum counts.
std::vector<ExpectedStratumAccount> expected_stratum_accounts(
    Algorithm algorithm, const StrataProfile& profile, const SamplingRate& f);

}  // namespace stratjoin
