#include "stratjoin/join_algorithms.h"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <numeric>

#include "stratjoin/error.h"

namespace stratjoin {

using u128 = unsigned __int128;

// ---------------------------------------------------------------------------
// SamplingRate

SamplingRate::SamplingRate(std::uint64_t num, std::uint64_t den) {
  if (den == 0 || num == 0 || num > den) {
    throw Error(ErrorKind::kInvalidArgument,
                "sampling rate must lie in (0, 1], got " + std::to_string(num) +
                    "/" + std::to_string(den));
  }
  const std::uint64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

SamplingRate::SamplingRate(double f) {
  if (!(f > 0) || !(f <= 1)) {
    throw Error(ErrorKind::kInvalidArgument,
                "sampling rate must lie in (0, 1], got " + std::to_string(f));
  }
  constexpr std::uint64_t kDen = 1'000'000'000'000ULL;
  auto num = static_cast<std::uint64_t>(std::llround(f * static_cast<double>(kDen)));
  if (num == 0) num = 1;
  *this = SamplingRate(num, kDen);
}

SamplingRate SamplingRate::from_ratio(std::uint64_t numerator,
                                      std::uint64_t denominator) {
  return SamplingRate(numerator, denominator);
}

SamplingRate SamplingRate::parse(std::string_view text) {
  auto fail = [&]() -> SamplingRate {
    throw Error(ErrorKind::kInvalidArgument,
                "invalid sampling rate '" + std::string(text) + "'");
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    std::uint64_t n = 0;
    std::uint64_t d = 0;
    const auto lhs = text.substr(0, slash);
    const auto rhs = text.substr(slash + 1);
    const auto a = std::from_chars(lhs.data(), lhs.data() + lhs.size(), n);
    const auto b = std::from_chars(rhs.data(), rhs.data() + rhs.size(), d);
    if (lhs.empty() || rhs.empty() || a.ec != std::errc() || b.ec != std::errc() ||
        a.ptr != lhs.data() + lhs.size() || b.ptr != rhs.data() + rhs.size()) {
      return fail();
    }
    return from_ratio(n, d);
  }
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  bool seen_point = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) return fail();
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      seen_digit = true;
      if (num > 100'000'000'000'000ULL || den > 100'000'000'000'000ULL) return fail();
      num = num * 10 + static_cast<std::uint64_t>(c - '0');
      if (seen_point) den *= 10;
    } else {
      return fail();
    }
  }
  if (!seen_digit) return fail();
  return SamplingRate(num, den);
}

bool SamplingRate::scaled_below_one(std::uint64_t m) const {
  return static_cast<u128>(num_) * m < den_;
}

std::uint64_t SamplingRate::rounded(std::uint64_t a, std::uint64_t b) const {
  const u128 x = static_cast<u128>(num_) * a * b;
  const u128 q = x / den_;
  const u128 r = x % den_;
  return static_cast<std::uint64_t>(2 * r >= den_ ? q + 1 : q);
}

bool SamplingRate::integral(std::uint64_t a, std::uint64_t b) const {
  return (static_cast<u128>(num_) * a * b) % den_ == 0;
}

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kSampleNeither: return "SAMPLE_NEITHER";
    case Strategy::kSampleLeft: return "SAMPLE_LEFT";
    case Strategy::kSampleRight: return "SAMPLE_RIGHT";
    case Strategy::kSampleBoth: return "SAMPLE_BOTH";
    case Strategy::kFkPk: return "FK_PK";
  }
  return "?";
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kSimplifiedAqua: return "simplified_aqua";
    case Algorithm::kStreamSample: return "stream_sample";
    case Algorithm::kSrsBoth: return "srs_both";
    case Algorithm::kStratJoin1n: return "stratjoin_1n";
    case Algorithm::kStratJoinNn: return "stratjoin_nn";
    case Algorithm::kStratJoinBoth: return "stratjoin_both";
    case Algorithm::kStratJoinOverall: return "stratjoin_overall";
  }
  return "?";
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all = {
      Algorithm::kSimplifiedAqua, Algorithm::kStreamSample,
      Algorithm::kSrsBoth,        Algorithm::kStratJoin1n,
      Algorithm::kStratJoinNn,    Algorithm::kStratJoinBoth,
      Algorithm::kStratJoinOverall};
  return all;
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : all_algorithms()) {
    if (to_string(a) == name) return a;
  }
  throw Error(ErrorKind::kInvalidArgument,
              "unknown algorithm '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Plans

bool gate_consistent(const StratumPlan& s) {
  if (s.m1 == 0 || s.m2 == 0) return true;
  if (s.strategy == Strategy::kFkPk) return true;
  const bool left_by_target = s.target < s.m1;
  const bool right_by_target = s.target < s.m2;
  return left_by_target == s.left_sampled() && right_by_target == s.right_sampled();
}

std::uint64_t SamplePlan::left_total() const {
  std::uint64_t n = 0;
  for (const auto& s : strata) n += s.left_input;
  return n;
}

std::uint64_t SamplePlan::right_total() const {
  std::uint64_t n = 0;
  for (const auto& s : strata) n += s.right_input;
  return n;
}

std::uint64_t SamplePlan::target_total() const {
  std::uint64_t n = 0;
  for (const auto& s : strata) n += s.target;
  return n;
}

std::uint64_t SamplePlan::sampled_strata() const {
  std::uint64_t n = 0;
  for (const auto& s : strata) {
    if (s.m1 > 0 && s.m2 > 0 && (s.left_sampled() || s.right_sampled())) ++n;
  }
  return n;
}

std::uint64_t SamplePlan::joinable_strata() const {
  std::uint64_t n = 0;
  for (const auto& s : strata) n += (s.m1 > 0 && s.m2 > 0) ? 1 : 0;
  return n;
}

SamplePlan plan_overall(const StrataProfile& profile, const SamplingRate& f) {
  SamplePlan plan;
  plan.rate = f;
  plan.strata.reserve(profile.strata.size());
  for (const auto& [key, c] : profile.strata) {
    StratumPlan s;
    s.key = key;
    s.m1 = c.left;
    s.m2 = c.right;
    const bool sample_left = f.scaled_below_one(c.right);
    const bool sample_right = f.scaled_below_one(c.left);
    if (sample_left && sample_right) {
      s.strategy = Strategy::kSampleBoth;
    } else if (sample_left) {
      s.strategy = Strategy::kSampleLeft;
    } else if (sample_right) {
      s.strategy = Strategy::kSampleRight;
    } else {
      s.strategy = Strategy::kSampleNeither;
    }
    s.target = f.rounded(c.left, c.right);
    s.left_input = sample_left ? s.target : c.left;
    s.right_input = sample_right ? s.target : c.right;
    s.zero_target = c.left > 0 && c.right > 0 && s.target == 0;
    plan.strata.push_back(std::move(s));
  }
  return plan;
}

SamplePlan plan_1n(const StrataProfile& profile, const SamplingRate& f) {
  SamplePlan plan;
  plan.rate = f;
  for (const auto& [key, c] : profile.strata) {
    StratumPlan s;
    s.key = key;
    s.m1 = c.left;
    s.m2 = c.right;
    s.strategy = Strategy::kFkPk;
    s.target = c.right > 0 ? f.rounded(c.left) : 0;
    s.left_input = s.target;
    s.right_input = 0;
    s.zero_target = c.left > 0 && c.right > 0 && s.target == 0;
    plan.strata.push_back(std::move(s));
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Execution helpers

namespace {

std::string left_label(const StratifiedRelation& r) { return "left:" + r.name(); }
std::string right_label(const StratifiedRelation& r) { return "right:" + r.name(); }

void check_materializable(std::uint64_t n) {
  if (n > kMaxMaterializedTuples) {
    throw Error(ErrorKind::kCapacity,
                "sample of " + std::to_string(n) +
                    " joined tuples exceeds the materialization limit of " +
                    std::to_string(kMaxMaterializedTuples));
  }
}

void validate_fk_pk(const StratifiedRelation& r_fk, const StratifiedRelation& r_pk) {
  for (const auto& key : r_pk.keys()) {
    if (r_pk.count(key) != 1) {
      throw Error(ErrorKind::kConstraint,
                  "primary-key relation '" + r_pk.name() + "' has " +
                      std::to_string(r_pk.count(key)) + " tuples with key " +
                      key.to_string());
    }
  }
  for (const auto& key : r_fk.keys()) {
    if (!r_pk.contains(key)) {
      throw Error(ErrorKind::kConstraint,
                  "foreign key " + key.to_string() + " in '" + r_fk.name() +
                      "' has no match in '" + r_pk.name() + "'");
    }
  }
}

// Every joinable stratum gets an entry, even when it receives no tuples.
JoinSample empty_sample_over(const StrataProfile& profile) {
  JoinSample s;
  for (const auto& key : common_strata(profile)) s.strata[key];
  return s;
}

std::vector<StratumAccount> stratum_accounts_from_plan(const SamplePlan& plan) {
  std::vector<StratumAccount> out;
  out.reserve(plan.strata.size());
  for (const auto& s : plan.strata) {
    out.push_back(StratumAccount{s.key, s.left_input, s.right_input});
  }
  return out;
}

SizeAccount account_from_plan(const StrataProfile& profile, const SamplePlan& plan) {
  SizeAccount a;
  a.left = plan.left_total();
  a.right = plan.right_total();
  a.no_sampling = profile.left_cardinality + profile.right_cardinality;
  a.strata = stratum_accounts_from_plan(plan);
  return a;
}

// Per-stratum left counts of a stream of S1 draws, right charged in full.
SizeAccount stream_account(const StrataProfile& profile, const JoinSample& sample) {
  SizeAccount a;
  a.no_sampling = profile.left_cardinality + profile.right_cardinality;
  for (const auto& [key, c] : profile.strata) {
    StratumAccount sa{key, sample.count(key), c.right};
    a.left += sa.left;
    a.right += sa.right;
    a.strata.push_back(std::move(sa));
  }
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Algorithms

JoinRun simplified_aqua(const StratifiedRelation& r_fk, const StratifiedRelation& r_pk,
                        const SamplingRate& f, const RngHandle& rng) {
  validate_fk_pk(r_fk, r_pk);
  const auto prof = profile(r_fk, r_pk);
  const std::uint64_t n = f.rounded(r_fk.cardinality());
  check_materializable(n);

  std::vector<TupleId> population(r_fk.cardinality());
  std::iota(population.begin(), population.end(), TupleId{0});
  RngHandle stream = rng.derive(left_label(r_fk));
  const DrawSet drawn = draw_without_replacement(population, n, stream);

  JoinRun run;
  run.sample = empty_sample_over(prof);
  for (TupleId id : drawn.tuple_ids) {
    const Key& key = r_fk.tuple(id).key;
    run.sample.strata[key].push_back(JoinedTuple{key, id, r_pk.stratum(key)[0]});
  }
  run.account.left = n;
  run.account.right = r_pk.cardinality();
  run.account.no_sampling = prof.left_cardinality + prof.right_cardinality;
  for (const auto& [key, c] : prof.strata) {
    run.account.strata.push_back(StratumAccount{key, run.sample.count(key), c.right});
  }
  return run;
}

namespace {

// Shared first phase of stream_sample and srs_both: weighted S1 draws and the
// stream of uniform R2 partners, in S1 order.
struct StreamDraws {
  DrawSet s1;
  std::vector<TupleId> partners;
};

StreamDraws draw_stream(const StratifiedRelation& r1, const StratifiedRelation& r2,
                        std::uint64_t n, const RngHandle& rng) {
  StreamDraws out;
  RngHandle left_stream = rng.derive(left_label(r1));
  out.s1 = draw_weighted_with_replacement(
      r1, [&](const Key& k) { return static_cast<double>(r2.count(k)); }, n,
      left_stream);
  RngHandle right_stream = rng.derive(right_label(r2));
  out.partners.reserve(n);
  for (TupleId id : out.s1.tuple_ids) {
    const auto stratum = r2.stratum(r1.tuple(id).key);
    out.partners.push_back(stratum[right_stream.uniform_index(stratum.size())]);
  }
  return out;
}

}  // namespace

JoinRun stream_sample(const StratifiedRelation& r1, const StratifiedRelation& r2,
                      const SamplingRate& f, const RngHandle& rng) {
  const auto prof = profile(r1, r2);
  JoinRun run;
  run.sample = empty_sample_over(prof);
  if (prof.join_cardinality == 0) {
    run.account.no_sampling = prof.left_cardinality + prof.right_cardinality;
    return run;
  }
  const std::uint64_t n = f.rounded(prof.join_cardinality);
  check_materializable(n);
  const auto draws = draw_stream(r1, r2, n, rng);
  for (std::size_t i = 0; i < draws.s1.size(); ++i) {
    const TupleId left = draws.s1.tuple_ids[i];
    const Key& key = r1.tuple(left).key;
    run.sample.strata[key].push_back(JoinedTuple{key, left, draws.partners[i]});
  }
  run.account = stream_account(prof, run.sample);
  return run;
}

JoinRun srs_both(const StratifiedRelation& r1, const StratifiedRelation& r2,
                 const SamplingRate& f, const RngHandle& rng) {
  const auto prof = profile(r1, r2);
  JoinRun run;
  run.sample = empty_sample_over(prof);
  StrataDraws s1;
  StrataDraws s2;
  for (const auto& key : common_strata(prof)) {
    s1[key].with_replacement = true;
    s2[key].with_replacement = true;
  }
  if (prof.join_cardinality == 0) {
    run.account.no_sampling = prof.left_cardinality + prof.right_cardinality;
    run.left_sample = std::move(s1);
    run.right_sample = std::move(s2);
    return run;
  }
  const std::uint64_t n = f.rounded(prof.join_cardinality);
  check_materializable(n);
  const auto draws = draw_stream(r1, r2, n, rng);

  // Materialize S2 in insertion order.
  for (std::size_t i = 0; i < draws.s1.size(); ++i) {
    const Key& key = r1.tuple(draws.s1.tuple_ids[i]).key;
    s1[key].tuple_ids.push_back(draws.s1.tuple_ids[i]);
    s2[key].tuple_ids.push_back(draws.partners[i]);
  }
  // Replay S1 in the original order, consuming S2 per stratum in order.
  std::map<Key, std::size_t> cursor;
  for (TupleId left : draws.s1.tuple_ids) {
    const Key& key = r1.tuple(left).key;
    const std::size_t pos = cursor[key]++;
    run.sample.strata[key].push_back(JoinedTuple{key, left, s2[key].tuple_ids[pos]});
  }

  run.account.no_sampling = prof.left_cardinality + prof.right_cardinality;
  for (const auto& [key, c] : prof.strata) {
    auto it = s1.find(key);
    const std::uint64_t k = it == s1.end() ? 0 : it->second.size();
    run.account.strata.push_back(StratumAccount{key, k, k});
    run.account.left += k;
    run.account.right += k;
  }
  run.left_sample = std::move(s1);
  run.right_sample = std::move(s2);
  return run;
}

JoinRun stratjoin_1n(const StratifiedRelation& r1_fk, const StratifiedRelation& r2_pk,
                     const SamplingRate& f, const RngHandle& rng) {
  validate_fk_pk(r1_fk, r2_pk);
  const auto prof = profile(r1_fk, r2_pk);
  const SamplePlan plan = plan_1n(prof, f);
  check_materializable(plan.target_total());
  const std::string label = left_label(r1_fk);

  JoinRun run;
  run.sample = empty_sample_over(prof);
  for (const auto& s : plan.strata) {
    if (s.target == 0) continue;
    RngHandle stream = rng.derive(label, s.key);
    const DrawSet drawn = draw_without_replacement(r1_fk.stratum(s.key), s.target, stream);
    const TupleId pk = r2_pk.stratum(s.key)[0];
    auto& bucket = run.sample.strata[s.key];
    bucket.reserve(s.target);
    for (TupleId id : drawn.tuple_ids) bucket.push_back(JoinedTuple{s.key, id, pk});
  }
  run.account = account_from_plan(prof, plan);
  run.plan = plan;
  return run;
}

JoinRun stratjoin_nn(const StratifiedRelation& r1, const StratifiedRelation& r2,
                     const SamplingRate& f, const RngHandle& rng) {
  const auto prof = profile(r1, r2);
  const std::string llabel = left_label(r1);
  const std::string rlabel = right_label(r2);

  JoinRun run;
  run.sample = empty_sample_over(prof);
  std::uint64_t planned = 0;
  for (const auto& [key, c] : prof.strata) planned += f.rounded(c.left, c.right);
  check_materializable(planned);

  run.account.no_sampling = prof.left_cardinality + prof.right_cardinality;
  for (const auto& [key, c] : prof.strata) {
    const std::uint64_t target = f.rounded(c.left, c.right);
    run.account.strata.push_back(StratumAccount{key, target, c.right});
    run.account.left += target;
    run.account.right += c.right;
    if (target == 0) continue;
    RngHandle lstream = rng.derive(llabel, key);
    RngHandle rstream = rng.derive(rlabel, key);
    const DrawSet drawn = draw_with_replacement(r1.stratum(key), target, lstream);
    const auto partners = r2.stratum(key);
    auto& bucket = run.sample.strata[key];
    bucket.reserve(target);
    for (TupleId id : drawn.tuple_ids) {
      bucket.push_back(
          JoinedTuple{key, id, partners[rstream.uniform_index(partners.size())]});
    }
  }
  return run;
}

JoinRun stratjoin_both(const StratifiedRelation& r1, const StratifiedRelation& r2,
                       const SamplingRate& f, const RngHandle& rng) {
  const auto prof = profile(r1, r2);
  const std::string llabel = left_label(r1);
  const std::string rlabel = right_label(r2);

  std::uint64_t planned = 0;
  for (const auto& [key, c] : prof.strata) planned += f.rounded(c.left, c.right);
  check_materializable(planned);

  StrataDraws s1;
  StrataDraws s2;
  JoinRun run;
  run.account.no_sampling = prof.left_cardinality + prof.right_cardinality;
  for (const auto& [key, c] : prof.strata) {
    const std::uint64_t target = f.rounded(c.left, c.right);
    run.account.strata.push_back(StratumAccount{key, target, target});
    run.account.left += target;
    run.account.right += target;
    if (c.left == 0 || c.right == 0) continue;
    RngHandle lstream = rng.derive(llabel, key);
    RngHandle rstream = rng.derive(rlabel, key);
    s1[key] = draw_with_replacement(r1.stratum(key), target, lstream);
    s2[key] = draw_with_replacement(r2.stratum(key), target, rstream);
  }
  run.sample = mini_join(s1, s2, rng);
  run.left_sample = std::move(s1);
  run.right_sample = std::move(s2);
  return run;
}

JoinRun stratjoin_overall(const StratifiedRelation& r1, const StratifiedRelation& r2,
                          const SamplingRate& f, const RngHandle& rng) {
  const auto prof = profile(r1, r2);
  const SamplePlan plan = plan_overall(prof, f);
  check_materializable(plan.target_total());
  const std::string llabel = left_label(r1);
  const std::string rlabel = right_label(r2);

  JoinRun run;
  run.sample = empty_sample_over(prof);
  for (const auto& s : plan.strata) {
    if (s.target == 0) continue;
    const auto left = r1.stratum(s.key);
    const auto right = r2.stratum(s.key);
    RngHandle lstream = rng.derive(llabel, s.key);
    RngHandle rstream = rng.derive(rlabel, s.key);
    auto& bucket = run.sample.strata[s.key];
    bucket.reserve(s.target);
    switch (s.strategy) {
      case Strategy::kSampleNeither:
        // Independent uniform probes into both full strata; pairs may repeat.
        for (std::uint64_t i = 0; i < s.target; ++i) {
          const TupleId l = left[lstream.uniform_index(left.size())];
          const TupleId r = right[rstream.uniform_index(right.size())];
          bucket.push_back(JoinedTuple{s.key, l, r});
        }
        break;
      case Strategy::kSampleLeft: {
        const DrawSet drawn = draw_with_replacement(left, s.target, lstream);
        for (TupleId l : drawn.tuple_ids) {
          bucket.push_back(
              JoinedTuple{s.key, l, right[rstream.uniform_index(right.size())]});
        }
        break;
      }
      case Strategy::kSampleRight: {
        const DrawSet drawn = draw_with_replacement(right, s.target, rstream);
        for (TupleId r : drawn.tuple_ids) {
          bucket.push_back(
              JoinedTuple{s.key, left[lstream.uniform_index(left.size())], r});
        }
        break;
      }
      case Strategy::kSampleBoth: {
        StrataDraws s1{{s.key, draw_with_replacement(left, s.target, lstream)}};
        StrataDraws s2{{s.key, draw_with_replacement(right, s.target, rstream)}};
        bucket = std::move(mini_join(s1, s2, rng).strata[s.key]);
        break;
      }
      case Strategy::kFkPk:
        break;
    }
  }
  run.account = account_from_plan(prof, plan);
  run.plan = plan;
  return run;
}

JoinRun run_algorithm(Algorithm algorithm, const StratifiedRelation& r1,
                      const StratifiedRelation& r2, const SamplingRate& f,
                      const RngHandle& rng) {
  switch (algorithm) {
    case Algorithm::kSimplifiedAqua: return simplified_aqua(r1, r2, f, rng);
    case Algorithm::kStreamSample: return stream_sample(r1, r2, f, rng);
    case Algorithm::kSrsBoth: return srs_both(r1, r2, f, rng);
    case Algorithm::kStratJoin1n: return stratjoin_1n(r1, r2, f, rng);
    case Algorithm::kStratJoinNn: return stratjoin_nn(r1, r2, f, rng);
    case Algorithm::kStratJoinBoth: return stratjoin_both(r1, r2, f, rng);
    case Algorithm::kStratJoinOverall: return stratjoin_overall(r1, r2, f, rng);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown algorithm");
}

// ---------------------------------------------------------------------------
// Accounting from counts

double savings(const StrataProfile& profile, const SamplingRate& f) {
  // Exact numerator over the common denominator den.
  u128 saved = 0;
  const u128 den = f.denominator();
  for (const auto& [key, c] : profile.strata) {
    const u128 joined = static_cast<u128>(f.numerator()) * c.left * c.right;
    for (std::uint64_t m : {c.left, c.right}) {
      const u128 scaled = static_cast<u128>(m) * den;
      if (scaled > joined) saved += scaled - joined;
    }
  }
  const u128 whole = saved / den;
  const u128 frac = saved % den;
  return static_cast<double>(whole) +
         static_cast<double>(frac) / static_cast<double>(den);
}

SizeAccount overall_account(const StrataProfile& profile, const SamplingRate& f) {
  return account_from_plan(profile, plan_overall(profile, f));
}

SizeAccount stream_sample_account(const StrataProfile& profile, const SamplingRate& f) {
  SizeAccount a;
  a.no_sampling = profile.left_cardinality + profile.right_cardinality;
  if (profile.join_cardinality == 0) return a;
  a.left = f.rounded(profile.join_cardinality);
  a.right = profile.right_cardinality;
  return a;
}

SizeAccount srs_both_account(const StrataProfile& profile, const SamplingRate& f) {
  SizeAccount a;
  a.no_sampling = profile.left_cardinality + profile.right_cardinality;
  if (profile.join_cardinality == 0) return a;
  a.left = f.rounded(profile.join_cardinality);
  a.right = a.left;
  return a;
}

std::vector<ExpectedStratumAccount> expected_stratum_accounts(
    Algorithm algorithm, const StrataProfile& profile, const SamplingRate& f) {
  const double rate = static_cast<double>(f.numerator()) /
                      static_cast<double>(f.denominator());
  std::vector<ExpectedStratumAccount> out;
  if (algorithm == Algorithm::kStratJoinOverall || algorithm == Algorithm::kStratJoin1n) {
    const SamplePlan plan = algorithm == Algorithm::kStratJoinOverall
                                ? plan_overall(profile, f)
                                : plan_1n(profile, f);
    for (const auto& s : plan.strata) {
      out.push_back({s.key, static_cast<double>(s.left_input),
                     static_cast<double>(s.right_input)});
    }
    return out;
  }
  for (const auto& [key, c] : profile.strata) {
    const double m1 = static_cast<double>(c.left);
    const double m2 = static_cast<double>(c.right);
    // f*m1*m2 as an exact quotient where representable.
    const double joined = static_cast<double>(static_cast<long double>(f.numerator()) *
                                              c.left * c.right / f.denominator());
    switch (algorithm) {
      case Algorithm::kSimplifiedAqua:
        out.push_back({key, rate * m1, m2});
        break;
      case Algorithm::kStreamSample:
        out.push_back({key, joined, m2});
        break;
      case Algorithm::kSrsBoth:
        out.push_back({key, joined, joined});
        break;
      case Algorithm::kStratJoinNn:
        out.push_back({key, static_cast<double>(f.rounded(c.left, c.right)), m2});
        break;
      case Algorithm::kStratJoinBoth: {
        const auto t = static_cast<double>(f.rounded(c.left, c.right));
        out.push_back({key, t, t});
        break;
      }
      default:
        break;
    }
  }
  return out;
}

}  // namespace stratjoin
