#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "stratjoin/sampler.h"
#include "stratjoin/strata.h"

namespace stratjoin {

struct JoinedTuple {
  Key key;
  TupleId left_id = 0;
  TupleId right_id = 0;

  friend bool operator==(const JoinedTuple&, const JoinedTuple&) = default;
};

/// Joined output grouped by stratum, strata in sorted key order.
struct JoinSample {
  std::map<Key, std::vector<JoinedTuple>> strata;

  std::uint64_t count(const Key& key) const;
  std::uint64_t total() const;

  friend bool operator==(const JoinSample&, const JoinSample&) = default;
};

/// Per-stratum samples of one relation.
using StrataDraws = std::map<Key, DrawSet>;

/// Joins two per-stratum samples so that every sample position feeds at most
/// one output tuple. Stratum a yields min(|s1[a]|, |s2[a]|) tuples; the
/// surviving positions on each side are a uniform random subset and are paired
/// by a uniform random matching. Positions, not tuple ids, are matched, so
/// repeated ids from with-replacement draws count as distinct positions.
JoinSample mini_join(const StrataDraws& s1, const StrataDraws& s2,
                     const RngHandle& rng);

/// Writes one row per joined tuple: key, left id, right id, then the left and
/// right rows.
void write_join_sample(const JoinSample& sample, const StratifiedRelation& r1,
                       const StratifiedRelation& r2, std::ostream& out,
                       char delimiter = ',');

}  // namespace stratjoin
