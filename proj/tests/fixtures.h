#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stratjoin/join_algorithms.h"
#include "stratjoin/strata.h"

namespace stratjoin::testing {

using Counts = std::vector<std::pair<Key, std::uint64_t>>;

inline StratifiedRelation relation(const std::string& name, const Counts& counts) {
  return StratifiedRelation::from_counts(name, counts);
}

inline Key k(const char* s) { return Key(s); }
inline Key k(std::int64_t v) { return Key(v); }

/// One tuple per key of `fk`: a primary-key relation every foreign key of
/// `fk` references.
inline StratifiedRelation primary_keys_of(const StratifiedRelation& fk,
                                          const std::string& name) {
  Counts counts;
  for (const auto& key : fk.keys()) counts.emplace_back(key, 1);
  return relation(name, counts);
}

/// Small relation pairs whose strata have at most 64 join tuples, so every
/// per-tuple and per-pair counter is well populated at 40k trials.
struct Fixture {
  std::string name;
  Counts left;
  Counts right;
  SamplingRate f;
  SamplingRate f_1n;  // rate for the foreign-key/primary-key runs

  StratifiedRelation r1() const { return relation("R1", left); }
  StratifiedRelation r2() const { return relation("R2", right); }
  StratifiedRelation pk() const { return primary_keys_of(r1(), "PK"); }
};

inline std::vector<Fixture> randomness_fixtures() {
  using R = SamplingRate;
  return {
      {"F1", {{k("a"), 2}, {k("b"), 5}}, {{k("a"), 3}, {k("b"), 3}}, R::from_ratio(1, 3),
       R::from_ratio(1, 2)},
      {"F2", {{k(1), 1}, {k(2), 9}}, {{k(1), 9}, {k(2), 1}}, R::from_ratio(1, 3),
       R::from_ratio(1, 3)},
      {"F3", {{k("x"), 4}, {k("y"), 4}, {k("z"), 4}}, {{k("x"), 2}, {k("y"), 2}, {k("z"), 2}},
       R::from_ratio(1, 4), R::from_ratio(1, 2)},
      {"F4", {{k("p"), 3}, {k("q"), 3}}, {{k("p"), 3}, {k("q"), 2}}, R::from_ratio(1, 4),
       R::from_ratio(2, 3)},
      {"F5", {{k(1), 8}, {k(2), 2}, {k(3), 1}}, {{k(1), 8}, {k(2), 4}, {k(3), 6}},
       R::from_ratio(1, 8), R::from_ratio(1, 2)},
      {"F6", {{k("a"), 3}, {k("b"), 2}, {k("c"), 4}}, {{k("a"), 2}, {k("b"), 3}, {k("d"), 5}},
       R::from_ratio(1, 2), R::from_ratio(1, 2)},
  };
}

}  // namespace stratjoin::testing
