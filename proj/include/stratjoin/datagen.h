#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stratjoin/strata.h"

namespace stratjoin {

struct ZipfSpec {
  std::uint64_t n_tuples = 0;
  double z = 0;               // skew exponent
  std::uint64_t n_keys = 1;   // distinct join values
  std::uint64_t seed = 42;
};

/// Stratum sizes for keys 1..n_keys: proportional to rank^-z, rounded by
/// largest remainder so they sum to n_tuples exactly. Nonincreasing in rank.
std::vector<std::uint64_t> zipf_strata_sizes(const ZipfSpec& spec);

/// Relation with columns RID (sequential), JoinKey (rank of its stratum) and
/// Padding (seeded uniform 32-bit integer). Rows appear in a seeded random
/// key order.
StratifiedRelation generate(const ZipfSpec& spec, std::string name = "zipf");

}  // namespace stratjoin
