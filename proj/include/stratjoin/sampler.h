#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "stratjoin/strata.h"

namespace stratjoin {

/// Counter-based SplitMix64 stream. Output i of a stream is
/// mix64(origin + (i + 1) * golden_gamma), so a stream is fully determined by
/// its origin. Child streams are derived from the origin and a label, never
/// from the current position, which keeps derivation independent of how many
/// values the parent has produced.
///
/// Not shareable across threads; derive one handle per worker.
class RngHandle {
 public:
  explicit RngHandle(std::uint64_t master_seed = 42);

  RngHandle derive(std::string_view label) const;
  RngHandle derive(std::uint64_t index) const;
  /// Substream for one stratum of one relation.
  RngHandle derive(std::string_view relation, const Key& key) const;

  std::uint64_t next();
  /// Unbiased integer in [0, n); n > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Uniform real in [0, 1) with 53 random bits.
  double uniform_real();

  std::uint64_t origin() const { return origin_; }
  std::uint64_t position() const { return counter_; }

 private:
  static RngHandle from_origin(std::uint64_t origin);

  std::uint64_t origin_ = 0;
  std::uint64_t counter_ = 0;
};

struct DrawSet {
  std::vector<TupleId> tuple_ids;
  bool with_replacement = false;

  std::size_t size() const { return tuple_ids.size(); }
  friend bool operator==(const DrawSet&, const DrawSet&) = default;
};

/// n distinct ids, every n-subset equally likely, in random order.
DrawSet draw_without_replacement(std::span<const TupleId> population,
                                 std::uint64_t n, RngHandle& rng);

/// n independent uniform picks.
DrawSet draw_with_replacement(std::span<const TupleId> population,
                              std::uint64_t n, RngHandle& rng);

using KeyWeight = std::function<double(const Key&)>;

/// n independent picks where tuple t has probability
/// weight_of(t.key) / sum of weights over all tuples. The key is picked by
/// cumulative key-level weight, then a tuple uniformly within the key. Integral
/// weights take an exact integer path.
DrawSet draw_weighted_with_replacement(const StratifiedRelation& relation,
                                       const KeyWeight& weight_of,
                                       std::uint64_t n, RngHandle& rng);

}  // namespace stratjoin
