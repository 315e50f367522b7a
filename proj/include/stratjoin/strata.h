#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace stratjoin {

using TupleId = std::uint32_t;

/// Join-column value. A column whose non-null values all parse as 64-bit
/// integers is ingested as integer keys, otherwise as strings. Integer and
/// string keys never compare equal.
class Key {
 public:
  Key() = default;
  explicit Key(std::int64_t v) : value_(v) {}
  explicit Key(std::string v) : value_(std::move(v)) {}
  explicit Key(const char* v) : value_(std::string(v)) {}

  bool is_integer() const { return std::holds_alternative<std::int64_t>(value_); }
  std::int64_t as_integer() const { return std::get<std::int64_t>(value_); }
  const std::string& as_string() const { return std::get<std::string>(value_); }

  std::string to_string() const;
  std::size_t hash() const;

  friend bool operator==(const Key&, const Key&) = default;
  friend std::strong_ordering operator<=>(const Key& a, const Key& b);

 private:
  std::variant<std::int64_t, std::string> value_{std::int64_t{0}};
};

struct KeyHash {
  std::size_t operator()(const Key& k) const { return k.hash(); }
};

struct Tuple {
  TupleId id = 0;
  Key key;
  std::vector<std::string> fields;  // full row, join column included
};

/// Tuples grouped by join key with a hash index from key to tuple ids.
/// Immutable once constructed.
class StratifiedRelation {
 public:
  StratifiedRelation() = default;
  StratifiedRelation(std::string name, std::vector<std::string> header,
                     std::size_t key_column, std::vector<Tuple> tuples,
                     std::size_t rejected_rows = 0);

  /// Synthesizes a two-column relation (RID, JoinKey) with the given
  /// per-key stratum sizes, tuples laid out in key order.
  static StratifiedRelation from_counts(
      std::string name, const std::vector<std::pair<Key, std::uint64_t>>& counts);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& header() const { return header_; }
  std::size_t key_column() const { return key_column_; }
  const std::string& join_column() const { return header_.at(key_column_); }

  const std::vector<Tuple>& tuples() const { return tuples_; }
  const Tuple& tuple(TupleId id) const { return tuples_.at(id); }
  std::size_t cardinality() const { return tuples_.size(); }
  std::size_t rejected_rows() const { return rejected_rows_; }

  /// Tuple ids of the stratum, in ingestion order; empty if absent.
  std::span<const TupleId> stratum(const Key& key) const;
  std::uint64_t count(const Key& key) const { return stratum(key).size(); }
  bool contains(const Key& key) const { return index_.contains(key); }

  /// Present keys, sorted.
  const std::vector<Key>& keys() const { return sorted_keys_; }

 private:
  std::string name_;
  std::vector<std::string> header_;
  std::size_t key_column_ = 0;
  std::vector<Tuple> tuples_;
  std::size_t rejected_rows_ = 0;
  std::unordered_map<Key, std::vector<TupleId>, KeyHash> index_;
  std::vector<Key> sorted_keys_;
};

/// Reads a delimited file whose first row is a header. Rows with an empty or
/// NULL join value are dropped and counted in rejected_rows().
StratifiedRelation ingest(const std::filesystem::path& path,
                          const std::string& join_column, char delimiter = ',');
StratifiedRelation ingest(std::istream& in, std::string name,
                          const std::string& join_column, char delimiter = ',');

/// Writes the relation in the format ingest() reads.
void emit(const StratifiedRelation& rel, std::ostream& out, char delimiter = ',');
void emit(const StratifiedRelation& rel, const std::filesystem::path& path,
          char delimiter = ',');

struct StratumCounts {
  std::uint64_t left = 0;   // m1(a)
  std::uint64_t right = 0;  // m2(a)

  friend bool operator==(const StratumCounts&, const StratumCounts&) = default;
};

/// Per-key counts of two relations over the union of their keys.
struct StrataProfile {
  std::map<Key, StratumCounts> strata;
  std::uint64_t left_cardinality = 0;
  std::uint64_t right_cardinality = 0;
  std::uint64_t join_cardinality = 0;

  static StrataProfile from_counts(
      const std::vector<std::pair<Key, StratumCounts>>& counts);
};

StrataProfile profile(const StratifiedRelation& r1, const StratifiedRelation& r2);

/// Keys with nonzero count on both sides, sorted.
std::vector<Key> common_strata(const StrataProfile& profile);

}  // namespace stratjoin
