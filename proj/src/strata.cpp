#include "stratjoin/strata.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "stratjoin/error.h"

namespace stratjoin {

std::string Key::to_string() const {
  if (is_integer()) return std::to_string(as_integer());
  return as_string();
}

std::size_t Key::hash() const {
  if (is_integer()) return std::hash<std::int64_t>{}(as_integer());
  return std::hash<std::string>{}(as_string()) ^ 0x9e3779b97f4a7c15ULL;
}

std::strong_ordering operator<=>(const Key& a, const Key& b) {
  if (a.is_integer() != b.is_integer()) {
    return a.is_integer() ? std::strong_ordering::less
                          : std::strong_ordering::greater;
  }
  if (a.is_integer()) return a.as_integer() <=> b.as_integer();
  return a.as_string().compare(b.as_string()) <=> 0;
}

StratifiedRelation::StratifiedRelation(std::string name,
                                       std::vector<std::string> header,
                                       std::size_t key_column,
                                       std::vector<Tuple> tuples,
                                       std::size_t rejected_rows)
    : name_(std::move(name)),
      header_(std::move(header)),
      key_column_(key_column),
      tuples_(std::move(tuples)),
      rejected_rows_(rejected_rows) {
  for (std::size_t i = 0; i < tuples_.size(); ++i) {
    tuples_[i].id = static_cast<TupleId>(i);
    index_[tuples_[i].key].push_back(static_cast<TupleId>(i));
  }
  sorted_keys_.reserve(index_.size());
  for (const auto& [key, ids] : index_) sorted_keys_.push_back(key);
  std::sort(sorted_keys_.begin(), sorted_keys_.end());
}

StratifiedRelation StratifiedRelation::from_counts(
    std::string name, const std::vector<std::pair<Key, std::uint64_t>>& counts) {
  std::vector<Tuple> tuples;
  std::uint64_t total = 0;
  for (const auto& [key, n] : counts) total += n;
  tuples.reserve(total);
  auto sorted = counts;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [key, n] : sorted) {
    for (std::uint64_t i = 0; i < n; ++i) {
      Tuple t;
      t.key = key;
      t.fields = {std::to_string(tuples.size()), key.to_string()};
      tuples.push_back(std::move(t));
    }
  }
  return StratifiedRelation(std::move(name), {"RID", "JoinKey"}, 1,
                            std::move(tuples));
}

std::span<const TupleId> StratifiedRelation::stratum(const Key& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return {};
  return it->second;
}

namespace {

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool is_null(const std::string& v) { return v.empty() || v == "NULL"; }

bool parse_int64(const std::string& s, std::int64_t& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') return false;  // keep round-trip exact
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

StratifiedRelation ingest(std::istream& in, std::string name,
                          const std::string& join_column, char delimiter) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::kEmptyRelation, "relation '" + name + "' is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split(line, delimiter);
  auto col = std::find(header.begin(), header.end(), join_column);
  if (col == header.end()) {
    throw Error(ErrorKind::kSchema, "relation '" + name +
                                        "' has no column named '" +
                                        join_column + "'");
  }
  const std::size_t key_column = col - header.begin();

  std::vector<std::vector<std::string>> rows;
  std::size_t rejected = 0;
  std::size_t data_rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && header.size() > 1) continue;
    ++data_rows;
    auto fields = split(line, delimiter);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::kSchema,
                  "relation '" + name + "' line " + std::to_string(line_no) +
                      ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    if (is_null(fields[key_column])) {
      ++rejected;
      continue;
    }
    rows.push_back(std::move(fields));
  }
  if (data_rows == 0) {
    throw Error(ErrorKind::kEmptyRelation,
                "relation '" + name + "' has no data rows");
  }

  bool all_integer = true;
  std::int64_t scratch = 0;
  for (const auto& r : rows) {
    if (!parse_int64(r[key_column], scratch)) {
      all_integer = false;
      break;
    }
  }

  std::vector<Tuple> tuples;
  tuples.reserve(rows.size());
  for (auto& r : rows) {
    Tuple t;
    if (all_integer) {
      parse_int64(r[key_column], scratch);
      t.key = Key(scratch);
    } else {
      t.key = Key(r[key_column]);
    }
    t.fields = std::move(r);
    tuples.push_back(std::move(t));
  }
  return StratifiedRelation(std::move(name), std::move(header), key_column,
                            std::move(tuples), rejected);
}

StratifiedRelation ingest(const std::filesystem::path& path,
                          const std::string& join_column, char delimiter) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  }
  return ingest(in, path.stem().string(), join_column, delimiter);
}

void emit(const StratifiedRelation& rel, std::ostream& out, char delimiter) {
  auto write_row = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << delimiter;
      out << fields[i];
    }
    out << '\n';
  };
  write_row(rel.header());
  for (const auto& t : rel.tuples()) write_row(t.fields);
}

void emit(const StratifiedRelation& rel, const std::filesystem::path& path,
          char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  emit(rel, out, delimiter);
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

StrataProfile StrataProfile::from_counts(
    const std::vector<std::pair<Key, StratumCounts>>& counts) {
  StrataProfile p;
  for (const auto& [key, c] : counts) {
    if (c.left == 0 && c.right == 0) continue;
    auto& slot = p.strata[key];
    slot.left += c.left;
    slot.right += c.right;
  }
  for (const auto& [key, c] : p.strata) {
    p.left_cardinality += c.left;
    p.right_cardinality += c.right;
    p.join_cardinality += c.left * c.right;
  }
  return p;
}

StrataProfile profile(const StratifiedRelation& r1, const StratifiedRelation& r2) {
  StrataProfile p;
  for (const auto& key : r1.keys()) p.strata[key].left = r1.count(key);
  for (const auto& key : r2.keys()) p.strata[key].right = r2.count(key);
  p.left_cardinality = r1.cardinality();
  p.right_cardinality = r2.cardinality();
  for (const auto& [key, c] : p.strata) p.join_cardinality += c.left * c.right;
  return p;
}

std::vector<Key> common_strata(const StrataProfile& profile) {
  std::vector<Key> out;
  for (const auto& [key, c] : profile.strata) {
    if (c.left > 0 && c.right > 0) out.push_back(key);
  }
  return out;
}

}  // namespace stratjoin
