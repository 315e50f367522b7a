#include "stratjoin/mini_join.h"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace stratjoin {

std::uint64_t JoinSample::count(const Key& key) const {
  auto it = strata.find(key);
  return it == strata.end() ? 0 : it->second.size();
}

std::uint64_t JoinSample::total() const {
  std::uint64_t n = 0;
  for (const auto& [key, tuples] : strata) n += tuples.size();
  return n;
}

namespace {

// First n entries become a uniform random n-subset of [0, size) in uniform
// random order.
std::vector<std::size_t> random_positions(std::size_t size, std::size_t n,
                                          RngHandle& rng) {
  std::vector<std::size_t> pos(size);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(pos[i], pos[i + rng.uniform_index(size - i)]);
  }
  pos.resize(n);
  return pos;
}

}  // namespace

JoinSample mini_join(const StrataDraws& s1, const StrataDraws& s2,
                     const RngHandle& rng) {
  JoinSample out;
  for (const auto& [key, left] : s1) {
    auto it = s2.find(key);
    if (it == s2.end()) continue;
    const DrawSet& right = it->second;
    const std::size_t n = std::min(left.size(), right.size());
    RngHandle stream = rng.derive("mini_join", key);
    const auto lpos = random_positions(left.size(), n, stream);
    const auto rpos = random_positions(right.size(), n, stream);
    auto& bucket = out.strata[key];
    bucket.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      bucket.push_back(JoinedTuple{key, left.tuple_ids[lpos[i]],
                                   right.tuple_ids[rpos[i]]});
    }
  }
  return out;
}

void write_join_sample(const JoinSample& sample, const StratifiedRelation& r1,
                       const StratifiedRelation& r2, std::ostream& out,
                       char delimiter) {
  out << "key" << delimiter << "left_id" << delimiter << "right_id";
  for (const auto& h : r1.header()) out << delimiter << r1.name() << '.' << h;
  for (const auto& h : r2.header()) out << delimiter << r2.name() << '.' << h;
  out << '\n';
  for (const auto& [key, tuples] : sample.strata) {
    for (const auto& jt : tuples) {
      out << key.to_string() << delimiter << jt.left_id << delimiter
          << jt.right_id;
      for (const auto& f : r1.tuple(jt.left_id).fields) out << delimiter << f;
      for (const auto& f : r2.tuple(jt.right_id).fields) out << delimiter << f;
      out << '\n';
    }
  }
}

}  // namespace stratjoin
