#include "stratjoin/sampler.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "stratjoin/error.h"

namespace stratjoin {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngHandle::RngHandle(std::uint64_t master_seed) : origin_(mix64(master_seed)) {}

RngHandle RngHandle::from_origin(std::uint64_t origin) {
  RngHandle h;
  h.origin_ = origin;
  h.counter_ = 0;
  return h;
}

RngHandle RngHandle::derive(std::string_view label) const {
  return from_origin(mix64(origin_ ^ mix64(fnv1a(label))));
}

RngHandle RngHandle::derive(std::uint64_t index) const {
  return from_origin(mix64(origin_ + mix64(index + kGoldenGamma)));
}

RngHandle RngHandle::derive(std::string_view relation, const Key& key) const {
  std::uint64_t h = fnv1a(relation);
  h = fnv1a(std::string_view("\x1f", 1), h);
  if (key.is_integer()) {
    h = fnv1a("i", h);
    std::int64_t v = key.as_integer();
    h = fnv1a(std::string_view(reinterpret_cast<const char*>(&v), sizeof(v)), h);
  } else {
    h = fnv1a("s", h);
    h = fnv1a(key.as_string(), h);
  }
  return from_origin(mix64(origin_ ^ mix64(h)));
}

std::uint64_t RngHandle::next() {
  ++counter_;
  return mix64(origin_ + counter_ * kGoldenGamma);
}

std::uint64_t RngHandle::uniform_index(std::uint64_t n) {
  // Lemire's multiply-and-reject.
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RngHandle::uniform_real() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

DrawSet draw_without_replacement(std::span<const TupleId> population,
                                 std::uint64_t n, RngHandle& rng) {
  if (n > population.size()) {
    throw Error(ErrorKind::kCapacity,
                "cannot draw " + std::to_string(n) + " distinct tuples from " +
                    std::to_string(population.size()));
  }
  std::vector<TupleId> pool(population.begin(), population.end());
  // Partial Fisher-Yates: the first n slots are a uniform random n-subset in
  // uniform random order.
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return DrawSet{std::move(pool), false};
}

DrawSet draw_with_replacement(std::span<const TupleId> population,
                              std::uint64_t n, RngHandle& rng) {
  if (n > 0 && population.empty()) {
    throw Error(ErrorKind::kCapacity, "cannot draw from an empty population");
  }
  DrawSet out{{}, true};
  out.tuple_ids.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    out.tuple_ids.push_back(population[rng.uniform_index(population.size())]);
  }
  return out;
}

DrawSet draw_weighted_with_replacement(const StratifiedRelation& relation,
                                       const KeyWeight& weight_of,
                                       std::uint64_t n, RngHandle& rng) {
  const auto& keys = relation.keys();
  std::vector<double> key_weight(keys.size());
  bool integral = true;
  double total = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const double w = weight_of(keys[i]);
    if (!(w >= 0) || !std::isfinite(w)) {
      throw Error(ErrorKind::kDegenerateWeight,
                  "weight for key " + keys[i].to_string() + " is invalid");
    }
    key_weight[i] = w * static_cast<double>(relation.count(keys[i]));
    integral = integral && std::floor(key_weight[i]) == key_weight[i];
    total += key_weight[i];
  }
  if (!(total > 0)) {
    throw Error(ErrorKind::kDegenerateWeight, "all sampling weights are zero");
  }
  integral = integral && total < 0x1.0p53;

  DrawSet out{{}, true};
  out.tuple_ids.reserve(n);
  if (integral) {
    std::vector<std::uint64_t> cumulative(keys.size());
    std::uint64_t running = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      running += static_cast<std::uint64_t>(key_weight[i]);
      cumulative[i] = running;
    }
    for (std::uint64_t d = 0; d < n; ++d) {
      const std::uint64_t u = rng.uniform_index(running);
      const auto k = std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                     cumulative.begin();
      const auto stratum = relation.stratum(keys[k]);
      out.tuple_ids.push_back(stratum[rng.uniform_index(stratum.size())]);
    }
    return out;
  }

  std::vector<double> cumulative(keys.size());
  std::partial_sum(key_weight.begin(), key_weight.end(), cumulative.begin());
  for (std::uint64_t d = 0; d < n; ++d) {
    const double u = rng.uniform_real() * cumulative.back();
    auto k = std::upper_bound(cumulative.begin(), cumulative.end(), u) -
             cumulative.begin();
    // Guard against u landing on the total through rounding, and skip
    // zero-weight keys that share a cumulative boundary.
    k = std::min<std::ptrdiff_t>(k, static_cast<std::ptrdiff_t>(keys.size()) - 1);
    while (key_weight[k] == 0 && k > 0) --k;
    const auto stratum = relation.stratum(keys[k]);
    out.tuple_ids.push_back(stratum[rng.uniform_index(stratum.size())]);
  }
  return out;
}

}  // namespace stratjoin
