#include "stratjoin/datagen.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stratjoin/error.h"
#include "stratjoin/sampler.h"

namespace stratjoin {

namespace {

void validate(const ZipfSpec& spec) {
  if (spec.n_keys == 0) throw Error(ErrorKind::kSpec, "n_keys must be at least 1");
  if (!(spec.z >= 0) || !std::isfinite(spec.z)) {
    throw Error(ErrorKind::kSpec, "zipf exponent must be a finite value >= 0");
  }
  if (spec.n_keys > spec.n_tuples) {
    throw Error(ErrorKind::kSpec, "n_keys (" + std::to_string(spec.n_keys) +
                                      ") exceeds n_tuples (" +
                                      std::to_string(spec.n_tuples) + ")");
  }
}

}  // namespace

std::vector<std::uint64_t> zipf_strata_sizes(const ZipfSpec& spec) {
  validate(spec);
  const std::size_t n = spec.n_keys;
  std::vector<double> weight(n);
  for (std::size_t r = 0; r < n; ++r) {
    weight[r] = std::pow(static_cast<double>(r + 1), -spec.z);
  }
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);

  std::vector<std::uint64_t> sizes(n);
  std::vector<double> fraction(n);
  std::uint64_t assigned = 0;
  for (std::size_t r = 0; r < n; ++r) {
    double q = static_cast<double>(spec.n_tuples) * weight[r] / total;
    const double nearest = std::round(q);
    if (std::abs(q - nearest) < 1e-9 * std::max(1.0, q)) q = nearest;
    sizes[r] = static_cast<std::uint64_t>(std::floor(q));
    fraction[r] = q - std::floor(q);
    assigned += sizes[r];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fraction[a] > fraction[b]; });
  for (std::size_t i = 0; assigned < spec.n_tuples; ++i, ++assigned) {
    ++sizes[order[i % n]];
  }
  return sizes;
}

StratifiedRelation generate(const ZipfSpec& spec, std::string name) {
  const auto sizes = zipf_strata_sizes(spec);
  RngHandle rng(spec.seed);
  RngHandle order_stream = rng.derive("row_order");
  RngHandle padding_stream = rng.derive("padding");

  std::vector<std::int64_t> keys;
  keys.reserve(spec.n_tuples);
  for (std::size_t r = 0; r < sizes.size(); ++r) {
    keys.insert(keys.end(), sizes[r], static_cast<std::int64_t>(r + 1));
  }
  for (std::size_t i = keys.size(); i > 1; --i) {
    std::swap(keys[i - 1], keys[order_stream.uniform_index(i)]);
  }

  std::vector<Tuple> tuples;
  tuples.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    Tuple t;
    t.key = Key(keys[i]);
    const auto padding = static_cast<std::uint32_t>(padding_stream.next() >> 32);
    t.fields = {std::to_string(i), std::to_string(keys[i]), std::to_string(padding)};
    tuples.push_back(std::move(t));
  }
  return StratifiedRelation(std::move(name), {"RID", "JoinKey", "Padding"}, 1,
                            std::move(tuples));
}

}  // namespace stratjoin
