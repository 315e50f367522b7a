#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fixtures.h"
#include "stratjoin/error.h"
#include "stratjoin/sampler.h"

namespace stratjoin {
namespace {

using testing::k;

std::vector<TupleId> ids(std::size_t n) {
  std::vector<TupleId> v(n);
  std::iota(v.begin(), v.end(), TupleId{0});
  return v;
}

TEST(RngTest, SameSeedSameStream) {
  RngHandle a(7);
  RngHandle b(7);
  RngHandle c(8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(RngTest, DerivationIgnoresParentPosition) {
  RngHandle a(1);
  RngHandle b(1);
  for (int i = 0; i < 17; ++i) b.next();
  EXPECT_EQ(a.derive("x").next(), b.derive("x").next());
  EXPECT_EQ(a.derive(3).next(), b.derive(3).next());
  EXPECT_EQ(a.derive("left:R", k("a")).next(), b.derive("left:R", k("a")).next());
  EXPECT_NE(a.derive("x").origin(), a.derive("y").origin());
  EXPECT_NE(a.derive(0).origin(), a.derive(1).origin());
  EXPECT_NE(a.derive("left:R", k(1)).origin(), a.derive("left:R", k("1")).origin());
}

TEST(RngTest, UniformIndexStaysInRangeAndIsBalanced) {
  RngHandle r(3);
  constexpr std::uint64_t n = 6;
  constexpr int draws = 60000;
  std::vector<int> hist(n, 0);
  for (int i = 0; i < draws; ++i) {
    const auto v = r.uniform_index(n);
    ASSERT_LT(v, n);
    ++hist[v];
  }
  // Each bin is Binomial(draws, 1/6); 6 standard deviations is far outside
  // anything a correct generator produces.
  const double mean = draws / static_cast<double>(n);
  const double sd = std::sqrt(draws * (1.0 / n) * (1 - 1.0 / n));
  for (int h : hist) EXPECT_LT(std::abs(h - mean), 6 * sd);
  EXPECT_EQ(r.position(), static_cast<std::uint64_t>(draws));
}

TEST(RngTest, UniformRealInUnitInterval) {
  RngHandle r(5);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform_real();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 10000, 0.5, 0.02);
}

TEST(DrawTest, WithoutReplacementIsDistinct) {
  RngHandle r(9);
  const auto pop = ids(20);
  for (std::uint64_t n : {0u, 1u, 7u, 20u}) {
    const auto d = draw_without_replacement(pop, n, r);
    EXPECT_FALSE(d.with_replacement);
    EXPECT_EQ(d.size(), n);
    EXPECT_EQ(std::set<TupleId>(d.tuple_ids.begin(), d.tuple_ids.end()).size(), n);
  }
  EXPECT_THROW(draw_without_replacement(pop, 21, r), Error);
}

TEST(DrawTest, WithoutReplacementSubsetsAreUniform) {
  // All C(4,2) = 6 subsets should appear equally often.
  RngHandle r(11);
  const auto pop = ids(4);
  std::map<std::pair<TupleId, TupleId>, int> seen;
  constexpr int trials = 30000;
  for (int i = 0; i < trials; ++i) {
    auto d = draw_without_replacement(pop, 2, r).tuple_ids;
    std::sort(d.begin(), d.end());
    ++seen[{d[0], d[1]}];
  }
  ASSERT_EQ(seen.size(), 6u);
  const double mean = trials / 6.0;
  const double sd = std::sqrt(trials * (1 / 6.0) * (5 / 6.0));
  for (const auto& [pair, c] : seen) EXPECT_LT(std::abs(c - mean), 6 * sd);
}

TEST(DrawTest, WithReplacement) {
  RngHandle r(13);
  const auto pop = ids(3);
  const auto d = draw_with_replacement(pop, 50, r);
  EXPECT_TRUE(d.with_replacement);
  EXPECT_EQ(d.size(), 50u);
  for (TupleId id : d.tuple_ids) EXPECT_LT(id, 3u);
  EXPECT_EQ(draw_with_replacement({}, 0, r).size(), 0u);
  try {
    draw_with_replacement({}, 1, r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCapacity);
  }
}

TEST(DrawTest, SameStreamSameDraws) {
  const auto pop = ids(50);
  RngHandle a(21);
  RngHandle b(21);
  EXPECT_EQ(draw_with_replacement(pop, 10, a), draw_with_replacement(pop, 10, b));
  EXPECT_EQ(draw_without_replacement(pop, 10, a), draw_without_replacement(pop, 10, b));
}

TEST(WeightedDrawTest, FollowsKeyWeightTimesCount) {
  // Key a: 1 tuple weight 3; key b: 2 tuples weight 1. Tuple probabilities
  // 3/5, 1/5, 1/5.
  const auto rel = testing::relation("R", {{k("a"), 1}, {k("b"), 2}});
  RngHandle r(17);
  constexpr int n = 50000;
  const auto d = draw_weighted_with_replacement(
      rel, [](const Key& key) { return key == Key("a") ? 3.0 : 1.0; }, n, r);
  ASSERT_EQ(d.size(), static_cast<std::size_t>(n));
  std::vector<int> hist(3, 0);
  for (TupleId id : d.tuple_ids) ++hist[id];
  const double p[] = {0.6, 0.2, 0.2};
  for (int i = 0; i < 3; ++i) {
    const double sd = std::sqrt(n * p[i] * (1 - p[i]));
    EXPECT_LT(std::abs(hist[i] - n * p[i]), 6 * sd) << i;
  }
}

TEST(WeightedDrawTest, NonIntegralWeightsAndZeroWeightKeys) {
  const auto rel = testing::relation("R", {{k(1), 2}, {k(2), 2}, {k(3), 1}});
  RngHandle r(19);
  const auto d = draw_weighted_with_replacement(
      rel, [](const Key& key) { return key == Key(std::int64_t{2}) ? 0.0 : 0.5; }, 2000, r);
  for (TupleId id : d.tuple_ids) EXPECT_NE(rel.tuple(id).key, Key(std::int64_t{2}));
}

TEST(WeightedDrawTest, DegenerateWeights) {
  const auto rel = testing::relation("R", {{k(1), 2}});
  RngHandle r(23);
  try {
    draw_weighted_with_replacement(rel, [](const Key&) { return 0.0; }, 1, r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateWeight);
  }
}

}  // namespace
}  // namespace stratjoin
