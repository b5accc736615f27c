#include "rovist/random.h"

#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

namespace rovist {
namespace {

TEST(DeterministicRngTest, RawSequenceIsMt19937_64) {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  DeterministicRng rng(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.NextU64();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(DeterministicRngTest, SameSeedSameStream) {
  DeterministicRng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.Below(17), b.Below(17));
    EXPECT_EQ(a.Uniform(), b.Uniform());
    EXPECT_EQ(a.Normal(), b.Normal());
  }
}

TEST(DeterministicRngTest, BelowStaysInRangeAndCoversIt) {
  DeterministicRng rng(1);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.Below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_GT(c, 800);
  EXPECT_EQ(rng.Below(1), 0u);
}

TEST(DeterministicRngTest, UniformInUnitInterval) {
  DeterministicRng rng(2);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 10000, 0.5, 0.02);
}

TEST(DeterministicRngTest, NormalMoments) {
  DeterministicRng rng(3);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.Normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.03);
  EXPECT_NEAR(sq / n, 1.0, 0.05);
}

TEST(DeterministicRngTest, ShuffleIsAPermutation) {
  DeterministicRng rng(4);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto shuffled = v;
  rng.Shuffle(shuffled);
  EXPECT_NE(shuffled, v);
  std::sort(shuffled.begin(), shuffled.end());
  EXPECT_EQ(shuffled, v);
}

TEST(HashTest, Fnv1aKnownValues) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(HashTest, SplitMixSpreadsNeighbours) {
  EXPECT_NE(SplitMix64(0), SplitMix64(1));
  EXPECT_EQ(SplitMix64(7), SplitMix64(7));
}

}  // namespace
}  // namespace rovist
