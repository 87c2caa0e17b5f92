#include <gtest/gtest.h>

#include <cmath>

#include <set>

#include "escape/philox.hpp"

using escape::CounterRng;
using escape::Philox4x32;
using escape::RngDomain;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswerZero) {
  constexpr auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  static_assert(out[0] == 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                        {0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (Philox4x32::Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                        {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out, (Philox4x32::Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRng, PureFunctionOfCounter) {
  const CounterRng a(42, 7, RngDomain::walk);
  const CounterRng b(42, 7, RngDomain::walk);
  for (std::uint64_t i = 0; i < 100; ++i) EXPECT_EQ(a.bits(i), b.bits(i));
  // Draws may be taken in any order.
  EXPECT_EQ(a.bits(99), b.bits(99));
}

TEST(CounterRng, StreamsSeedsAndDomainsDiffer) {
  const auto base = CounterRng(1, 0, RngDomain::walk).bits(0);
  EXPECT_NE(base, CounterRng(1, 1, RngDomain::walk).bits(0));
  EXPECT_NE(base, CounterRng(2, 0, RngDomain::walk).bits(0));
  EXPECT_NE(base, CounterRng(1, 0, RngDomain::martingale).bits(0));
  EXPECT_NE(base, CounterRng(1ULL << 32, 0, RngDomain::walk).bits(0));
}

TEST(CounterRng, UniformRangeAndMean) {
  const CounterRng rng(123, 0, RngDomain::walk);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(i);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean of n uniforms has sd 1/sqrt(12 n).
  EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

TEST(CounterRng, BelowCoversRange) {
  const CounterRng rng(9, 3, RngDomain::vertex_sample);
  std::set<std::uint32_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.below(i, 7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}
