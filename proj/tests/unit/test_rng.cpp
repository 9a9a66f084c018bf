#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "delaybs/rng.hpp"

namespace delaybs {
namespace {

using Ctr = Philox4x32::Counter;
using Key = Philox4x32::Key;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswerZero) {
  EXPECT_EQ(Philox4x32::generate(Ctr{0, 0, 0, 0}, Key{0, 0}),
            (Ctr{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  EXPECT_EQ(Philox4x32::generate(Ctr{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                 Key{0xffffffff, 0xffffffff}),
            (Ctr{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  EXPECT_EQ(Philox4x32::generate(Ctr{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                 Key{0xa4093822, 0x299f31d0}),
            (Ctr{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(GaussianStream, PureFunctionOfAddress) {
  const GaussianStream a(42, 7), b(42, 7);
  for (std::uint64_t s = 0; s < 100; ++s) EXPECT_EQ(a.normal(s), b.normal(s));
  EXPECT_NE(GaussianStream(42, 7).normal(0), GaussianStream(42, 8).normal(0));
  EXPECT_NE(GaussianStream(42, 7).normal(0), GaussianStream(43, 7).normal(0));
  EXPECT_NE(a.normal(0), a.normal(1));
}

TEST(GaussianStream, UniformsOpenInterval) {
  const GaussianStream s(1, 0);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const double u = s.uniform(i);
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(GaussianStream, Moments) {
  const int n = 200000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int p = 0; p < 4; ++p) {
    const GaussianStream s(2024, static_cast<std::uint64_t>(p));
    for (int i = 0; i < n / 4; ++i) {
      const double z = s.normal(static_cast<std::uint64_t>(i));
      m1 += z;
      m2 += z * z;
      m4 += z * z * z * z;
    }
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  // Bands of about 4.5 standard errors.
  EXPECT_NEAR(m1, 0.0, 4.5 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 4.5 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m4, 3.0, 4.5 * std::sqrt(96.0 / n));
}

}  // namespace
}  // namespace delaybs
