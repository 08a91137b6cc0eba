#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "iwv/rng.hpp"

using iwv::Xoshiro256;

TEST(Xoshiro256, ReferenceVectors) {
  // xoshiro256** from state {1, 2, 3, 4}, as produced by the reference C code.
  auto g = Xoshiro256::from_state({1, 2, 3, 4});
  EXPECT_EQ(g(), 11520ULL);
  EXPECT_EQ(g(), 0ULL);
  EXPECT_EQ(g(), 1509978240ULL);
  EXPECT_EQ(g(), 1215971899390074240ULL);
  std::uint64_t sm = 0;
  EXPECT_EQ(iwv::splitmix64(sm), 0xe220a8397b1dcdafULL);
}

TEST(Xoshiro256, SameSeedSameStream) {
  Xoshiro256 a(99), b(99);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.normal(), b.normal());
}

TEST(Xoshiro256, DifferentSeedsDiffer) {
  Xoshiro256 a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a() == b();
  EXPECT_EQ(same, 0);
}

TEST(Xoshiro256, SubstreamsAreSeedXorIndex) {
  auto s = Xoshiro256::substream(0x1234, 7);
  Xoshiro256 t(0x1234 ^ 7);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(s(), t());
}

TEST(Xoshiro256, UniformMoments) {
  Xoshiro256 r(42);
  const int n = 1'000'000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 1e-3);
}

TEST(Xoshiro256, NormalMoments) {
  Xoshiro256 r(7);
  const int n = 1'000'000;
  double s = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
    s4 += x * x * x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
}
