#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <set>
#include <vector>

#include "nestfrag/rng.hpp"

using namespace nestfrag;

// Known-answer vectors for Philox4x32-10 (Salmon et al. reference suite).
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngHandle, Deterministic) {
  RngHandle a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  EXPECT_EQ(a.position(), 100u);
  RngHandle c(42, 7);
  EXPECT_EQ(c.uniform_at(5), RngHandle(42, 7).uniform_at(5));
  for (int i = 0; i < 5; ++i) c();
  EXPECT_EQ(c.uniform(), RngHandle(42, 7).uniform_at(5));
}

TEST(RngHandle, StreamsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 1000; ++s) firsts.insert(RngHandle(1, s)());
  EXPECT_EQ(firsts.size(), 1000u);
  EXPECT_NE(RngHandle(1, 0).split(1)(), RngHandle(1, 0).split(2)());
  EXPECT_NE(RngHandle(1, 0)(), RngHandle(2, 0)());
}

TEST(RngHandle, UniformIsUniform) {
  constexpr int kBins = 20;
  constexpr int kDraws = 200000;
  std::vector<double> counts(kBins, 0.0);
  RngHandle rng(9, 3);
  for (int i = 0; i < kDraws; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    counts[static_cast<std::size_t>(u * kBins)] += 1.0;
  }
  const double expected = static_cast<double>(kDraws) / kBins;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(kBins - 1);
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001);
}

TEST(RngHandle, ExponentialMean) {
  RngHandle rng(5, 0);
  constexpr int kDraws = 100000;
  double sum = 0.0;
  for (int i = 0; i < kDraws; ++i) sum += rng.exponential(2.0);
  const double mean = sum / kDraws;
  EXPECT_NEAR(mean, 0.5, 4.0 * 0.5 / std::sqrt(kDraws));
}

TEST(Poisson, InversionMatchesCdf) {
  const boost::math::poisson_distribution<> dist(1.0);
  for (int k = 0; k < 8; ++k) {
    const double below = k == 0 ? 0.0 : boost::math::cdf(dist, k - 1);
    const double at = boost::math::cdf(dist, k);
    EXPECT_EQ(poisson_from_uniform(below + 1e-9, 1.0), k);
    EXPECT_EQ(poisson_from_uniform(at - 1e-9, 1.0), k);
  }
}
