#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "fixtures.hpp"
#include "nestfrag/paintbox.hpp"
#include "nestfrag/rates.hpp"

using namespace nestfrag;

namespace {

Block iota_block(std::size_t n) {
  Block b(n);
  std::iota(b.begin(), b.end(), 1);
  return b;
}

// Chi-square p-value of observed counts against probabilities.
double chi_square_p(const std::map<Partition, double>& counts, const std::map<Partition, double>& probs,
                    double draws) {
  double chi2 = 0.0;
  for (const auto& [p, prob] : probs) {
    const double e = prob * draws;
    const double o = counts.count(p) ? counts.at(p) : 0.0;
    chi2 += (o - e) * (o - e) / e;
  }
  const boost::math::chi_squared dist(static_cast<double>(probs.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, chi2));
}

// Law of sample_univariate(s, n) from the split-probability formula.
std::map<Partition, double> univariate_law(const MassPartition& s, std::size_t n) {
  std::map<Partition, double> law;
  for (const auto& p : enumerate_partitions(n)) {
    std::vector<std::size_t> sizes;
    for (const auto& b : p.blocks()) sizes.push_back(b.size());
    law[p] = exact_split_probability_univariate(s, sizes);
  }
  return law;
}

}  // namespace

TEST(Univariate, DegenerateAtoms) {
  RngHandle rng(1, 0);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(sample_univariate(validate_mass({1.0}), 7, rng), Partition::coarsest(7));
    EXPECT_EQ(sample_univariate(MassPartition{}, 7, rng), Partition::finest(7));
  }
}

TEST(Univariate, PairProbability) {
  const auto s = validate_mass({0.5, 0.5});
  RngHandle rng(2, 0);
  constexpr int kDraws = 100000;
  int together = 0;
  for (int i = 0; i < kDraws; ++i) together += sample_univariate(s, 2, rng).block_count() == 1;
  const double se = std::sqrt(0.25 / kDraws);
  EXPECT_NEAR(together / static_cast<double>(kDraws), 0.5, 3.0 * se);
}

TEST(Univariate, LawMatchesSplitFormula) {
  const auto s = validate_mass({0.5, 0.3});
  const std::size_t n = 4;
  const auto law = univariate_law(s, n);
  double total = 0.0;
  for (const auto& [p, prob] : law) total += prob;
  EXPECT_NEAR(total, 1.0, 1e-12);

  RngHandle rng(3, 0);
  constexpr int kDraws = 100000;
  std::map<Partition, double> counts;
  for (int i = 0; i < kDraws; ++i) counts[sample_univariate(s, n, rng)] += 1.0;
  EXPECT_GT(chi_square_p(counts, law, kDraws), 0.001);
}

TEST(Univariate, Exchangeable) {
  const auto s = validate_mass({0.5, 0.3});
  const std::size_t n = 4;
  const std::vector<Element> sigma{3, 1, 4, 2};
  RngHandle rng(4, 0);
  constexpr int kDraws = 100000;
  std::map<Partition, double> counts;
  for (int i = 0; i < kDraws; ++i) counts[apply_injection(sample_univariate(s, n, rng), sigma)] += 1.0;
  EXPECT_GT(chi_square_p(counts, univariate_law(s, n), kDraws), 0.001);
}

TEST(Univariate, ProjectiveLaw) {
  // The law on [n + 1] pushed down to [n] is the law on [n].
  const auto s = validate_mass({0.4, 0.35, 0.1});
  for (std::size_t n = 1; n <= 4; ++n) {
    std::map<Partition, double> pushed;
    for (const auto& [p, prob] : univariate_law(s, n + 1)) pushed[restrict(p, n)] += prob;
    for (const auto& [p, prob] : univariate_law(s, n)) EXPECT_NEAR(pushed[p], prob, 1e-12);
  }
}

TEST(Outer, DegenerateAtoms) {
  RngHandle rng(5, 0);
  EXPECT_EQ(sample_outer(validate_mass({1.0}), 4, rng), Partition::coarsest(4));
  EXPECT_EQ(sample_outer(MassPartition{}, 4, rng), Partition::finest(4));
}

TEST(Outer, PairProbability) {
  const auto s = validate_mass({0.5, 0.5});
  RngHandle rng(6, 0);
  constexpr int kDraws = 100000;
  int together = 0;
  for (int i = 0; i < kDraws; ++i) together += sample_outer(s, 2, rng).block_count() == 1;
  EXPECT_NEAR(together / static_cast<double>(kDraws), 0.5, 3.0 * std::sqrt(0.25 / kDraws));
}

TEST(Inner, IdentityAtomKeepsBlock) {
  const auto p = canonicalize_bivariate({1.0}, {}, 1.0, {});
  RngHandle rng(7, 0);
  const auto out = sample_inner(p, iota_block(5), rng);
  for (const auto& l : out.labels) EXPECT_EQ(l, (InnerLabel{CellKind::MotherBlock, 0, 1}));
  EXPECT_EQ(out.local.inner, (NestedPartition{Partition::coarsest(5), Partition::coarsest(5)}));
  EXPECT_EQ(out.local.star_xi_block, 0);
}

TEST(Inner, SingleElementLabelLaw) {
  const auto p = fixtures::mixed_params().nu_in[0].p;
  RngHandle rng(8, 0);
  constexpr int kDraws = 100000;
  int mother = 0;
  int moved = 0;
  for (int i = 0; i < kDraws; ++i) {
    const auto out = sample_inner(p, {1}, rng);
    mother += out.labels[0] == InnerLabel{CellKind::MotherBlock, 0, 1};
    moved += out.labels[0] == InnerLabel{CellKind::NewBlock, 1, 1};
  }
  EXPECT_EQ(mother + moved, kDraws);
  EXPECT_NEAR(mother / static_cast<double>(kDraws), 0.5, 3.0 * std::sqrt(0.25 / kDraws));
}

TEST(Inner, WholeBlockMigrates) {
  const auto p = canonicalize_bivariate({}, {{1.0}}, 0.0, {1.0});
  RngHandle rng(9, 0);
  const auto out = sample_inner(p, iota_block(4), rng);
  for (const auto& l : out.labels) EXPECT_EQ(l, (InnerLabel{CellKind::NewBlock, 1, 1}));
  EXPECT_FALSE(out.local.star_xi_block.has_value());
}

TEST(Inner, OutcomesAreNestedWithIsolatedStar) {
  const auto p = canonicalize_bivariate({0.2, 0.1}, {{0.1, 0.05}, {0.1}}, 0.4, {0.3, 0.2});
  RngHandle rng(10, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto out = sample_inner(p, iota_block(8), rng);
    EXPECT_TRUE(is_finer(out.local.inner.zeta, out.local.inner.xi));
    // Every element of the star's outer block is mother-labelled.
    for (std::size_t j = 0; j < 8; ++j) {
      const bool in_star = out.local.star_xi_block &&
                           out.local.inner.xi.assignment()[j] == *out.local.star_xi_block;
      const bool mother = out.labels[j].kind == CellKind::MotherBlock || out.labels[j].kind == CellKind::MotherDust;
      EXPECT_EQ(in_star, mother);
    }
  }
}

TEST(Inner, LawMatchesExactEnumeration) {
  const auto p = fixtures::mixed_params().nu_in[0].p;
  const std::size_t m = 3;
  std::map<DistinguishedNestedPartition, double> law;
  for (const auto& [d, prob] : inner_split_law(p, m)) law[d] = prob;
  RngHandle rng(11, 0);
  constexpr int kDraws = 100000;
  std::map<DistinguishedNestedPartition, double> counts;
  for (int i = 0; i < kDraws; ++i) counts[sample_inner(p, iota_block(m), rng).local] += 1.0;
  double chi2 = 0.0;
  for (const auto& [d, prob] : law) {
    const double e = prob * kDraws;
    const double o = counts.count(d) ? counts.at(d) : 0.0;
    chi2 += (o - e) * (o - e) / e;
  }
  for (const auto& [d, c] : counts) EXPECT_TRUE(law.count(d)) << to_string(d.inner);
  const boost::math::chi_squared dist(static_cast<double>(law.size() - 1));
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001);
}

TEST(Empirical, Examples) {
  std::vector<int> labels(100);
  for (int i = 0; i < 100; ++i) labels[static_cast<std::size_t>(i)] = i < 50 ? 0 : 1;
  const auto half = empirical_frequencies(Partition::from_labels(labels));
  EXPECT_EQ(half.s, (std::vector<double>{0.5, 0.5}));
  const auto dust = empirical_frequencies(Partition::finest(10));
  EXPECT_TRUE(dust.s.empty());
  EXPECT_EQ(dust.dust(), 1.0);
}

TEST(Empirical, Nested) {
  // Outer blocks {1..6} (rows {1..4},{5,6}) and {7..10} (row {7..9}, singleton 10).
  const auto zeta = make_partition(10, {{1, 2, 3, 4}, {5, 6}, {7, 8, 9}, {10}});
  const auto xi = make_partition(10, {{1, 2, 3, 4, 5, 6}, {7, 8, 9, 10}});
  const auto f = empirical_frequencies(NestedPartition{zeta, xi});
  EXPECT_EQ(f.u_bar, 0.0);
  ASSERT_EQ(f.s_bar.size(), 2u);
  EXPECT_NEAR(f.s_bar[0], 0.6, 1e-12);
  EXPECT_NEAR(f.s_bar[1], 0.4, 1e-12);
  EXPECT_EQ(f.s_rows[0].size(), 2u);
  EXPECT_NEAR(f.s_rows[1][0], 0.3, 1e-12);
}

TEST(Empirical, UnivariateLln) {
  const auto s = validate_mass({0.6, 0.3});
  RngHandle rng(12, 0);
  const auto f = empirical_frequencies(sample_univariate(s, 100000, rng));
  ASSERT_EQ(f.s.size(), 2u);
  EXPECT_NEAR(f.s[0], 0.6, 0.005);
  EXPECT_NEAR(f.s[1], 0.3, 0.005);
}
