#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "nestfrag/partition.hpp"

using namespace nestfrag;

namespace {

template <typename F>
void expect_error(ErrorCode code, F&& f) {
  try {
    f();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

// Bell numbers by the triangle recurrence.
std::vector<std::size_t> bell_numbers(std::size_t n) {
  std::vector<std::size_t> out{1};
  std::vector<std::size_t> row{1};
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<std::size_t> next{row.back()};
    for (auto x : row) next.push_back(next.back() + x);
    out.push_back(next.front());
    row = next;
  }
  return out;
}

NestedPartition nested(const char* text) { return parse_nested(text); }

std::vector<int> labels(const Partition& p) { return {p.assignment().begin(), p.assignment().end()}; }

}  // namespace

TEST(MakePartition, CanonicalOrder) {
  EXPECT_EQ(labels(make_partition(3, {{2}, {1, 3}})), (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(labels(make_partition(3, {{1, 2, 3}})), (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(labels(make_partition(3, {{1}, {2}, {3}})), (std::vector<int>{0, 1, 2}));
}

TEST(MakePartition, Errors) {
  expect_error(ErrorCode::Overlap, [] { make_partition(3, {{1, 2}, {2, 3}}); });
  expect_error(ErrorCode::MissingElement, [] { make_partition(3, {{1, 2}}); });
  expect_error(ErrorCode::EmptyBlock, [] { make_partition(2, {{1, 2}, {}}); });
}

TEST(MakePartition, CanonicalizationIsIdempotent) {
  for (const auto& p : enumerate_partitions(5)) {
    EXPECT_EQ(make_partition(5, p.blocks()), p);
    EXPECT_EQ(Partition::from_labels(p.assignment()), p);
  }
}

TEST(Restrict, Examples) {
  EXPECT_EQ(restrict(nested("1,3|2 ; 1,2,3"), 2), nested("1|2 ; 1,2"));
  for (const auto& p : enumerate_nested(4)) EXPECT_EQ(restrict(p, 4), p);
  expect_error(ErrorCode::BadRange, [] { restrict(Partition::finest(3), 0); });
  expect_error(ErrorCode::BadRange, [] { restrict(Partition::finest(3), 4); });
}

TEST(Restrict, Composes) {
  for (const auto& p : enumerate_nested(5)) {
    for (std::size_t m = 1; m <= 5; ++m) {
      for (std::size_t k = 1; k <= m; ++k) EXPECT_EQ(restrict(restrict(p, m), k), restrict(p, k));
    }
  }
}

TEST(Restrict, IsMonotone) {
  const auto states = enumerate_nested(4);
  for (const auto& a : states) {
    for (const auto& b : states) {
      if (!nested_leq(a, b)) continue;
      for (std::size_t m = 1; m <= 4; ++m) EXPECT_TRUE(nested_leq(restrict(a, m), restrict(b, m)));
    }
  }
}

TEST(Injection, Examples) {
  const auto p = make_partition(3, {{1, 2}, {3}});
  const std::vector<Element> sigma{3, 1};
  EXPECT_EQ(apply_injection(p, sigma), Partition::finest(2));
  const std::vector<Element> id{1, 2, 3};
  EXPECT_EQ(apply_injection(p, id), p);
  const std::vector<Element> bad{1, 1};
  expect_error(ErrorCode::NotInjective, [&] { apply_injection(p, bad); });
  const std::vector<Element> out_of_range{1, 4};
  expect_error(ErrorCode::Range, [&] { apply_injection(p, out_of_range); });
}

TEST(Injection, DefinitionByPairs) {
  // i ~ j in p^sigma exactly when sigma(i) ~ sigma(j) in p.
  const std::vector<Element> sigma{4, 2, 5};
  for (const auto& p : enumerate_partitions(5)) {
    const auto q = apply_injection(p, sigma);
    for (Element i = 1; i <= 3; ++i) {
      for (Element j = 1; j <= 3; ++j) {
        EXPECT_EQ(q.same_block(i, j), p.same_block(sigma[i - 1], sigma[j - 1]));
      }
    }
  }
}

TEST(Injection, Composition) {
  // (p^sigma)^tau = p^(sigma o tau)
  const std::vector<Element> sigma{3, 1, 4, 2};
  const std::vector<Element> tau{2, 4, 1};
  std::vector<Element> composed;
  for (Element t : tau) composed.push_back(sigma[static_cast<std::size_t>(t - 1)]);
  for (const auto& p : enumerate_nested(4)) {
    EXPECT_EQ(apply_injection(apply_injection(p, sigma), tau), apply_injection(p, composed));
  }
}

TEST(Injection, CommutesWithRestriction) {
  const std::vector<Element> sigma{2, 3, 1};  // maps [3] into [3] inside [5]
  for (const auto& p : enumerate_nested(5)) {
    EXPECT_EQ(apply_injection(restrict(p, 3), sigma), apply_injection(p, sigma));
  }
}

TEST(Order, IsFiner) {
  EXPECT_TRUE(is_finer(make_partition(3, {{1}, {2, 3}}), Partition::coarsest(3)));
  EXPECT_FALSE(is_finer(Partition::coarsest(2), Partition::finest(2)));
  for (const auto& p : enumerate_partitions(4)) EXPECT_TRUE(is_finer(p, p));
  expect_error(ErrorCode::SizeMismatch, [] { is_finer(Partition::finest(2), Partition::finest(3)); });
}

TEST(Order, NestedLeq) {
  const NestedPartition bottom{Partition::finest(3), Partition::finest(3)};
  const NestedPartition top{Partition::coarsest(3), Partition::coarsest(3)};
  for (const auto& p : enumerate_nested(3)) {
    EXPECT_TRUE(nested_leq(bottom, p));
    EXPECT_TRUE(nested_leq(p, top));
  }
  const auto a = make_partition(3, {{1, 2}, {3}});
  const auto b = make_partition(3, {{1}, {2, 3}});
  EXPECT_FALSE(is_finer(a, b));
  EXPECT_FALSE(is_finer(b, a));
  const NestedPartition x{a, a};
  const NestedPartition y{b, b};
  EXPECT_FALSE(nested_leq(x, y));
  EXPECT_FALSE(nested_leq(y, x));
}

TEST(Enumerate, BellNumbers) {
  const auto bell = bell_numbers(8);
  for (std::size_t n = 1; n <= 8; ++n) EXPECT_EQ(enumerate_partitions(n).size(), bell[n]) << n;
  EXPECT_EQ(enumerate_partitions(3).size(), 5u);
  expect_error(ErrorCode::TooLarge, [] { enumerate_partitions(9); });
}

TEST(Enumerate, PartitionsAreDistinctAndCanonical) {
  const auto all = enumerate_partitions(6);
  std::set<std::vector<int>> seen;
  for (const auto& p : all) {
    const auto& a = p.assignment();
    int top = -1;
    for (int x : a) {
      EXPECT_LE(x, top + 1);
      top = std::max(top, x);
    }
    EXPECT_TRUE(seen.insert(std::vector<int>(a.begin(), a.end())).second);
  }
}

TEST(Enumerate, NestedMatchesPairFilter) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto parts = enumerate_partitions(n);
    std::size_t count = 0;
    for (const auto& z : parts) {
      for (const auto& x : parts) {
        if (is_finer(z, x)) ++count;
      }
    }
    EXPECT_EQ(enumerate_nested(n).size(), count) << n;
  }
  EXPECT_EQ(enumerate_nested(2).size(), 3u);
  EXPECT_EQ(enumerate_nested(3).size(), 12u);
  expect_error(ErrorCode::TooLarge, [] { enumerate_nested(7); });
}

TEST(Distance, Examples) {
  const auto a = make_partition(4, {{1, 2}, {3, 4}});
  EXPECT_EQ(distance(a, a), 0.0);
  const auto b = make_partition(4, {{1, 2, 3}, {4}});  // agrees on [2], not on [3]
  EXPECT_DOUBLE_EQ(distance(a, b), 0.5);
  const auto c = make_partition(4, {{1}, {2, 3, 4}});
  EXPECT_DOUBLE_EQ(distance(a, c), 1.0);
  expect_error(ErrorCode::SizeMismatch, [&] { distance(a, Partition::finest(3)); });
}

TEST(Distance, IsUltrametric) {
  const auto states = enumerate_nested(3);
  for (const auto& a : states) {
    for (const auto& b : states) {
      EXPECT_EQ(distance(a, b), distance(b, a));
      for (const auto& c : states) EXPECT_LE(distance(a, c), std::max(distance(a, b), distance(b, c)));
    }
  }
}

TEST(Text, RoundTrip) {
  EXPECT_EQ(to_string(make_partition(3, {{1, 3}, {2}})), "1,3|2");
  for (const auto& p : enumerate_nested(4)) EXPECT_EQ(parse_nested(to_string(p)), p);
  EXPECT_EQ(parse_nested("1,2,3;1,2,3"), (NestedPartition{Partition::coarsest(3), Partition::coarsest(3)}));
  expect_error(ErrorCode::BadRange, [] { parse_nested("1,2|3 ; 1|2,3"); });
  expect_error(ErrorCode::Parse, [] { parse_nested("1,x ; 1,2"); });
}
