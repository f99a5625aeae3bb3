#pragma once

// Partitions and nested partitions of [n] = {1, ..., n}.
//
// A partition is stored as its canonical assignment vector: entry i holds the
// block index of element i + 1, blocks being numbered 0, 1, ... in order of
// their least element. Two partitions are equal iff their vectors are equal.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nestfrag/error.hpp"
#include "nestfrag/rng.hpp"

namespace nestfrag {

/// Elements of the ground set are 1-based in every public block listing.
using Element = int;
using Block = std::vector<Element>;

class Partition {
 public:
  /// Canonicalizes an arbitrary labeling: elements sharing a label share a block.
  static Partition from_labels(std::span<const std::int64_t> labels) {
    Partition p;
    p.assignment_.resize(labels.size());
    std::unordered_map<std::int64_t, int> seen;
    seen.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto [it, inserted] = seen.try_emplace(labels[i], static_cast<int>(seen.size()));
      p.assignment_[i] = it->second;
    }
    p.block_count_ = static_cast<int>(seen.size());
    return p;
  }

  static Partition from_labels(std::span<const int> labels) {
    std::vector<std::int64_t> wide(labels.begin(), labels.end());
    return from_labels(std::span<const std::int64_t>(wide));
  }

  static Partition from_labels(const std::vector<int>& labels) { return from_labels(std::span<const int>(labels)); }
  static Partition from_labels(const std::vector<std::int64_t>& labels) {
    return from_labels(std::span<const std::int64_t>(labels));
  }

  /// 0_n: all singletons.
  static Partition finest(std::size_t n) {
    Partition p;
    p.assignment_.resize(n);
    std::iota(p.assignment_.begin(), p.assignment_.end(), 0);
    p.block_count_ = static_cast<int>(n);
    return p;
  }

  /// 1_n: a single block.
  static Partition coarsest(std::size_t n) {
    Partition p;
    p.assignment_.assign(n, 0);
    p.block_count_ = n > 0 ? 1 : 0;
    return p;
  }

  Partition() = default;

  std::size_t size() const noexcept { return assignment_.size(); }
  int block_count() const noexcept { return block_count_; }

  /// Block index of element e (1-based).
  int block_of(Element e) const { return assignment_[static_cast<std::size_t>(e - 1)]; }
  bool same_block(Element a, Element b) const { return block_of(a) == block_of(b); }

  std::span<const int> assignment() const noexcept { return assignment_; }

  std::vector<Block> blocks() const {
    std::vector<Block> out(static_cast<std::size_t>(block_count_));
    for (std::size_t i = 0; i < assignment_.size(); ++i) {
      out[static_cast<std::size_t>(assignment_[i])].push_back(static_cast<Element>(i + 1));
    }
    return out;
  }

  Block block(int index) const {
    Block out;
    for (std::size_t i = 0; i < assignment_.size(); ++i) {
      if (assignment_[i] == index) out.push_back(static_cast<Element>(i + 1));
    }
    return out;
  }

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) { return a.assignment_ <=> b.assignment_; }

 private:
  std::vector<int> assignment_;
  int block_count_ = 0;
};

struct NestedPartition {
  Partition zeta;  // inner (gene) partition
  Partition xi;    // outer (species) partition

  std::size_t size() const noexcept { return xi.size(); }

  friend bool operator==(const NestedPartition&, const NestedPartition&) = default;
  friend auto operator<=>(const NestedPartition&, const NestedPartition&) = default;
};

/// A nested partition of [n] together with the out-of-band symbol * that sits
/// alone in the inner partition. `star_xi_block` is the outer block joined by *,
/// or empty when the outer block of * is {*} itself.
struct DistinguishedNestedPartition {
  NestedPartition inner;
  std::optional<int> star_xi_block;

  friend bool operator==(const DistinguishedNestedPartition&, const DistinguishedNestedPartition&) = default;
  friend auto operator<=>(const DistinguishedNestedPartition&, const DistinguishedNestedPartition&) = default;
};

// ---------------------------------------------------------------------------
// Construction and checks

inline Partition make_partition(std::size_t n, const std::vector<Block>& blocks) {
  std::vector<int> labels(n, -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw Error(ErrorCode::EmptyBlock, "block " + std::to_string(b) + " is empty");
    for (Element e : blocks[b]) {
      if (e < 1 || static_cast<std::size_t>(e) > n) {
        throw Error(ErrorCode::Range, "element " + std::to_string(e) + " outside [1, " + std::to_string(n) + "]");
      }
      auto& slot = labels[static_cast<std::size_t>(e - 1)];
      if (slot != -1) throw Error(ErrorCode::Overlap, "element " + std::to_string(e) + " appears twice");
      slot = static_cast<int>(b);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] == -1) throw Error(ErrorCode::MissingElement, "element " + std::to_string(i + 1) + " not covered");
  }
  return Partition::from_labels(labels);
}

/// True iff every block of `a` is contained in a block of `b`.
inline bool is_finer(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::SizeMismatch, "partitions of different ground sets");
  std::vector<int> image(static_cast<std::size_t>(a.block_count()), -1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto& slot = image[static_cast<std::size_t>(a.assignment()[i])];
    const int target = b.assignment()[i];
    if (slot == -1) {
      slot = target;
    } else if (slot != target) {
      return false;
    }
  }
  return true;
}

inline NestedPartition make_nested(Partition zeta, Partition xi) {
  if (zeta.size() != xi.size()) throw Error(ErrorCode::SizeMismatch, "zeta and xi on different ground sets");
  if (!is_finer(zeta, xi)) throw Error(ErrorCode::BadRange, "zeta is not finer than xi");
  return {std::move(zeta), std::move(xi)};
}

inline bool nested_leq(const NestedPartition& a, const NestedPartition& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::SizeMismatch, "nested partitions of different ground sets");
  return is_finer(a.zeta, b.zeta) && is_finer(a.xi, b.xi);
}

// ---------------------------------------------------------------------------
// Restriction and injection action

inline Partition restrict(const Partition& p, std::size_t m) {
  if (m < 1 || m > p.size()) {
    throw Error(ErrorCode::BadRange, "cannot restrict [" + std::to_string(p.size()) + "] to [" + std::to_string(m) + "]");
  }
  return Partition::from_labels(p.assignment().first(m));
}

inline NestedPartition restrict(const NestedPartition& p, std::size_t m) {
  return {restrict(p.zeta, m), restrict(p.xi, m)};
}

/// pi^sigma for sigma : [k] -> [n] given as sigma[i - 1] = sigma(i).
inline Partition apply_injection(const Partition& p, std::span<const Element> sigma) {
  std::vector<bool> used(p.size(), false);
  std::vector<int> labels(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const Element target = sigma[i];
    if (target < 1 || static_cast<std::size_t>(target) > p.size()) {
      throw Error(ErrorCode::Range, "injection value " + std::to_string(target) + " outside [1, " + std::to_string(p.size()) + "]");
    }
    if (used[static_cast<std::size_t>(target - 1)]) {
      throw Error(ErrorCode::NotInjective, "value " + std::to_string(target) + " hit twice");
    }
    used[static_cast<std::size_t>(target - 1)] = true;
    labels[i] = p.block_of(target);
  }
  return Partition::from_labels(labels);
}

inline NestedPartition apply_injection(const NestedPartition& p, std::span<const Element> sigma) {
  return {apply_injection(p.zeta, sigma), apply_injection(p.xi, sigma)};
}

// ---------------------------------------------------------------------------
// Distance

/// Largest k with restrict(a, k) == restrict(b, k); equals n when a == b.
template <typename P>
std::size_t agreement_depth(const P& a, const P& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::SizeMismatch, "distance between different ground sets");
  std::size_t depth = 0;
  for (std::size_t k = 1; k <= a.size(); ++k) {
    if (restrict(a, k) != restrict(b, k)) break;
    depth = k;
  }
  return depth;
}

/// 1 / agreement depth, and 0 when a == b on the whole ground set.
template <typename P>
double distance(const P& a, const P& b) {
  const std::size_t depth = agreement_depth(a, b);
  if (depth == a.size()) return 0.0;
  return 1.0 / static_cast<double>(depth);
}

// ---------------------------------------------------------------------------
// Enumeration

inline constexpr std::size_t kPartitionEnumerationCap = 8;
inline constexpr std::size_t kNestedEnumerationCap = 6;

/// All partitions of [n] in lexicographic order of their assignment vectors.
inline std::vector<Partition> enumerate_partitions(std::size_t n, std::size_t cap = kPartitionEnumerationCap) {
  if (n > cap) throw Error(ErrorCode::TooLarge, "enumeration of partitions capped at n=" + std::to_string(cap));
  std::vector<Partition> out;
  if (n == 0) return out;
  std::vector<int> rgs(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int max_label) {
    if (i == n) {
      out.push_back(Partition::from_labels(rgs));
      return;
    }
    for (int label = 0; label <= max_label + 1; ++label) {
      rgs[i] = label;
      rec(i + 1, std::max(max_label, label));
    }
  };
  rgs[0] = 0;
  rec(1, 0);
  return out;
}

/// All nested partitions of [n]: for each outer partition, every refinement.
inline std::vector<NestedPartition> enumerate_nested(std::size_t n, std::size_t cap = kNestedEnumerationCap) {
  if (n > cap) throw Error(ErrorCode::TooLarge, "enumeration of nested partitions capped at n=" + std::to_string(cap));
  std::vector<NestedPartition> out;
  const auto all = enumerate_partitions(n, std::max(cap, n));
  for (const auto& xi : all) {
    const auto blocks = xi.blocks();
    // Refinements of xi: choose a partition of each block independently.
    std::vector<std::vector<Partition>> per_block;
    per_block.reserve(blocks.size());
    for (const auto& b : blocks) per_block.push_back(enumerate_partitions(b.size(), std::max(cap, n)));
    std::vector<std::size_t> choice(blocks.size(), 0);
    while (true) {
      std::vector<int> labels(n, 0);
      int offset = 0;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& local = per_block[b][choice[b]];
        for (std::size_t j = 0; j < blocks[b].size(); ++j) {
          labels[static_cast<std::size_t>(blocks[b][j] - 1)] = offset + local.assignment()[j];
        }
        offset += local.block_count();
      }
      out.push_back({Partition::from_labels(labels), xi});
      std::size_t b = 0;
      while (b < choice.size() && ++choice[b] == per_block[b].size()) choice[b++] = 0;
      if (b == choice.size()) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Text encoding: "1,3|2" and "1,3|2 ; 1,2,3"

inline std::string to_string(const Partition& p) {
  std::string out;
  const auto blocks = p.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b > 0) out += '|';
    for (std::size_t j = 0; j < blocks[b].size(); ++j) {
      if (j > 0) out += ',';
      out += std::to_string(blocks[b][j]);
    }
  }
  return out;
}

inline std::string to_string(const NestedPartition& p) { return to_string(p.zeta) + " ; " + to_string(p.xi); }

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// Parses block syntax; the ground set is [max element].
inline Partition parse_partition(std::string_view text) {
  std::vector<Block> blocks;
  int max_element = 0;
  for (auto part : detail::split(detail::trim(text), '|')) {
    part = detail::trim(part);
    if (part.empty()) throw Error(ErrorCode::EmptyBlock, "empty block in '" + std::string(text) + "'");
    Block block;
    for (auto item : detail::split(part, ',')) {
      item = detail::trim(item);
      if (item.empty() || item.find_first_not_of("0123456789") != std::string_view::npos) {
        throw Error(ErrorCode::Parse, "bad element '" + std::string(item) + "'");
      }
      const int e = std::stoi(std::string(item));
      block.push_back(e);
      max_element = std::max(max_element, e);
    }
    blocks.push_back(std::move(block));
  }
  return make_partition(static_cast<std::size_t>(max_element), blocks);
}

inline NestedPartition parse_nested(std::string_view text) {
  const auto parts = detail::split(text, ';');
  if (parts.size() != 2) throw Error(ErrorCode::Parse, "expected 'zeta ; xi', got '" + std::string(text) + "'");
  return make_nested(parse_partition(parts[0]), parse_partition(parts[1]));
}

// ---------------------------------------------------------------------------
// Hashing

inline std::uint64_t hash_value(const Partition& p) {
  std::uint64_t h = p.size();
  for (int a : p.assignment()) h = hash_combine(h, static_cast<std::uint64_t>(a));
  return h;
}

inline std::uint64_t hash_value(const NestedPartition& p) { return hash_combine(hash_value(p.zeta), hash_value(p.xi)); }

}  // namespace nestfrag

template <>
struct std::hash<nestfrag::Partition> {
  std::size_t operator()(const nestfrag::Partition& p) const noexcept { return nestfrag::hash_value(p); }
};

template <>
struct std::hash<nestfrag::NestedPartition> {
  std::size_t operator()(const nestfrag::NestedPartition& p) const noexcept { return nestfrag::hash_value(p); }
};
