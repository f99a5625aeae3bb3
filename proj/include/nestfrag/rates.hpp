#pragma once

// Exact transition rates of the chain restricted to [n].
//
// Rates are masses of the jump measure on events whose effect on the current
// state is a given target: every erosion atom and every dislocation outcome
// is pushed through the state update, identity outcomes are dropped, and
// atoms landing on the same target are summed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nestfrag/events.hpp"
#include "nestfrag/mass_partition.hpp"
#include "nestfrag/paintbox.hpp"
#include "nestfrag/partition.hpp"

namespace nestfrag {

/// Largest ground set for which rows of the generator are assembled.
inline constexpr std::size_t kGeneratorCap = 6;

struct JumpTarget {
  NestedPartition from;
  NestedPartition to;
  double rate = 0.0;
};

using GeneratorRow = std::vector<JumpTarget>;

namespace detail {

class RowAccumulator {
 public:
  explicit RowAccumulator(const NestedPartition& from) : from_(from) {}

  void add(const NestedPartition& to, double rate) {
    if (rate <= 0.0 || to == from_) return;
    rates_[to] += rate;
  }

  void add(const GeneratorRow& row) {
    for (const auto& j : row) add(j.to, j.rate);
  }

  GeneratorRow finish() const {
    GeneratorRow out;
    out.reserve(rates_.size());
    for (const auto& [to, rate] : rates_) out.push_back({from_, to, rate});
    return out;
  }

 private:
  const NestedPartition& from_;
  std::map<NestedPartition, double> rates_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Erosion

inline GeneratorRow erosion_jumps(const NestedPartition& pi, const FragmentationParams& params) {
  detail::RowAccumulator acc(pi);
  const auto s = block_structure(pi);
  for (std::size_t b = 0; b < s.inner_blocks.size(); ++b) {
    if (params.c_out > 0.0) acc.add(apply_outer_erosion(pi, s, static_cast<int>(b)), params.c_out);
    for (Element e : s.inner_blocks[b]) {
      if (params.c_in1 > 0.0) acc.add(apply_inner_erosion(pi, e, false), params.c_in1);
      if (params.c_in2 > 0.0) acc.add(apply_inner_erosion(pi, e, true), params.c_in2);
    }
  }
  return acc.finish();
}

// ---------------------------------------------------------------------------
// Univariate split probabilities

/// Probability that a paintbox with frequencies s splits a group into the
/// given child sizes: the sum over index vectors i, with i_j = 0 (dust)
/// allowed only for children of size 1 and nonzero indices pairwise distinct,
/// of prod_j s_{i_j}^{n_j}, with s_0 the dust.
inline double exact_split_probability_univariate(const MassPartition& s, std::span<const std::size_t> child_sizes) {
  const double dust = s.dust();
  std::vector<bool> used(s.s.size(), false);
  std::function<double(std::size_t)> rec = [&](std::size_t j) -> double {
    if (j == child_sizes.size()) return 1.0;
    const auto size = child_sizes[j];
    double total = 0.0;
    if (size == 1 && dust > 0.0) total += dust * rec(j + 1);
    for (std::size_t k = 0; k < s.s.size(); ++k) {
      if (used[k]) continue;
      used[k] = true;
      total += std::pow(s.s[k], static_cast<double>(size)) * rec(j + 1);
      used[k] = false;
    }
    return total;
  };
  return rec(0);
}

/// Law of the grouping of `rows` inner blocks under an outer paintbox.
inline std::vector<std::pair<Partition, double>> outer_split_law(const MassPartition& s, std::size_t rows) {
  std::vector<std::pair<Partition, double>> law;
  for (auto& grouping : enumerate_partitions(rows, kGeneratorCap)) {
    std::vector<std::size_t> sizes;
    for (const auto& b : grouping.blocks()) sizes.push_back(b.size());
    const double prob = exact_split_probability_univariate(s, sizes);
    if (prob > 0.0) law.emplace_back(std::move(grouping), prob);
  }
  return law;
}

/// Law of the local outcome of an inner dislocation of a block of size m.
/// Enumerates every assignment of the m positions to the positive-length
/// cells of the layout; an assignment has probability prod of cell lengths.
inline std::vector<std::pair<DistinguishedNestedPartition, double>> inner_split_law(const BivariateMassPartition& p,
                                                                                   std::size_t m) {
  if (m > kGeneratorCap) throw Error(ErrorCode::TooLarge, "exact inner split law capped at block size 6");
  const BivariateLayout layout(p);
  const auto cells = layout.cells();
  std::map<DistinguishedNestedPartition, double> law;
  std::vector<InnerLabel> labels(m);
  std::function<void(std::size_t, double)> rec = [&](std::size_t j, double prob) {
    if (j == m) {
      law[local_outcome(labels)] += prob;
      return;
    }
    for (const auto& cell : cells) {
      labels[j] = cell.label;
      rec(j + 1, prob * cell.length());
    }
  };
  rec(0, 1.0);
  return {law.begin(), law.end()};
}

// ---------------------------------------------------------------------------
// Generator rows

/// Rates of the restricted chain, with the split laws for every block size up
/// to the ground-set size computed once. Immutable after construction.
class RateModel {
 public:
  RateModel(FragmentationParams params, std::size_t n) : params_(std::move(params)), n_(n) {
    if (n > kGeneratorCap) {
      throw Error(ErrorCode::TooLarge, "exact rates capped at n=" + std::to_string(kGeneratorCap));
    }
    for (const auto& atom : params_.nu_out) {
      auto& laws = outer_laws_.emplace_back(n + 1);
      for (std::size_t r = 2; r <= n; ++r) laws[r] = outer_split_law(atom.s, r);
    }
    for (const auto& atom : params_.nu_in) {
      auto& laws = inner_laws_.emplace_back(n + 1);
      for (std::size_t m = 1; m <= n; ++m) laws[m] = inner_split_law(atom.p, m);
    }
  }

  const FragmentationParams& params() const { return params_; }
  std::size_t n() const { return n_; }

  GeneratorRow erosion(const NestedPartition& pi) const { return erosion_jumps(pi, params_); }

  GeneratorRow outer_dislocation(const NestedPartition& pi) const {
    check_size(pi);
    detail::RowAccumulator acc(pi);
    const auto s = block_structure(pi);
    for (std::size_t c = 0; c < s.rows_of_outer.size(); ++c) {
      const auto rows = s.rows_of_outer[c].size();
      if (rows < 2) continue;
      for (std::size_t a = 0; a < params_.nu_out.size(); ++a) {
        for (const auto& [grouping, prob] : outer_laws_[a][rows]) {
          acc.add(apply_outer_dislocation(pi, s, static_cast<int>(c), grouping), params_.nu_out[a].rate * prob);
        }
      }
    }
    return acc.finish();
  }

  GeneratorRow inner_dislocation(const NestedPartition& pi) const {
    check_size(pi);
    detail::RowAccumulator acc(pi);
    const auto s = block_structure(pi);
    for (std::size_t b = 0; b < s.inner_blocks.size(); ++b) {
      const auto m = s.inner_blocks[b].size();
      for (std::size_t a = 0; a < params_.nu_in.size(); ++a) {
        for (const auto& [local, prob] : inner_laws_[a][m]) {
          acc.add(apply_inner_dislocation(pi, s, static_cast<int>(b), local), params_.nu_in[a].rate * prob);
        }
      }
    }
    return acc.finish();
  }

  /// Complete row: all mechanisms, duplicates merged, sorted by target.
  GeneratorRow row(const NestedPartition& pi) const {
    check_size(pi);
    detail::RowAccumulator acc(pi);
    acc.add(erosion(pi));
    acc.add(outer_dislocation(pi));
    acc.add(inner_dislocation(pi));
    return acc.finish();
  }

 private:
  void check_size(const NestedPartition& pi) const {
    if (pi.size() > n_) throw Error(ErrorCode::TooLarge, "state larger than the model's ground set");
  }

  FragmentationParams params_;
  std::size_t n_;
  std::vector<std::vector<std::vector<std::pair<Partition, double>>>> outer_laws_;
  std::vector<std::vector<std::vector<std::pair<DistinguishedNestedPartition, double>>>> inner_laws_;
};

inline GeneratorRow exact_outer_dislocation_jumps(const NestedPartition& pi, const FragmentationParams& params) {
  return RateModel(params, pi.size()).outer_dislocation(pi);
}

inline GeneratorRow exact_inner_dislocation_jumps(const NestedPartition& pi, const FragmentationParams& params) {
  return RateModel(params, pi.size()).inner_dislocation(pi);
}

inline GeneratorRow generator_row(const NestedPartition& pi, const FragmentationParams& params) {
  return RateModel(params, pi.size()).row(pi);
}

inline double total_rate(const GeneratorRow& row) {
  double total = 0.0;
  for (const auto& j : row) total += j.rate;
  return total;
}

inline double rate_to(const GeneratorRow& row, const NestedPartition& to) {
  for (const auto& j : row) {
    if (j.to == to) return j.rate;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Closed-form rates under binary branching

struct BinaryRate {
  double rate = 0.0;
  bool binary_jump = false;  // false: rate 0 because pi' is no binary fragmentation of pi
  // Labeling is not unique and the formula counts one orientation where the
  // jump measure counts two (both sides of the split are single inner blocks,
  // or an inner block splits into two singletons that share the outcome).
  bool symmetric_outer = false;
  bool symmetric_inner = false;
  // B_1 = C_1 and B_2 = C_2 with the nu_in3 term active: both orientations of
  // the third binary shape were added.
  bool in3_both_orientations = false;
  std::string reason;

  bool flagged() const { return symmetric_outer || symmetric_inner; }
};

namespace detail {

using ElementSet = std::vector<Element>;  // sorted

inline bool subset(const ElementSet& a, const ElementSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

inline ElementSet set_union(const ElementSet& a, const ElementSet& b) {
  ElementSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

/// Blocks of `coarse` that `fine` splits, each with its pieces.
inline std::vector<std::pair<Block, std::vector<Block>>> split_blocks(const Partition& coarse, const Partition& fine) {
  std::vector<std::pair<Block, std::vector<Block>>> out;
  const auto fine_blocks = fine.blocks();
  for (const auto& block : coarse.blocks()) {
    std::vector<Block> pieces;
    for (const auto& f : fine_blocks) {
      if (coarse.block_of(f.front()) == coarse.block_of(block.front())) pieces.push_back(f);
    }
    if (pieces.size() > 1) out.emplace_back(block, std::move(pieces));
  }
  return out;
}

inline int inner_blocks_within(const Partition& zeta, const ElementSet& c) {
  std::vector<int> seen;
  for (Element e : c) {
    const int b = zeta.block_of(e);
    if (std::find(seen.begin(), seen.end(), b) == seen.end()) seen.push_back(b);
  }
  return static_cast<int>(seen.size());
}

inline double integrate(const PointMeasure& nu, int a, int b) {
  double total = 0.0;
  for (const auto& pt : nu) total += pt.rate * std::pow(pt.x, a) * std::pow(1.0 - pt.x, b);
  return total;
}

}  // namespace detail

/// Rate from pi to pi' under binary branching, evaluated term by term from
/// the participating blocks B (inner) and C (outer) and their pieces
/// B_1, B_2 and C_1, C_2 with B_1 inside C_1.
inline BinaryRate binary_rate(const NestedPartition& pi, const NestedPartition& pi_prime, const BinaryMeasures& nu,
                              double c_out, double c_in1, double c_in2) {
  using detail::ElementSet;
  BinaryRate result;
  if (pi_prime == pi || !nested_leq(pi_prime, pi)) {
    result.reason = "target is not a strict fragmentation of the source";
    return result;
  }
  const auto zeta_splits = detail::split_blocks(pi.zeta, pi_prime.zeta);
  const auto xi_splits = detail::split_blocks(pi.xi, pi_prime.xi);
  if (zeta_splits.size() > 1 || xi_splits.size() > 1) {
    result.reason = "more than one block fragments";
    return result;
  }
  if ((!zeta_splits.empty() && zeta_splits[0].second.size() != 2) ||
      (!xi_splits.empty() && xi_splits[0].second.size() != 2)) {
    result.reason = "a block fragments into more than two pieces";
    return result;
  }
  const bool zeta_same = zeta_splits.empty();
  const bool xi_same = xi_splits.empty();

  ElementSet b1, b2, c1, c2;
  if (!zeta_same) {
    const auto& [b, pieces] = zeta_splits[0];
    if (xi_same) {
      c1 = pi.xi.block(pi.xi.block_of(b.front()));
      b1 = pieces[0];
      b2 = pieces[1];
    } else {
      const auto& [c, parts] = xi_splits[0];
      if (!detail::subset(b, c)) {
        result.binary_jump = true;
        result.reason = "participating inner block lies outside the participating outer block";
        return result;
      }
      const bool a_in_first = detail::subset(pieces[0], parts[0]);
      b1 = pieces[0];
      b2 = pieces[1];
      // C_1 holds B_1; when both pieces stay together C_2 is the other part.
      c1 = a_in_first ? parts[0] : parts[1];
      c2 = a_in_first ? parts[1] : parts[0];
    }
  } else {
    // Only the outer block splits; B is an inner block forming a whole side.
    const auto& [c, parts] = xi_splits[0];
    const bool first_single = detail::inner_blocks_within(pi.zeta, parts[0]) == 1;
    const bool second_single = detail::inner_blocks_within(pi.zeta, parts[1]) == 1;
    result.symmetric_outer = first_single && second_single;
    const bool use_second = second_single && !first_single;
    c1 = use_second ? parts[1] : parts[0];
    c2 = use_second ? parts[0] : parts[1];
    b1 = pi.zeta.block(pi.zeta.block_of(c1.front()));
  }
  result.binary_jump = true;

  const int x1 = static_cast<int>(b1.size());
  const int x2 = static_cast<int>(b2.size());
  const int x = std::min(x1, x2);
  const int y1 = detail::inner_blocks_within(pi_prime.zeta, c1);
  const int y2 = detail::inner_blocks_within(pi_prime.zeta, c2);
  const int y = std::min(y1, y2);
  const bool b1_is_c1 = !b1.empty() && b1 == c1;
  const bool b2_is_c2 = !b2.empty() && b2 == c2;

  if (!zeta_same && x1 == 1 && x2 == 1 && (xi_same || (b1_is_c1 && b2_is_c2))) result.symmetric_inner = true;

  double rate = 0.0;
  if (zeta_same && y == 1) rate += c_out;
  if (xi_same && x == 1) rate += c_in1;
  // #B_j = #zeta'|C_j = 1 with B_j inside C_j, i.e. B_j = C_j is a singleton.
  if ((x1 == 1 && b1_is_c1) || (x2 == 1 && b2_is_c2)) rate += c_in2;
  if (zeta_same) rate += detail::integrate(nu.out, y1, y2);
  if (xi_same) rate += detail::integrate(nu.in1, x1, x2);
  if (detail::set_union(b1, b2) == c1) rate += detail::integrate(nu.in2, x1, x2);
  if (zeta_same || !detail::subset(b2, c1)) {
    if (b2 == c2) rate += detail::integrate(nu.in3, x1, x2);
    if (b1 == c1) rate += detail::integrate(nu.in3, x2, x1);
    result.in3_both_orientations = b1 == c1 && b2 == c2 && !nu.in3.empty();
  }
  result.rate = rate;
  return result;
}

}  // namespace nestfrag
