#pragma once

// State updates for single fragmentation events on a nested partition of [n].
// Each update touches one outer block; blocks are addressed by their canonical
// (least-element) index. Unchanged results are returned as-is so callers can
// detect identity events by equality.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nestfrag/partition.hpp"

namespace nestfrag {

/// Inner blocks grouped by outer block, both in least-element order.
struct BlockStructure {
  std::vector<Block> inner_blocks;             // inner index -> elements, increasing
  std::vector<int> outer_of_inner;             // inner index -> outer index
  std::vector<std::vector<int>> rows_of_outer;  // outer index -> inner indices, increasing
};

inline BlockStructure block_structure(const NestedPartition& state) {
  BlockStructure s;
  s.inner_blocks = state.zeta.blocks();
  s.outer_of_inner.resize(s.inner_blocks.size());
  s.rows_of_outer.resize(static_cast<std::size_t>(state.xi.block_count()));
  for (std::size_t b = 0; b < s.inner_blocks.size(); ++b) {
    const int outer = state.xi.block_of(s.inner_blocks[b].front());
    s.outer_of_inner[b] = outer;
    s.rows_of_outer[static_cast<std::size_t>(outer)].push_back(static_cast<int>(b));
  }
  return s;
}

namespace detail {

class Relabeler {
 public:
  explicit Relabeler(const NestedPartition& state)
      : zeta_(state.zeta.assignment().begin(), state.zeta.assignment().end()),
        xi_(state.xi.assignment().begin(), state.xi.assignment().end()),
        fresh_(static_cast<std::int64_t>(state.size()) + 1) {}

  std::int64_t fresh() { return fresh_++; }
  std::int64_t& zeta(Element e) { return zeta_[static_cast<std::size_t>(e - 1)]; }
  std::int64_t& xi(Element e) { return xi_[static_cast<std::size_t>(e - 1)]; }

  NestedPartition finish() const { return {Partition::from_labels(zeta_), Partition::from_labels(xi_)}; }

 private:
  std::vector<std::int64_t> zeta_;
  std::vector<std::int64_t> xi_;
  std::int64_t fresh_;
};

}  // namespace detail

/// Inner block `inner` leaves its outer block to form a new one.
inline NestedPartition apply_outer_erosion(const NestedPartition& state, const BlockStructure& s, int inner) {
  const auto outer = static_cast<std::size_t>(s.outer_of_inner[static_cast<std::size_t>(inner)]);
  if (s.rows_of_outer[outer].size() < 2) return state;
  detail::Relabeler r(state);
  const auto label = r.fresh();
  for (Element e : s.inner_blocks[static_cast<std::size_t>(inner)]) r.xi(e) = label;
  return r.finish();
}

/// Element `e` becomes a singleton inner block; with `leave_outer` it also
/// becomes a singleton outer block.
inline NestedPartition apply_inner_erosion(const NestedPartition& state, Element e, bool leave_outer) {
  detail::Relabeler r(state);
  r.zeta(e) = r.fresh();
  if (leave_outer) r.xi(e) = r.fresh();
  auto next = r.finish();
  return next == state ? state : next;
}

/// Regroups the inner blocks of outer block `outer`: row t (in least-element
/// order) joins group `grouping.block_of(t + 1)`.
inline NestedPartition apply_outer_dislocation(const NestedPartition& state, const BlockStructure& s, int outer,
                                               const Partition& grouping) {
  if (grouping.block_count() <= 1) return state;
  const auto& rows = s.rows_of_outer[static_cast<std::size_t>(outer)];
  detail::Relabeler r(state);
  const auto base = r.fresh();
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto label = base + grouping.block_of(static_cast<Element>(t + 1));
    for (Element e : s.inner_blocks[static_cast<std::size_t>(rows[t])]) r.xi(e) = label;
  }
  for (int g = 1; g < grouping.block_count(); ++g) r.fresh();
  return r.finish();
}

/// Replaces inner block `inner` according to a local outcome on positions
/// 1..|block|. Positions in the outer block of * stay in the mother outer block
/// together with every other inner block of it; other local outer blocks
/// become new outer blocks.
inline NestedPartition apply_inner_dislocation(const NestedPartition& state, const BlockStructure& s, int inner,
                                               const DistinguishedNestedPartition& local) {
  const auto& block = s.inner_blocks[static_cast<std::size_t>(inner)];
  detail::Relabeler r(state);
  const auto inner_base = r.fresh();
  for (int i = 1; i < local.inner.zeta.block_count(); ++i) r.fresh();
  const auto outer_base = r.fresh();
  for (int i = 1; i < local.inner.xi.block_count(); ++i) r.fresh();
  for (std::size_t j = 0; j < block.size(); ++j) {
    const Element e = block[j];
    const auto pos = static_cast<Element>(j + 1);
    r.zeta(e) = inner_base + local.inner.zeta.block_of(pos);
    const int local_outer = local.inner.xi.block_of(pos);
    if (!(local.star_xi_block && *local.star_xi_block == local_outer)) r.xi(e) = outer_base + local_outer;
  }
  auto next = r.finish();
  return next == state ? state : next;
}

}  // namespace nestfrag
