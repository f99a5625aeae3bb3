#pragma once

// Paintbox samplers.
//
// Each element (or, for outer dislocations, each inner block) receives a
// uniform draw and is assigned to the interval of [0, 1] containing it. The
// samplers take the uniforms from a caller-supplied source indexed by
// position, so a simulation can key every draw to a stable identity.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "nestfrag/mass_partition.hpp"
#include "nestfrag/partition.hpp"
#include "nestfrag/rng.hpp"

namespace nestfrag {

template <typename F>
concept UniformSource = requires(F f, std::size_t i) {
  { f(i) } -> std::convertible_to<double>;
};

/// Consumes an RngHandle sequentially, ignoring the position argument.
inline auto sequential_uniforms(RngHandle& rng) {
  return [&rng](std::size_t) { return rng.uniform(); };
}

/// Position i reads the i-th word of a fixed stream.
inline auto indexed_uniforms(std::uint64_t seed, std::uint64_t stream) {
  return [seed, stream](std::size_t i) { return draw_uniform(seed, stream, i); };
}

// Cells shorter than this are treated as absent (rounding residue of sums).
inline constexpr double kNegligibleCell = 1e-12;

// ---------------------------------------------------------------------------
// Univariate paintbox

/// Intervals [t_{k-1}, t_k) for the parts of s, followed by the dust [t_K, 1].
class UnivariateLayout {
 public:
  explicit UnivariateLayout(const MassPartition& s) {
    double t = 0.0;
    for (double x : s.s) {
      t += x;
      ends_.push_back(t);
    }
  }

  /// 1-based part index, or 0 for dust.
  int locate(double u) const {
    const auto it = std::upper_bound(ends_.begin(), ends_.end(), u);
    if (it == ends_.end()) return 0;
    return static_cast<int>(it - ends_.begin()) + 1;
  }

 private:
  std::vector<double> ends_;
};

template <UniformSource Source>
Partition sample_univariate(const MassPartition& s, std::size_t n, Source&& uniforms) {
  const UnivariateLayout layout(s);
  std::vector<std::int64_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int part = layout.locate(uniforms(i));
    labels[i] = part > 0 ? part : -static_cast<std::int64_t>(i) - 1;
  }
  return Partition::from_labels(labels);
}

inline Partition sample_univariate(const MassPartition& s, std::size_t n, RngHandle& rng) {
  return sample_univariate(s, n, sequential_uniforms(rng));
}

/// Groups k_inner inner blocks into outer blocks; dust blocks stay alone.
template <UniformSource Source>
Partition sample_outer(const MassPartition& s, std::size_t k_inner, Source&& uniforms) {
  return sample_univariate(s, k_inner, std::forward<Source>(uniforms));
}

inline Partition sample_outer(const MassPartition& s, std::size_t k_inner, RngHandle& rng) {
  return sample_outer(s, k_inner, sequential_uniforms(rng));
}

// ---------------------------------------------------------------------------
// Inner-dislocation (distinguished) paintbox

enum class CellKind { MotherBlock, MotherDust, NewBlock, NewDust, Isolated };

/// Where an element of a fragmenting inner block lands. `outer` (1-based) is
/// set for NewBlock/NewDust, `inner` (1-based) for MotherBlock/NewBlock.
struct InnerLabel {
  CellKind kind = CellKind::MotherBlock;
  int outer = 0;
  int inner = 0;

  friend bool operator==(const InnerLabel&, const InnerLabel&) = default;
};

struct PaintboxCell {
  InnerLabel label;
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
};

/// Interval layout of a bivariate mass partition:
///   [0, u_bar)                     mother outer block; parts u_l then mother dust
///   [tbar_{k-1}, tbar_k)           new outer block k; parts s_{k,l} then its dust
///   [u_bar + sum s_bar, 1]         isolated elements
class BivariateLayout {
 public:
  explicit BivariateLayout(const BivariateMassPartition& p) {
    double t = 0.0;
    for (std::size_t l = 0; l < p.u.size(); ++l) add({CellKind::MotherBlock, 0, static_cast<int>(l + 1)}, t, p.u[l]);
    add({CellKind::MotherDust, 0, 0}, t, p.u_bar - t);
    t = p.u_bar;
    for (std::size_t k = 0; k < p.s_bar.size(); ++k) {
      const double start = t;
      const int outer = static_cast<int>(k + 1);
      for (std::size_t l = 0; l < p.s_rows[k].size(); ++l) {
        add({CellKind::NewBlock, outer, static_cast<int>(l + 1)}, t, p.s_rows[k][l]);
      }
      add({CellKind::NewDust, outer, 0}, t, start + p.s_bar[k] - t);
      t = start + p.s_bar[k];
    }
    add({CellKind::Isolated, 0, 0}, t, 1.0 - t);
  }

  /// Cells of positive length, in increasing position.
  std::span<const PaintboxCell> cells() const { return cells_; }

  const InnerLabel& locate(double u) const {
    const auto it = std::upper_bound(cells_.begin(), cells_.end(), u,
                                     [](double x, const PaintboxCell& c) { return x < c.hi; });
    return it == cells_.end() ? cells_.back().label : it->label;
  }

 private:
  void add(InnerLabel label, double& t, double length) {
    if (length > kNegligibleCell) cells_.push_back({label, t, t + length});
    t += std::max(length, 0.0);
  }

  std::vector<PaintboxCell> cells_;
};

/// Builds the nested partition on positions 1..m induced by a label vector.
/// Dust labels never group elements in the inner partition; NewDust(k)
/// elements still share outer block k, Isolated ones are alone in both.
inline DistinguishedNestedPartition local_outcome(std::span<const InnerLabel> labels) {
  const std::size_t m = labels.size();
  std::vector<std::int64_t> inner(m), outer(m);
  constexpr std::int64_t kStride = 1 << 20;
  std::optional<std::size_t> star_member;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& lab = labels[i];
    const std::int64_t unique = -static_cast<std::int64_t>(i) - 1;
    switch (lab.kind) {
      case CellKind::MotherBlock:
        inner[i] = lab.inner;
        outer[i] = 0;
        break;
      case CellKind::MotherDust:
        inner[i] = unique;
        outer[i] = 0;
        break;
      case CellKind::NewBlock:
        inner[i] = lab.outer * kStride + lab.inner;
        outer[i] = lab.outer;
        break;
      case CellKind::NewDust:
        inner[i] = unique;
        outer[i] = lab.outer;
        break;
      case CellKind::Isolated:
        inner[i] = unique;
        outer[i] = unique;
        break;
    }
    if (outer[i] == 0 && !star_member) star_member = i;
  }
  DistinguishedNestedPartition out;
  out.inner.zeta = Partition::from_labels(inner);
  out.inner.xi = Partition::from_labels(outer);
  if (star_member) out.star_xi_block = out.inner.xi.assignment()[*star_member];
  return out;
}

struct InnerSplitOutcome {
  Block block;                         // the fragmenting inner block, increasing
  std::vector<InnerLabel> labels;      // labels[j] belongs to block[j]
  DistinguishedNestedPartition local;  // on positions 1..|block|
};

template <UniformSource Source>
InnerSplitOutcome sample_inner(const BivariateMassPartition& p, const Block& block, Source&& uniforms) {
  const BivariateLayout layout(p);
  InnerSplitOutcome out;
  out.block = block;
  out.labels.reserve(block.size());
  for (std::size_t j = 0; j < block.size(); ++j) out.labels.push_back(layout.locate(uniforms(j)));
  out.local = local_outcome(out.labels);
  return out;
}

inline InnerSplitOutcome sample_inner(const BivariateMassPartition& p, const Block& block, RngHandle& rng) {
  return sample_inner(p, block, sequential_uniforms(rng));
}

// ---------------------------------------------------------------------------
// Empirical asymptotic frequencies

/// Non-singleton block frequencies; singletons count as dust.
inline MassPartition empirical_frequencies(const Partition& p) {
  const double n = static_cast<double>(p.size());
  std::vector<double> s;
  std::vector<std::size_t> sizes(static_cast<std::size_t>(p.block_count()), 0);
  for (int b : p.assignment()) ++sizes[static_cast<std::size_t>(b)];
  for (auto size : sizes) {
    if (size > 1) s.push_back(static_cast<double>(size) / n);
  }
  std::sort(s.begin(), s.end(), std::greater<>());
  return {std::move(s)};
}

/// Frequencies of a distinguished nested partition. The outer block of * gives
/// (u_bar, u); every other non-singleton outer block gives (s_bar_k, row k).
inline BivariateMassPartition empirical_frequencies(const DistinguishedNestedPartition& d) {
  const auto& zeta = d.inner.zeta;
  const auto& xi = d.inner.xi;
  const double n = static_cast<double>(xi.size());
  std::vector<std::size_t> inner_sizes(static_cast<std::size_t>(zeta.block_count()), 0);
  std::vector<std::size_t> outer_sizes(static_cast<std::size_t>(xi.block_count()), 0);
  std::vector<int> outer_of_inner(static_cast<std::size_t>(zeta.block_count()), 0);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    ++inner_sizes[static_cast<std::size_t>(zeta.assignment()[i])];
    ++outer_sizes[static_cast<std::size_t>(xi.assignment()[i])];
    outer_of_inner[static_cast<std::size_t>(zeta.assignment()[i])] = xi.assignment()[i];
  }
  std::vector<std::vector<double>> rows(outer_sizes.size());
  for (std::size_t b = 0; b < inner_sizes.size(); ++b) {
    if (inner_sizes[b] > 1) rows[static_cast<std::size_t>(outer_of_inner[b])].push_back(static_cast<double>(inner_sizes[b]) / n);
  }
  std::vector<double> u;
  double u_bar = 0.0;
  std::vector<double> s_bar;
  std::vector<std::vector<double>> s_rows;
  for (std::size_t c = 0; c < outer_sizes.size(); ++c) {
    const double freq = static_cast<double>(outer_sizes[c]) / n;
    if (d.star_xi_block && static_cast<std::size_t>(*d.star_xi_block) == c) {
      u_bar = freq;
      u = rows[c];
    } else if (outer_sizes[c] > 1) {
      s_bar.push_back(freq);
      s_rows.push_back(rows[c]);
    }
  }
  return canonicalize_bivariate(std::move(u), std::move(s_rows), u_bar, std::move(s_bar));
}

inline BivariateMassPartition empirical_frequencies(const NestedPartition& p) {
  return empirical_frequencies(DistinguishedNestedPartition{p, std::nullopt});
}

}  // namespace nestfrag
