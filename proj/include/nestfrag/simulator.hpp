#pragma once

// Event-driven simulation of the restricted chain.
//
// Every potential event source is a clock identified by (mechanism, atom,
// outer ordinal, row ordinal, column rank). Outer blocks and the inner blocks
// (rows) inside an outer block are ordered by least element, and column rank
// is the position of an element inside its row; these identities coincide at
// every truncation level for all blocks meeting [n]. Each clock is a Poisson
// process whose points and paintbox marks are pure functions of the seed and
// the key, so runs at different levels share their events exactly.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nestfrag/error.hpp"
#include "nestfrag/events.hpp"
#include "nestfrag/mass_partition.hpp"
#include "nestfrag/paintbox.hpp"
#include "nestfrag/partition.hpp"
#include "nestfrag/rng.hpp"

namespace nestfrag {

inline constexpr const char* kVersion = "1.0.0";

enum class MechanismKind { EOut, EIn1, EIn2, DOut, DIn };

struct Mechanism {
  MechanismKind kind = MechanismKind::EOut;
  int atom = -1;  // index into nu_out / nu_in for dislocations

  friend bool operator==(const Mechanism&, const Mechanism&) = default;
};

inline std::string to_string(const Mechanism& m) {
  switch (m.kind) {
    case MechanismKind::EOut: return "E_OUT";
    case MechanismKind::EIn1: return "E_IN1";
    case MechanismKind::EIn2: return "E_IN2";
    case MechanismKind::DOut: return "D_OUT(" + std::to_string(m.atom) + ")";
    case MechanismKind::DIn: return "D_IN(" + std::to_string(m.atom) + ")";
  }
  return "?";
}

inline Mechanism parse_mechanism(std::string_view text) {
  if (text == "E_OUT") return {MechanismKind::EOut, -1};
  if (text == "E_IN1") return {MechanismKind::EIn1, -1};
  if (text == "E_IN2") return {MechanismKind::EIn2, -1};
  for (auto [prefix, kind] : {std::pair{std::string_view("D_OUT("), MechanismKind::DOut},
                              std::pair{std::string_view("D_IN("), MechanismKind::DIn}}) {
    if (text.starts_with(prefix) && text.ends_with(")")) {
      const auto digits = text.substr(prefix.size(), text.size() - prefix.size() - 1);
      int atom = 0;
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), atom);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && atom >= 0) return {kind, atom};
    }
  }
  throw Error(ErrorCode::Parse, "unknown mechanism '" + std::string(text) + "'");
}

struct ClockKey {
  Mechanism mechanism;
  int outer = 0;
  int row = 0;
  int column = 0;

  std::uint64_t stream() const {
    return hash_words({static_cast<std::uint64_t>(mechanism.kind), static_cast<std::uint64_t>(mechanism.atom + 1),
                       static_cast<std::uint64_t>(outer), static_cast<std::uint64_t>(row),
                       static_cast<std::uint64_t>(column)});
  }
};

struct TrajectoryEvent {
  double time = 0.0;
  Mechanism mechanism;
  Block target_block;  // the inner block (or, for D_OUT, the outer block) hit by the event
  NestedPartition state_after;
  bool null_event = false;  // identity outcome, kept only when null events are logged
};

struct Horizon {
  double time = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> max_events;
};

struct RunOptions {
  bool log_null_events = false;
};

struct Trajectory {
  std::size_t n = 0;
  FragmentationParams params;
  std::uint64_t seed = 0;
  NestedPartition initial;
  std::vector<TrajectoryEvent> events;
  double end_time = 0.0;
  bool absorbed = false;

  /// State at time t (right-continuous).
  NestedPartition state_at(double t) const {
    const NestedPartition* state = &initial;
    for (const auto& e : events) {
      if (e.time > t) break;
      if (!e.null_event) state = &e.state_after;
    }
    return *state;
  }

  std::size_t jump_count() const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [](const TrajectoryEvent& e) { return !e.null_event; }));
  }
};

inline NestedPartition default_initial(std::size_t n) { return {Partition::coarsest(n), Partition::coarsest(n)}; }

// ---------------------------------------------------------------------------
// Clocks

namespace detail {

/// Points of one Poisson clock of rate `rate`, generated in epochs of unit
/// expected count: epoch e covers [e / rate, (e + 1) / rate).
class PoissonClock {
 public:
  PoissonClock(std::uint64_t seed, std::uint64_t stream, double rate) : seed_(seed), stream_(stream), rate_(rate) {}

  struct Point {
    double time;
    std::uint64_t epoch;
    std::size_t index;
  };

  /// First point strictly after t.
  Point next_after(double t) {
    if (cached_ && cached_->time > t) return *cached_;
    const double scaled = t * rate_;
    auto epoch = static_cast<std::uint64_t>(std::max(0.0, std::floor(scaled)));
    if (cached_ && cached_->epoch > epoch) epoch = cached_->epoch;
    for (;; ++epoch) {
      load(epoch);
      for (std::size_t i = 0; i < times_.size(); ++i) {
        if (times_[i] > t) {
          cached_ = Point{times_[i], epoch, i};
          return *cached_;
        }
      }
    }
  }

  std::uint64_t mark_stream(const Point& p) const { return hash_words({stream_, p.epoch, p.index, 0x6d61726bull}); }

 private:
  void load(std::uint64_t epoch) {
    if (loaded_ == epoch) return;
    const auto es = hash_words({stream_, epoch});
    const int count = poisson_from_uniform(draw_uniform(seed_, es, 0), 1.0);
    times_.clear();
    for (int i = 0; i < count; ++i) {
      times_.push_back((static_cast<double>(epoch) + draw_uniform(seed_, es, static_cast<std::uint64_t>(i) + 1)) / rate_);
    }
    std::sort(times_.begin(), times_.end());
    loaded_ = epoch;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  double rate_;
  std::optional<std::uint64_t> loaded_;
  std::vector<double> times_;
  std::optional<Point> cached_;
};

inline bool has_full_cell(const BivariateMassPartition& p) {
  for (const auto& row : p.s_rows) {
    for (double x : row) {
      if (x >= 1.0 - kNegligibleCell) return true;
    }
  }
  return false;
}

}  // namespace detail

class Simulator {
 public:
  Simulator(FragmentationParams params, std::size_t n, NestedPartition initial, std::uint64_t seed,
            RunOptions options = {})
      : params_(std::move(params)), n_(n), seed_(seed), options_(options), state_(std::move(initial)) {
    validate_params(params_);
    if (n_ == 0) throw Error(ErrorCode::BadParams, "n must be >= 1");
    if (state_.size() != n_) throw Error(ErrorCode::SizeMismatch, "initial state is not on [n]");
    if (!is_finer(state_.zeta, state_.xi)) throw Error(ErrorCode::BadParams, "initial zeta is not finer than xi");
  }

  Trajectory run(const Horizon& horizon) {
    if (!(horizon.time > 0.0)) throw Error(ErrorCode::HorizonNonpositive, "horizon must be positive");
    Trajectory traj;
    traj.n = n_;
    traj.params = params_;
    traj.seed = seed_;
    traj.initial = state_;
    double t = 0.0;
    std::size_t jumps = 0;
    for (;;) {
      if (horizon.max_events && jumps >= *horizon.max_events) {
        traj.end_time = t;
        return traj;
      }
      const auto s = block_structure(state_);
      const auto next = next_clock(s, t);
      if (!next) {
        traj.absorbed = true;
        traj.end_time = std::isfinite(horizon.time) ? horizon.time : t;
        return traj;
      }
      if (next->point.time > horizon.time) {
        traj.end_time = horizon.time;
        return traj;
      }
      t = next->point.time;
      auto event = fire(s, *next);
      if (event.state_after == state_) {
        if (options_.log_null_events) {
          event.null_event = true;
          traj.events.push_back(std::move(event));
        }
        continue;
      }
      state_ = event.state_after;
      traj.events.push_back(std::move(event));
      ++jumps;
    }
  }

 private:
  struct Pending {
    ClockKey key;
    detail::PoissonClock::Point point;
    std::uint64_t marks;
  };

  double rate_of(const Mechanism& m) const {
    switch (m.kind) {
      case MechanismKind::EOut: return params_.c_out;
      case MechanismKind::EIn1: return params_.c_in1;
      case MechanismKind::EIn2: return params_.c_in2;
      case MechanismKind::DOut: return params_.nu_out[static_cast<std::size_t>(m.atom)].rate;
      case MechanismKind::DIn: return params_.nu_in[static_cast<std::size_t>(m.atom)].rate;
    }
    return 0.0;
  }

  detail::PoissonClock& clock(const ClockKey& key) {
    const auto stream = key.stream();
    auto it = clocks_.find(stream);
    if (it == clocks_.end()) it = clocks_.emplace(stream, detail::PoissonClock(seed_, stream, rate_of(key.mechanism))).first;
    return it->second;
  }

  // Clocks that can still change the state; the others are skipped, which is
  // harmless because no clock's points depend on another's.
  template <typename F>
  void for_each_live_key(const BlockStructure& s, F&& f) const {
    for (std::size_t k = 0; k < s.rows_of_outer.size(); ++k) {
      const auto& rows = s.rows_of_outer[k];
      const auto r = rows.size();
      const int ki = static_cast<int>(k);
      for (std::size_t a = 0; a < params_.nu_out.size(); ++a) {
        if (r >= 2) f(ClockKey{{MechanismKind::DOut, static_cast<int>(a)}, ki, 0, 0});
      }
      for (std::size_t i = 0; i < r; ++i) {
        const auto size = s.inner_blocks[static_cast<std::size_t>(rows[i])].size();
        const int ii = static_cast<int>(i);
        if (params_.c_out > 0.0 && r >= 2) f(ClockKey{{MechanismKind::EOut, -1}, ki, ii, 0});
        for (std::size_t j = 0; j < size; ++j) {
          const int ji = static_cast<int>(j);
          if (params_.c_in1 > 0.0 && size >= 2) f(ClockKey{{MechanismKind::EIn1, -1}, ki, ii, ji});
          if (params_.c_in2 > 0.0 && (size >= 2 || r >= 2)) f(ClockKey{{MechanismKind::EIn2, -1}, ki, ii, ji});
        }
        for (std::size_t a = 0; a < params_.nu_in.size(); ++a) {
          const auto& p = params_.nu_in[a].p;
          const bool live = size >= 2 ? (r >= 2 || !detail::has_full_cell(p))
                                      : (r >= 2 && p.u_bar < 1.0 - kNegligibleCell);
          if (live) f(ClockKey{{MechanismKind::DIn, static_cast<int>(a)}, ki, ii, 0});
        }
      }
    }
  }

  std::optional<Pending> next_clock(const BlockStructure& s, double t) {
    std::optional<Pending> best;
    for_each_live_key(s, [&](const ClockKey& key) {
      auto& c = clock(key);
      const auto p = c.next_after(t);
      if (!best || p.time < best->point.time) best = Pending{key, p, c.mark_stream(p)};
    });
    return best;
  }

  TrajectoryEvent fire(const BlockStructure& s, const Pending& next) const {
    const auto& key = next.key;
    TrajectoryEvent ev;
    ev.time = next.point.time;
    ev.mechanism = key.mechanism;
    const auto& rows = s.rows_of_outer[static_cast<std::size_t>(key.outer)];
    const auto uniforms = indexed_uniforms(seed_, next.marks);
    switch (key.mechanism.kind) {
      case MechanismKind::EOut: {
        const int inner = rows[static_cast<std::size_t>(key.row)];
        ev.target_block = s.inner_blocks[static_cast<std::size_t>(inner)];
        ev.state_after = apply_outer_erosion(state_, s, inner);
        break;
      }
      case MechanismKind::EIn1:
      case MechanismKind::EIn2: {
        const auto& block = s.inner_blocks[static_cast<std::size_t>(rows[static_cast<std::size_t>(key.row)])];
        ev.target_block = block;
        ev.state_after = apply_inner_erosion(state_, block[static_cast<std::size_t>(key.column)],
                                             key.mechanism.kind == MechanismKind::EIn2);
        break;
      }
      case MechanismKind::DOut: {
        for (int inner : rows) {
          const auto& b = s.inner_blocks[static_cast<std::size_t>(inner)];
          ev.target_block.insert(ev.target_block.end(), b.begin(), b.end());
        }
        std::sort(ev.target_block.begin(), ev.target_block.end());
        const auto& atom = params_.nu_out[static_cast<std::size_t>(key.mechanism.atom)];
        const auto grouping = sample_outer(atom.s, rows.size(), uniforms);
        ev.state_after = apply_outer_dislocation(state_, s, key.outer, grouping);
        break;
      }
      case MechanismKind::DIn: {
        const int inner = rows[static_cast<std::size_t>(key.row)];
        ev.target_block = s.inner_blocks[static_cast<std::size_t>(inner)];
        const auto& atom = params_.nu_in[static_cast<std::size_t>(key.mechanism.atom)];
        const auto outcome = sample_inner(atom.p, ev.target_block, uniforms);
        ev.state_after = apply_inner_dislocation(state_, s, inner, outcome.local);
        break;
      }
    }
    return ev;
  }

  FragmentationParams params_;
  std::size_t n_;
  std::uint64_t seed_;
  RunOptions options_;
  NestedPartition state_;
  std::unordered_map<std::uint64_t, detail::PoissonClock> clocks_;
};

inline Trajectory run(const FragmentationParams& params, std::size_t n, const NestedPartition& initial,
                      const Horizon& horizon, std::uint64_t seed, RunOptions options = {}) {
  return Simulator(params, n, initial, seed, options).run(horizon);
}

inline Trajectory run(const FragmentationParams& params, std::size_t n, const Horizon& horizon, std::uint64_t seed,
                      RunOptions options = {}) {
  return run(params, n, default_initial(n), horizon, seed, options);
}

/// Runs on [m] and on [n] from the restricted initial state with the same
/// seed. Use a time horizon: an event cap counts jumps per level.
inline std::pair<Trajectory, Trajectory> coupled_run(const FragmentationParams& params, std::size_t m, std::size_t n,
                                                     const NestedPartition& initial, const Horizon& horizon,
                                                     std::uint64_t seed) {
  if (n > m) throw Error(ErrorCode::BadRange, "coupled_run needs n <= m");
  auto big = run(params, m, initial, horizon, seed);
  auto small = run(params, n, restrict(initial, n), horizon, seed);
  return {std::move(big), std::move(small)};
}

// ---------------------------------------------------------------------------
// JSONL trajectories

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

inline nlohmann::ordered_json block_to_json(const Block& b) {
  auto j = nlohmann::ordered_json::array();
  for (Element e : b) j.push_back(e);
  return j;
}

/// Header line, one line per event, trailer line with the end time.
inline void write_jsonl(std::ostream& out, const Trajectory& traj, const nlohmann::ordered_json& config) {
  nlohmann::ordered_json header;
  header["tool"] = "nestfrag";
  header["version"] = kVersion;
  header["config"] = config;
  header["n"] = traj.n;
  header["seed"] = traj.seed;
  header["initial"] = to_string(traj.initial);
  header["params"] = params_to_json(traj.params);
  out << nlohmann::ordered_json{{"header", header}}.dump() << '\n';
  for (const auto& e : traj.events) {
    nlohmann::ordered_json line;
    line["t"] = e.time;
    line["mech"] = to_string(e.mechanism);
    line["block"] = block_to_json(e.target_block);
    line["zeta"] = to_string(e.state_after.zeta);
    line["xi"] = to_string(e.state_after.xi);
    if (e.null_event) line["null"] = true;
    out << line.dump() << '\n';
  }
  nlohmann::ordered_json trailer;
  trailer["end_time"] = traj.end_time;
  trailer["absorbed"] = traj.absorbed;
  trailer["jumps"] = traj.jump_count();
  out << nlohmann::ordered_json{{"trailer", trailer}}.dump() << '\n';
}

struct TrajectoryFile {
  Trajectory trajectory;
  nlohmann::ordered_json config;
};

inline TrajectoryFile read_jsonl(std::istream& in) {
  TrajectoryFile file;
  auto& traj = file.trajectory;
  std::string line;
  bool have_header = false;
  bool have_trailer = false;
  std::size_t lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto j = nlohmann::ordered_json::parse(line);
      if (j.contains("header")) {
        const auto& h = j.at("header");
        file.config = h.value("config", nlohmann::ordered_json::object());
        traj.n = h.at("n").get<std::size_t>();
        traj.seed = h.at("seed").get<std::uint64_t>();
        traj.initial = parse_nested(h.at("initial").get<std::string>());
        traj.params = params_from_json(nlohmann::json::parse(h.at("params").dump()));
        have_header = true;
      } else if (j.contains("trailer")) {
        traj.end_time = j.at("trailer").at("end_time").get<double>();
        traj.absorbed = j.at("trailer").value("absorbed", false);
        have_trailer = true;
      } else {
        TrajectoryEvent e;
        e.time = j.at("t").get<double>();
        e.mechanism = parse_mechanism(j.at("mech").get<std::string>());
        e.target_block = j.at("block").get<Block>();
        e.state_after = {parse_partition(j.at("zeta").get<std::string>()), parse_partition(j.at("xi").get<std::string>())};
        e.null_event = j.value("null", false);
        traj.events.push_back(std::move(e));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, "trajectory line " + std::to_string(lineno) + ": " + e.what());
  }
  if (!have_header) throw Error(ErrorCode::Parse, "trajectory has no header line");
  if (!have_trailer) {
    traj.end_time = 0.0;
    for (const auto& e : traj.events) traj.end_time = std::max(traj.end_time, e.time);
  }
  return file;
}

// ---------------------------------------------------------------------------
// Tree export

struct TreeNode {
  Block block;
  double start = 0.0;
  double end = 0.0;
  std::vector<int> children;
  std::string label;  // leaves only
};

struct Containment {
  int species_node = 0;
  double start = 0.0;
  double end = 0.0;
};

struct NestedTree {
  std::vector<TreeNode> species;  // node i: lineage of one xi-block over [start, end)
  std::vector<TreeNode> gene;     // node i: lineage of one zeta-block
  std::vector<std::vector<Containment>> containment;  // gene node -> species segments
  std::string species_newick;
  std::string gene_newick;
};

namespace detail {

/// Lineage tree of one coordinate from its sequence of partitions.
inline std::vector<TreeNode> lineage_tree(const Partition& initial,
                                          const std::vector<std::pair<double, const Partition*>>& changes,
                                          double end_time, char leaf_prefix) {
  std::vector<TreeNode> nodes;
  std::vector<int> active;
  for (const auto& b : initial.blocks()) {
    active.push_back(static_cast<int>(nodes.size()));
    nodes.push_back({b, 0.0, end_time, {}, {}});
  }
  for (const auto& [t, part] : changes) {
    std::vector<int> next;
    for (const auto& b : part->blocks()) {
      const auto parent = std::find_if(active.begin(), active.end(), [&](int id) {
        return std::binary_search(nodes[static_cast<std::size_t>(id)].block.begin(),
                                  nodes[static_cast<std::size_t>(id)].block.end(), b.front());
      });
      auto& pnode = nodes[static_cast<std::size_t>(*parent)];
      if (pnode.block == b) {
        next.push_back(*parent);
        continue;
      }
      pnode.end = t;
      const int id = static_cast<int>(nodes.size());
      pnode.children.push_back(id);
      next.push_back(id);
      nodes.push_back({b, t, end_time, {}, {}});
    }
    active = std::move(next);
  }
  // Leaves follow the canonical order of the final blocks.
  int k = 0;
  for (int id : active) nodes[static_cast<std::size_t>(id)].label = std::string(1, leaf_prefix) + std::to_string(++k);
  return nodes;
}

inline void newick_node(const std::vector<TreeNode>& nodes, int id, std::string& out) {
  const auto& node = nodes[static_cast<std::size_t>(id)];
  if (node.children.empty()) {
    out += node.label;
  } else {
    out += '(';
    for (std::size_t c = 0; c < node.children.size(); ++c) {
      if (c) out += ',';
      newick_node(nodes, node.children[c], out);
    }
    out += ')';
  }
  out += ':';
  out += format_double(node.end - node.start);
}

inline std::string newick(const std::vector<TreeNode>& nodes, std::size_t roots) {
  std::string out;
  if (roots == 1) {
    newick_node(nodes, 0, out);
  } else {
    out += '(';
    for (std::size_t r = 0; r < roots; ++r) {
      if (r) out += ',';
      newick_node(nodes, static_cast<int>(r), out);
    }
    out += "):0";
  }
  out += ';';
  return out;
}

}  // namespace detail

inline NestedTree export_tree(const Trajectory& traj) {
  std::vector<std::pair<double, const Partition*>> zeta_changes, xi_changes;
  const Partition* zeta = &traj.initial.zeta;
  const Partition* xi = &traj.initial.xi;
  for (const auto& e : traj.events) {
    if (e.null_event) continue;
    if (e.state_after.zeta != *zeta) zeta_changes.emplace_back(e.time, zeta = &e.state_after.zeta);
    if (e.state_after.xi != *xi) xi_changes.emplace_back(e.time, xi = &e.state_after.xi);
  }
  NestedTree tree;
  tree.species = detail::lineage_tree(traj.initial.xi, xi_changes, traj.end_time, 's');
  tree.gene = detail::lineage_tree(traj.initial.zeta, zeta_changes, traj.end_time, 'g');
  tree.species_newick = detail::newick(tree.species, static_cast<std::size_t>(traj.initial.xi.block_count()));
  tree.gene_newick = detail::newick(tree.gene, static_cast<std::size_t>(traj.initial.zeta.block_count()));

  const auto contains = [&](int id, Element e) {
    const auto& b = tree.species[static_cast<std::size_t>(id)].block;
    return std::binary_search(b.begin(), b.end(), e);
  };
  for (const auto& g : tree.gene) {
    const Element e = g.block.front();
    int sp = 0;
    while (!contains(sp, e)) ++sp;  // root lineage holding e
    while (tree.species[static_cast<std::size_t>(sp)].end <= g.start && !tree.species[static_cast<std::size_t>(sp)].children.empty()) {
      const auto& ch = tree.species[static_cast<std::size_t>(sp)].children;
      sp = *std::find_if(ch.begin(), ch.end(), [&](int c) { return contains(c, e); });
    }
    std::vector<Containment> segs;
    double t = g.start;
    for (;;) {
      const auto& s = tree.species[static_cast<std::size_t>(sp)];
      const double seg_end = std::min(s.end, g.end);
      if (seg_end > t || segs.empty()) segs.push_back({sp, t, seg_end});
      if (s.end >= g.end || s.children.empty()) break;
      t = s.end;
      sp = *std::find_if(s.children.begin(), s.children.end(), [&](int c) { return contains(c, e); });
    }
    tree.containment.push_back(std::move(segs));
  }
  return tree;
}

inline nlohmann::ordered_json containment_to_json(const NestedTree& tree) {
  const auto node_json = [](const TreeNode& node, const std::string& id) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["block"] = block_to_json(node.block);
    j["start"] = node.start;
    j["end"] = node.end;
    if (!node.label.empty()) j["leaf"] = node.label;
    return j;
  };
  nlohmann::ordered_json out;
  out["species_edges"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < tree.species.size(); ++i) {
    out["species_edges"].push_back(node_json(tree.species[i], "S" + std::to_string(i)));
  }
  out["gene_edges"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < tree.gene.size(); ++i) {
    auto j = node_json(tree.gene[i], "G" + std::to_string(i));
    j["species"] = nlohmann::ordered_json::array();
    for (const auto& seg : tree.containment[i]) {
      j["species"].push_back({{"edge", "S" + std::to_string(seg.species_node)}, {"start", seg.start}, {"end", seg.end}});
    }
    out["gene_edges"].push_back(std::move(j));
  }
  return out;
}

}  // namespace nestfrag
