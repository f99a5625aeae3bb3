#pragma once

// Oracle checks: the exact generator over all nested partitions of [n], and
// the comparisons that hold the samplers and the closed-form rates to it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nestfrag/mass_partition.hpp"
#include "nestfrag/paintbox.hpp"
#include "nestfrag/partition.hpp"
#include "nestfrag/rates.hpp"
#include "nestfrag/simulator.hpp"

namespace nestfrag {

inline constexpr std::size_t kBruteForceCap = 5;
inline constexpr std::size_t kEmpiricalCap = 4;
inline constexpr double kExchangeTolerance = 1e-10;
inline constexpr double kConsistencyTolerance = 1e-9;
inline constexpr double kBinaryTolerance = 1e-10;
inline constexpr double kZBound = 4.0;
inline constexpr double kMinExpectedCount = 10.0;

// ---------------------------------------------------------------------------
// Generator matrix

struct GeneratorMatrix {
  std::size_t n = 0;
  std::vector<NestedPartition> states;
  std::unordered_map<NestedPartition, std::size_t> index;
  std::vector<std::vector<std::pair<std::size_t, double>>> q;  // sorted by target index

  std::size_t index_of(const NestedPartition& s) const { return index.at(s); }

  double rate(std::size_t from, std::size_t to) const {
    const auto& row = q[from];
    const auto it = std::lower_bound(row.begin(), row.end(), to, [](const auto& e, std::size_t v) { return e.first < v; });
    return it != row.end() && it->first == to ? it->second : 0.0;
  }

  double rate(const NestedPartition& from, const NestedPartition& to) const { return rate(index_of(from), index_of(to)); }

  double exit_rate(std::size_t from) const {
    double total = 0.0;
    for (const auto& [to, r] : q[from]) total += r;
    return total;
  }
};

inline GeneratorMatrix brute_force_generator(const FragmentationParams& params, std::size_t n) {
  if (n > kBruteForceCap) throw Error(ErrorCode::TooLarge, "brute-force generator capped at n=5");
  GeneratorMatrix gm;
  gm.n = n;
  gm.states = enumerate_nested(n);
  for (std::size_t i = 0; i < gm.states.size(); ++i) gm.index.emplace(gm.states[i], i);
  const RateModel model(params, n);
  gm.q.resize(gm.states.size());
  for (std::size_t i = 0; i < gm.states.size(); ++i) {
    for (const auto& j : model.row(gm.states[i])) gm.q[i].emplace_back(gm.index_of(j.to), j.rate);
    std::sort(gm.q[i].begin(), gm.q[i].end());
  }
  return gm;
}

// ---------------------------------------------------------------------------
// Reports

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

struct VerdictReport {
  std::string check;
  Verdict verdict = Verdict::Pass;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  bool passed() const { return verdict == Verdict::Pass; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["check"] = check;
    j["verdict"] = to_string(verdict);
    j["details"] = details;
    return j;
  }
};

namespace detail {

inline constexpr std::size_t kMaxListed = 20;

inline void list_capped(nlohmann::ordered_json& arr, nlohmann::ordered_json item) {
  if (arr.size() < kMaxListed) arr.push_back(std::move(item));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exchangeability

inline VerdictReport check_exchangeability(const GeneratorMatrix& gm, double tol = kExchangeTolerance) {
  VerdictReport report{"exchangeability", Verdict::Pass, {}};
  std::vector<Element> sigma(gm.n);
  std::iota(sigma.begin(), sigma.end(), 1);
  std::size_t permutations = 0;
  std::size_t compared = 0;
  std::size_t violations = 0;
  double max_delta = 0.0;
  auto failures = nlohmann::ordered_json::array();
  do {
    ++permutations;
    for (std::size_t i = 0; i < gm.states.size(); ++i) {
      const auto from = gm.index_of(apply_injection(gm.states[i], sigma));
      for (const auto& [j, rate] : gm.q[i]) {
        const auto to = gm.index_of(apply_injection(gm.states[j], sigma));
        const double other = gm.rate(from, to);
        const double delta = std::abs(other - rate);
        ++compared;
        max_delta = std::max(max_delta, delta);
        if (delta > tol) {
          ++violations;
          detail::list_capped(failures, {{"sigma", sigma},
                                         {"from", to_string(gm.states[i])},
                                         {"to", to_string(gm.states[j])},
                                         {"rate", rate},
                                         {"permuted_rate", other}});
        }
      }
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  report.verdict = violations == 0 ? Verdict::Pass : Verdict::Fail;
  report.details["n"] = gm.n;
  report.details["permutations"] = permutations;
  report.details["compared"] = compared;
  report.details["violations"] = violations;
  report.details["max_delta"] = max_delta;
  report.details["failures"] = failures;
  return report;
}

// ---------------------------------------------------------------------------
// Projective consistency

/// Rates at level n (from params_n) against aggregated rates at level m (from
/// params_m). Passing different parameters is how a broken level is detected.
inline VerdictReport check_projective_consistency(const FragmentationParams& params_n,
                                                  const FragmentationParams& params_m, std::size_t n, std::size_t m,
                                                  double tol = kConsistencyTolerance) {
  if (!(n < m)) throw Error(ErrorCode::BadRange, "projective consistency needs n < m");
  if (m > kBruteForceCap) throw Error(ErrorCode::TooLarge, "projective consistency capped at m=5");
  VerdictReport report{"consistency", Verdict::Pass, {}};
  const RateModel model_n(params_n, n);
  const RateModel model_m(params_m, m);
  std::size_t compared = 0;
  std::size_t violations = 0;
  double max_delta = 0.0;
  auto failures = nlohmann::ordered_json::array();
  for (const auto& pi : enumerate_nested(m)) {
    const auto base = restrict(pi, n);
    std::map<NestedPartition, double> aggregated;
    for (const auto& j : model_m.row(pi)) {
      auto tau = restrict(j.to, n);
      if (tau != base) aggregated[std::move(tau)] += j.rate;
    }
    std::map<NestedPartition, double> direct;
    for (const auto& j : model_n.row(base)) direct[j.to] += j.rate;
    auto targets = direct;
    for (const auto& [tau, r] : aggregated) targets.emplace(tau, 0.0);
    for (const auto& [tau, unused] : targets) {
      const double a = aggregated.count(tau) ? aggregated.at(tau) : 0.0;
      const double d = direct.count(tau) ? direct.at(tau) : 0.0;
      const double delta = std::abs(a - d);
      ++compared;
      max_delta = std::max(max_delta, delta);
      if (delta > tol) {
        ++violations;
        detail::list_capped(failures, {{"state_m", to_string(pi)},
                                       {"target_n", to_string(tau)},
                                       {"sum_m", a},
                                       {"rate_n", d}});
      }
    }
  }
  report.verdict = violations == 0 ? Verdict::Pass : Verdict::Fail;
  report.details["n"] = n;
  report.details["m"] = m;
  report.details["compared"] = compared;
  report.details["violations"] = violations;
  report.details["max_delta"] = max_delta;
  report.details["failures"] = failures;
  return report;
}

inline VerdictReport check_projective_consistency(const FragmentationParams& params, std::size_t n, std::size_t m,
                                                  double tol = kConsistencyTolerance) {
  return check_projective_consistency(params, params, n, m, tol);
}

// ---------------------------------------------------------------------------
// Simulation against the oracle

struct TransitionStats {
  std::vector<double> holding;                            // per state index
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
  std::size_t jumps = 0;

  void merge(const TransitionStats& other) {
    if (holding.size() < other.holding.size()) holding.resize(other.holding.size(), 0.0);
    for (std::size_t i = 0; i < other.holding.size(); ++i) holding[i] += other.holding[i];
    for (const auto& [k, c] : other.counts) counts[k] += c;
    jumps += other.jumps;
  }
};

namespace detail {

inline TransitionStats replica_stats(const FragmentationParams& params, const GeneratorMatrix& gm,
                                     const NestedPartition& initial, std::uint64_t seed) {
  TransitionStats stats;
  stats.holding.assign(gm.states.size(), 0.0);
  // Paths are decreasing, so every run is absorbed after finitely many jumps.
  const auto traj = run(params, gm.n, initial, Horizon{}, seed);
  std::size_t current = gm.index_of(initial);
  double t = 0.0;
  for (const auto& e : traj.events) {
    const auto next = gm.index_of(e.state_after);
    stats.holding[current] += e.time - t;
    ++stats.counts[{current, next}];
    ++stats.jumps;
    current = next;
    t = e.time;
  }
  return stats;
}

}  // namespace detail

/// Replicas start in turn from every non-absorbing state and run to
/// absorption, until at least `jumps` transitions are observed. Replicas are
/// processed in fixed-size batches and merged in replica order, so the result
/// does not depend on `threads`.
inline TransitionStats simulate_transitions(const FragmentationParams& params, const GeneratorMatrix& gm,
                                            std::size_t jumps, std::uint64_t seed, unsigned threads = 1) {
  TransitionStats total;
  total.holding.assign(gm.states.size(), 0.0);
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < gm.states.size(); ++i) {
    if (!gm.q[i].empty()) starts.push_back(i);
  }
  if (starts.empty()) return total;
  constexpr std::size_t kBatch = 512;
  threads = std::max(1u, threads);
  std::uint64_t replica = 0;
  while (total.jumps < jumps) {
    std::vector<TransitionStats> batch(kBatch);
    const auto work = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t b = lo; b < hi; ++b) {
        const auto r = replica + b;
        batch[b] = detail::replica_stats(params, gm, gm.states[starts[r % starts.size()]], hash_words({seed, r}));
      }
    };
    if (threads == 1) {
      work(0, kBatch);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (kBatch + threads - 1) / threads;
      for (std::size_t lo = 0; lo < kBatch; lo += chunk) pool.emplace_back(work, lo, std::min(kBatch, lo + chunk));
      for (auto& th : pool) th.join();
    }
    for (const auto& s : batch) total.merge(s);
    replica += kBatch;
  }
  return total;
}

inline VerdictReport check_empirical(const FragmentationParams& params, std::size_t n, std::size_t jumps,
                                     std::uint64_t seed, unsigned threads = 1) {
  if (n > kEmpiricalCap) throw Error(ErrorCode::TooLarge, "empirical check capped at n=4");
  VerdictReport report{"empirical", Verdict::Pass, {}};
  const auto gm = brute_force_generator(params, n);
  report.details["n"] = n;
  report.details["jumps_requested"] = jumps;

  if (std::all_of(gm.q.begin(), gm.q.end(), [](const auto& row) { return row.empty(); })) {
    // Nothing can happen; a run of unit length must stay put.
    const auto traj = run(params, n, Horizon{1.0, std::nullopt}, seed);
    report.verdict = traj.events.empty() ? Verdict::Pass : Verdict::Fail;
    report.details["jumps_observed"] = traj.events.size();
    return report;
  }

  const auto stats = simulate_transitions(params, gm, jumps, seed, threads);
  std::size_t tested = 0;
  std::size_t low = 0;
  std::size_t violations = 0;
  double worst = 0.0;
  nlohmann::ordered_json worst_entry;
  auto failures = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < gm.states.size(); ++i) {
    const double hold = stats.holding[i];
    for (const auto& [j, q] : gm.q[i]) {
      const double expected = q * hold;
      const auto it = stats.counts.find({i, j});
      const double observed = it == stats.counts.end() ? 0.0 : static_cast<double>(it->second);
      if (expected < kMinExpectedCount) {
        ++low;
        continue;
      }
      ++tested;
      const double z = (observed - expected) / std::sqrt(expected);
      nlohmann::ordered_json entry{{"from", to_string(gm.states[i])}, {"to", to_string(gm.states[j])},
                                   {"rate", q},  {"holding_time", hold},
                                   {"expected", expected}, {"observed", observed},
                                   {"z", z}};
      if (std::abs(z) >= worst) {
        worst = std::abs(z);
        worst_entry = entry;
      }
      if (std::abs(z) > kZBound) {
        ++violations;
        detail::list_capped(failures, entry);
      }
    }
  }
  for (const auto& [key, count] : stats.counts) {
    if (gm.rate(key.first, key.second) == 0.0) {
      ++violations;
      detail::list_capped(failures, {{"from", to_string(gm.states[key.first])},
                                     {"to", to_string(gm.states[key.second])},
                                     {"rate", 0.0},
                                     {"observed", count}});
    }
  }
  if (violations > 0) {
    report.verdict = Verdict::Fail;
  } else if (low > 0) {
    report.verdict = Verdict::Inconclusive;
  }
  report.details["jumps_observed"] = stats.jumps;
  report.details["transitions_tested"] = tested;
  report.details["transitions_low_count"] = low;
  report.details["min_expected_count"] = kMinExpectedCount;
  report.details["z_bound"] = kZBound;
  report.details["worst_abs_z"] = worst;
  report.details["worst_p_value"] = std::erfc(worst / std::sqrt(2.0));
  report.details["worst"] = worst_entry;
  report.details["violations"] = violations;
  report.details["failures"] = failures;
  return report;
}

// ---------------------------------------------------------------------------
// Closed-form binary rates

inline VerdictReport check_binary_agreement(const FragmentationParams& params, std::size_t n,
                                            double tol = kBinaryTolerance) {
  const auto measures = binary_project(params);
  const auto gm = brute_force_generator(params, n);
  VerdictReport report{"binary", Verdict::Pass, {}};
  std::size_t compared = 0;
  std::size_t agreed = 0;
  std::size_t flagged = 0;
  std::size_t flagged_agreeing = 0;
  std::size_t in3_both = 0;
  std::size_t in3_both_agreeing = 0;
  std::size_t in3_unflagged = 0;
  std::size_t in3_unflagged_agreeing = 0;
  std::size_t violations = 0;
  auto flagged_list = nlohmann::ordered_json::array();
  auto failures = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < gm.states.size(); ++i) {
    for (std::size_t j = 0; j < gm.states.size(); ++j) {
      if (i == j || !nested_leq(gm.states[j], gm.states[i])) continue;
      const auto formula = binary_rate(gm.states[i], gm.states[j], measures, params.c_out, params.c_in1, params.c_in2);
      const double oracle = gm.rate(i, j);
      const bool match = std::abs(formula.rate - oracle) <= tol;
      nlohmann::ordered_json entry{{"from", to_string(gm.states[i])}, {"to", to_string(gm.states[j])},
                                   {"oracle", oracle}, {"formula", formula.rate}};
      ++compared;
      if (formula.in3_both_orientations) {
        ++in3_both;
        if (match) ++in3_both_agreeing;
        if (!formula.flagged()) {
          ++in3_unflagged;
          if (match) ++in3_unflagged_agreeing;
        }
      }
      if (formula.flagged()) {
        ++flagged;
        if (match) ++flagged_agreeing;
        entry["symmetric_outer"] = formula.symmetric_outer;
        entry["symmetric_inner"] = formula.symmetric_inner;
        detail::list_capped(flagged_list, entry);
        continue;
      }
      if (match) {
        ++agreed;
      } else {
        ++violations;
        if (!formula.reason.empty()) entry["reason"] = formula.reason;
        detail::list_capped(failures, entry);
      }
    }
  }
  report.verdict = violations == 0 ? Verdict::Pass : Verdict::Fail;
  report.details["n"] = n;
  report.details["compared"] = compared;
  report.details["agreed"] = agreed;
  report.details["flagged"] = flagged;
  report.details["flagged_agreeing"] = flagged_agreeing;
  report.details["in3_both_orientations"] = in3_both;
  report.details["in3_both_orientations_agreeing"] = in3_both_agreeing;
  report.details["in3_both_orientations_unflagged"] = in3_unflagged;
  report.details["in3_both_orientations_unflagged_agreeing"] = in3_unflagged_agreeing;
  report.details["violations"] = violations;
  report.details["flagged_cases"] = flagged_list;
  report.details["failures"] = failures;
  return report;
}

// ---------------------------------------------------------------------------
// Law of large numbers for paintbox frequencies

inline double lln_tolerance(std::size_t n) { return 3.0 * 0.5 / std::sqrt(static_cast<double>(n)); }

namespace detail {

inline void compare_entries(const std::string& name, std::vector<double> expected, std::vector<double> observed,
                            double tol, double& max_delta, nlohmann::ordered_json& entries, bool& ok) {
  const auto len = std::max(expected.size(), observed.size());
  expected.resize(len, 0.0);
  observed.resize(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    const double delta = std::abs(expected[i] - observed[i]);
    max_delta = std::max(max_delta, delta);
    if (delta > tol) ok = false;
    entries.push_back({{"entry", name + "[" + std::to_string(i) + "]"},
                       {"expected", expected[i]},
                       {"observed", observed[i]},
                       {"delta", delta}});
  }
}

}  // namespace detail

inline VerdictReport check_paintbox_lln(const MassPartition& s, std::size_t n, std::uint64_t seed, double tol = -1.0) {
  if (tol < 0.0) tol = lln_tolerance(n);
  RngHandle rng(seed, 0x6c6c6e);
  const auto est = empirical_frequencies(sample_univariate(s, n, rng));
  VerdictReport report{"lln", Verdict::Pass, {}};
  bool ok = true;
  double max_delta = 0.0;
  auto entries = nlohmann::ordered_json::array();
  detail::compare_entries("s", s.s, est.s, tol, max_delta, entries, ok);
  detail::compare_entries("dust", {s.dust()}, {est.dust()}, tol, max_delta, entries, ok);
  report.verdict = ok ? Verdict::Pass : Verdict::Fail;
  report.details["kind"] = "univariate";
  report.details["n"] = n;
  report.details["tolerance"] = tol;
  report.details["max_delta"] = max_delta;
  report.details["entries"] = entries;
  return report;
}

inline VerdictReport check_paintbox_lln(const BivariateMassPartition& p, std::size_t n, std::uint64_t seed,
                                        double tol = -1.0) {
  if (tol < 0.0) tol = lln_tolerance(n);
  RngHandle rng(seed, 0x6c6c6e32);
  Block block(n);
  std::iota(block.begin(), block.end(), 1);
  const auto est = empirical_frequencies(sample_inner(p, block, rng).local);
  VerdictReport report{"lln", Verdict::Pass, {}};
  bool ok = true;
  double max_delta = 0.0;
  auto entries = nlohmann::ordered_json::array();
  detail::compare_entries("u_bar", {p.u_bar}, {est.u_bar}, tol, max_delta, entries, ok);
  detail::compare_entries("u", p.u, est.u, tol, max_delta, entries, ok);
  detail::compare_entries("s_bar", p.s_bar, est.s_bar, tol, max_delta, entries, ok);
  const auto rows = std::max(p.s_rows.size(), est.s_rows.size());
  for (std::size_t k = 0; k < rows; ++k) {
    detail::compare_entries("s_rows[" + std::to_string(k) + "]", k < p.s_rows.size() ? p.s_rows[k] : std::vector<double>{},
                            k < est.s_rows.size() ? est.s_rows[k] : std::vector<double>{}, tol, max_delta, entries, ok);
  }
  report.verdict = ok ? Verdict::Pass : Verdict::Fail;
  report.details["kind"] = "bivariate";
  report.details["n"] = n;
  report.details["tolerance"] = tol;
  report.details["max_delta"] = max_delta;
  report.details["entries"] = entries;
  return report;
}

// ---------------------------------------------------------------------------
// Per-event path properties

struct EventCheck {
  bool monotone = true;         // after is finer than before
  bool outer_branching = true;  // changes confined to one xi-block of before
  bool inner_branching = true;  // zeta changes confined to one zeta-block of before

  bool ok() const { return monotone && outer_branching && inner_branching; }
};

inline EventCheck check_event(const NestedPartition& before, const NestedPartition& after) {
  EventCheck c;
  c.monotone = nested_leq(after, before);
  const auto n = before.size();
  int xi_block = -1;
  int zeta_block = -1;
  for (std::size_t a = 1; a <= n; ++a) {
    for (std::size_t b = a + 1; b <= n; ++b) {
      const auto ea = static_cast<Element>(a), eb = static_cast<Element>(b);
      const bool zeta_changed = before.zeta.same_block(ea, eb) != after.zeta.same_block(ea, eb);
      const bool xi_changed = before.xi.same_block(ea, eb) != after.xi.same_block(ea, eb);
      if (!zeta_changed && !xi_changed) continue;
      for (Element e : {ea, eb}) {
        const int xb = before.xi.block_of(e);
        if (xi_block < 0) xi_block = xb;
        if (xb != xi_block) c.outer_branching = false;
      }
      if (zeta_changed) {
        for (Element e : {ea, eb}) {
          const int zb = before.zeta.block_of(e);
          if (zeta_block < 0) zeta_block = zb;
          if (zb != zeta_block) c.inner_branching = false;
        }
      }
    }
  }
  return c;
}

}  // namespace nestfrag
