#pragma once

// Command-line front end: simulate, rates, paintbox, verify, export-tree.
// Exit codes: 0 success, 1 a check failed, 2 usage/configuration/IO error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nestfrag/error.hpp"
#include "nestfrag/mass_partition.hpp"
#include "nestfrag/paintbox.hpp"
#include "nestfrag/partition.hpp"
#include "nestfrag/rates.hpp"
#include "nestfrag/simulator.hpp"
#include "nestfrag/verify.hpp"

namespace nestfrag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct CliError {
  std::string code;
  std::string message;
  std::string cause;
};

inline void report_error(std::ostream& err, const CliError& e) {
  nlohmann::ordered_json j;
  j["error"] = e.code;
  if (!e.cause.empty()) j["cause"] = e.cause;
  j["message"] = e.message;
  err << j.dump() << '\n';
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{"IO", "cannot open '" + path + "'", {}};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{"IO", "cannot write '" + path + "'", {}};
  out << content;
  if (!out) throw CliError{"IO", "write failed for '" + path + "'", {}};
}

inline FragmentationParams load_params(const std::string& path) {
  const auto text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CliError{"BAD_CONFIG", path + ": " + e.what(), "PARSE"};
  }
  return params_from_json(j);
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (auto part : detail::split(text, ',')) {
    part = detail::trim(part);
    if (part.empty()) continue;
    try {
      out.push_back(std::stod(std::string(part)));
    } catch (const std::exception&) {
      throw CliError{"BAD_CONFIG", "not a number: '" + std::string(part) + "'", "PARSE"};
    }
  }
  return out;
}

/// Seed from the flag, else NESTFRAG_SEED, else 0.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("NESTFRAG_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw CliError{"BAD_CONFIG", "NESTFRAG_SEED is not an unsigned integer", {}};
  }
  return 0;
}

// Newick comments are bracketed, so the config echo there must not contain
// brackets; configs hold no arrays.
inline std::string newick_file(const std::string& tree, const nlohmann::ordered_json& config) {
  return "[&nestfrag version=" + std::string(kVersion) + " config=" + config.dump() + "]\n" + tree + "\n";
}

struct Options {
  std::string params_path;
  std::size_t n = 0;
  std::optional<double> horizon;
  std::optional<std::size_t> max_events;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string initial;
  bool log_null = false;
  std::size_t replicas = 1;
  std::string state;
  std::string mass;
  int outer_atom = -1;
  int inner_atom = -1;
  std::string check = "all";
  std::optional<std::size_t> m;
  std::size_t jumps = 100000;
  std::size_t lln_n = 100000;
  unsigned threads = 1;
  std::string trajectory;
};

inline void write_outputs(const Trajectory& traj, const nlohmann::ordered_json& config, const std::string& stem) {
  std::ostringstream jsonl;
  write_jsonl(jsonl, traj, config);
  write_file(stem + ".jsonl", jsonl.str());
  const auto tree = export_tree(traj);
  write_file(stem + ".species.nwk", newick_file(tree.species_newick, config));
  write_file(stem + ".gene.nwk", newick_file(tree.gene_newick, config));
  nlohmann::ordered_json map;
  map["tool"] = "nestfrag";
  map["version"] = kVersion;
  map["config"] = config;
  map["species_newick"] = tree.species_newick;
  map["gene_newick"] = tree.gene_newick;
  map["containment"] = containment_to_json(tree);
  write_file(stem + ".map.json", map.dump(2) + "\n");
}

inline int cmd_simulate(const Options& o, std::ostream& out) {
  if (!o.horizon && !o.max_events) throw CliError{"USAGE", "simulate needs --horizon or --max-events", {}};
  if (o.n == 0) throw CliError{"USAGE", "--n must be >= 1", {}};
  if (o.replicas == 0) throw CliError{"USAGE", "--replicas must be >= 1", {}};
  const auto params = load_params(o.params_path);
  const auto seed = resolve_seed(o.seed);
  const auto initial = o.initial.empty() ? default_initial(o.n) : parse_nested(o.initial);
  if (initial.size() != o.n) throw CliError{"BAD_CONFIG", "--initial is not a state on [n]", "SIZE_MISMATCH"};
  Horizon horizon;
  if (o.horizon) horizon.time = *o.horizon;
  horizon.max_events = o.max_events;

  nlohmann::ordered_json config;
  config["command"] = "simulate";
  config["params"] = o.params_path;
  config["n"] = o.n;
  config["initial"] = to_string(initial);
  config["horizon"] = o.horizon ? nlohmann::ordered_json(*o.horizon) : nlohmann::ordered_json(nullptr);
  config["max_events"] = o.max_events ? nlohmann::ordered_json(*o.max_events) : nlohmann::ordered_json(nullptr);
  config["seed"] = seed;
  config["out"] = o.out;
  config["log_null_events"] = o.log_null;
  config["replicas"] = o.replicas;

  std::vector<Trajectory> trajs(o.replicas);
  std::vector<std::optional<Error>> errors(o.replicas);
  const auto work = [&](std::size_t r) {
    try {
      const auto s = o.replicas == 1 ? seed : hash_words({seed, r});
      trajs[r] = run(params, o.n, initial, horizon, s, RunOptions{o.log_null});
    } catch (const Error& e) {
      errors[r] = e;
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t r = 0; r < o.replicas; ++r) {
    if (o.replicas == 1) {
      work(r);
    } else {
      pool.emplace_back(work, r);
    }
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) throw *e;
  }

  auto summary = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < o.replicas; ++r) {
    const auto stem = o.replicas == 1 ? o.out : o.out + "_r" + std::to_string(r);
    auto cfg = config;
    cfg["replica"] = r;
    cfg["replica_seed"] = trajs[r].seed;
    write_outputs(trajs[r], cfg, stem);
    summary.push_back({{"stem", stem},
                       {"seed", trajs[r].seed},
                       {"jumps", trajs[r].jump_count()},
                       {"end_time", trajs[r].end_time},
                       {"absorbed", trajs[r].absorbed},
                       {"final", to_string(trajs[r].events.empty() ? trajs[r].initial : trajs[r].state_at(trajs[r].end_time))}});
  }
  out << nlohmann::ordered_json{{"config", config}, {"runs", summary}}.dump(2) << '\n';
  return kExitOk;
}

inline int cmd_rates(const Options& o, std::ostream& out) {
  const auto params = load_params(o.params_path);
  const auto state = parse_nested(o.state);
  const auto row = generator_row(state, params);
  nlohmann::ordered_json j;
  j["from"] = to_string(state);
  j["jumps"] = nlohmann::ordered_json::array();
  for (const auto& jt : row) j["jumps"].push_back({{"to", to_string(jt.to)}, {"rate", jt.rate}});
  j["total_rate"] = total_rate(row);
  out << j.dump(2) << '\n';
  return kExitOk;
}

inline int cmd_paintbox(const Options& o, std::ostream& out) {
  if (o.n == 0) throw CliError{"USAGE", "--n must be >= 1", {}};
  const auto seed = resolve_seed(o.seed);
  RngHandle rng(seed, 0x70626f78);
  nlohmann::ordered_json j;
  j["n"] = o.n;
  j["seed"] = seed;
  if (!o.mass.empty() || o.outer_atom >= 0) {
    MassPartition s;
    if (!o.mass.empty()) {
      s = validate_mass(parse_list(o.mass));
    } else {
      const auto params = load_params(o.params_path);
      if (static_cast<std::size_t>(o.outer_atom) >= params.nu_out.size()) {
        throw CliError{"BAD_CONFIG", "--outer-atom out of range", {}};
      }
      s = params.nu_out[static_cast<std::size_t>(o.outer_atom)].s;
    }
    const auto p = sample_univariate(s, o.n, rng);
    const auto est = empirical_frequencies(p);
    j["kind"] = "univariate";
    j["s"] = s.s;
    j["partition"] = to_string(p);
    j["frequencies"] = est.s;
    j["dust"] = est.dust();
  } else if (o.inner_atom >= 0) {
    const auto params = load_params(o.params_path);
    if (static_cast<std::size_t>(o.inner_atom) >= params.nu_in.size()) {
      throw CliError{"BAD_CONFIG", "--inner-atom out of range", {}};
    }
    const auto& p = params.nu_in[static_cast<std::size_t>(o.inner_atom)].p;
    Block block(o.n);
    for (std::size_t i = 0; i < o.n; ++i) block[i] = static_cast<Element>(i + 1);
    const auto outcome = sample_inner(p, block, rng);
    const auto est = empirical_frequencies(outcome.local);
    j["kind"] = "bivariate";
    j["outcome"] = to_string(outcome.local.inner);
    j["star_xi_block"] = outcome.local.star_xi_block ? nlohmann::ordered_json(*outcome.local.star_xi_block + 1)
                                                     : nlohmann::ordered_json(nullptr);
    j["frequencies"] = {{"u", est.u}, {"u_bar", est.u_bar}, {"s_bar", est.s_bar}, {"s_rows", est.s_rows}};
  } else {
    throw CliError{"USAGE", "paintbox needs --s, --outer-atom or --inner-atom", {}};
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
  static const std::vector<std::string> kChecks{"exchangeability", "consistency", "empirical", "binary", "lln", "all"};
  if (std::find(kChecks.begin(), kChecks.end(), o.check) == kChecks.end()) {
    throw CliError{"USAGE", "unknown --check '" + o.check + "'", {}};
  }
  const auto params = load_params(o.params_path);
  const auto seed = resolve_seed(o.seed);
  const std::size_t n = o.n == 0 ? 3 : o.n;
  const std::size_t m = o.m.value_or(n + 1);
  const bool all = o.check == "all";

  nlohmann::ordered_json config;
  config["command"] = "verify";
  config["params"] = o.params_path;
  config["check"] = o.check;
  config["n"] = n;
  config["m"] = m;
  config["jumps"] = o.jumps;
  config["lln_n"] = o.lln_n;
  config["seed"] = seed;

  auto reports = nlohmann::ordered_json::array();
  auto skipped = nlohmann::ordered_json::array();
  bool failed = false;
  const auto add = [&](const VerdictReport& r) {
    if (r.verdict == Verdict::Fail) failed = true;
    reports.push_back(r.to_json());
  };
  const auto skip = [&](const std::string& check, const std::string& why) {
    skipped.push_back({{"check", check}, {"reason", why}});
  };

  if (all || o.check == "exchangeability") {
    if (n <= kBruteForceCap) {
      add(check_exchangeability(brute_force_generator(params, n)));
    } else {
      skip("exchangeability", "n above brute-force cap");
    }
  }
  if (all || o.check == "consistency") {
    if (n < m && m <= kBruteForceCap) {
      add(check_projective_consistency(params, n, m));
    } else {
      skip("consistency", "needs n < m <= 5");
    }
  }
  if (all || o.check == "empirical") {
    if (n <= kEmpiricalCap) {
      add(check_empirical(params, n, o.jumps, seed, o.threads));
    } else {
      skip("empirical", "n above 4");
    }
  }
  if (all || o.check == "binary") {
    try {
      add(check_binary_agreement(params, n));
    } catch (const Error& e) {
      if (!all || e.code() != ErrorCode::NotBinary) throw;
      skip("binary", e.what());
    }
  }
  if (all || o.check == "lln") {
    for (std::size_t a = 0; a < params.nu_out.size(); ++a) {
      auto r = check_paintbox_lln(params.nu_out[a].s, o.lln_n, hash_words({seed, 0, a}));
      r.details["atom"] = "nu_out[" + std::to_string(a) + "]";
      add(r);
    }
    for (std::size_t a = 0; a < params.nu_in.size(); ++a) {
      auto r = check_paintbox_lln(params.nu_in[a].p, o.lln_n, hash_words({seed, 1, a}));
      r.details["atom"] = "nu_in[" + std::to_string(a) + "]";
      add(r);
    }
  }

  nlohmann::ordered_json j;
  j["tool"] = "nestfrag";
  j["version"] = kVersion;
  j["config"] = config;
  j["verdict"] = failed ? "FAIL" : "PASS";
  j["reports"] = reports;
  if (!skipped.empty()) j["skipped"] = skipped;
  out << j.dump(2) << '\n';
  return failed ? kExitCheckFailed : kExitOk;
}

inline int cmd_export_tree(const Options& o, std::ostream& out) {
  std::ifstream in(o.trajectory, std::ios::binary);
  if (!in) throw CliError{"IO", "cannot open '" + o.trajectory + "'", {}};
  const auto file = read_jsonl(in);
  auto config = file.config;
  config["export_from"] = o.trajectory;
  const auto tree = export_tree(file.trajectory);
  write_file(o.out + ".species.nwk", newick_file(tree.species_newick, config));
  write_file(o.out + ".gene.nwk", newick_file(tree.gene_newick, config));
  nlohmann::ordered_json map;
  map["tool"] = "nestfrag";
  map["version"] = kVersion;
  map["config"] = config;
  map["species_newick"] = tree.species_newick;
  map["gene_newick"] = tree.gene_newick;
  map["containment"] = containment_to_json(tree);
  write_file(o.out + ".map.json", map.dump(2) + "\n");
  out << nlohmann::ordered_json{{"species", tree.species_newick}, {"gene", tree.gene_newick}}.dump(2) << '\n';
  return kExitOk;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Simulation and exact-rate verification of simple nested fragmentation processes", "nestfrag"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  Options o;

  auto* sim = app.add_subcommand("simulate", "Simulate a trajectory and write JSONL and Newick outputs");
  sim->add_option("--params", o.params_path, "Parameter JSON file")->required();
  sim->add_option("--n", o.n, "Number of elements")->required();
  sim->add_option("--horizon", o.horizon, "Time horizon");
  sim->add_option("--max-events", o.max_events, "Stop after this many jumps");
  sim->add_option("--seed", o.seed, "Seed (default: NESTFRAG_SEED or 0)");
  sim->add_option("--out", o.out, "Output stem")->required();
  sim->add_option("--initial", o.initial, "Initial state \"zeta ; xi\" (default: one block in both)");
  sim->add_flag("--log-null-events", o.log_null, "Record events that leave the state unchanged");
  sim->add_option("--replicas", o.replicas, "Independent replicas, run in parallel");

  auto* rates = app.add_subcommand("rates", "Print the exact generator row of a state");
  rates->add_option("--params", o.params_path, "Parameter JSON file")->required();
  rates->add_option("--state", o.state, "State \"zeta ; xi\"")->required();

  auto* pbox = app.add_subcommand("paintbox", "Draw one paintbox sample and its empirical frequencies");
  pbox->add_option("--s", o.mass, "Mass partition, comma separated");
  pbox->add_option("--params", o.params_path, "Parameter JSON file (with --outer-atom/--inner-atom)");
  pbox->add_option("--outer-atom", o.outer_atom, "Index of a nu_out atom");
  pbox->add_option("--inner-atom", o.inner_atom, "Index of a nu_in atom");
  pbox->add_option("--n", o.n, "Sample size")->required();
  pbox->add_option("--seed", o.seed, "Seed (default: NESTFRAG_SEED or 0)");

  auto* ver = app.add_subcommand("verify", "Run oracle checks and print a JSON report");
  ver->add_option("--params", o.params_path, "Parameter JSON file")->required();
  ver->add_option("--check", o.check, "exchangeability|consistency|empirical|binary|lln|all");
  ver->add_option("--n", o.n, "Ground-set size (default 3)");
  ver->add_option("--m", o.m, "Larger ground set for consistency (default n+1)");
  ver->add_option("--jumps", o.jumps, "Minimum simulated jumps for the empirical check");
  ver->add_option("--lln-n", o.lln_n, "Sample size for the paintbox LLN check");
  ver->add_option("--seed", o.seed, "Seed (default: NESTFRAG_SEED or 0)");
  ver->add_option("--threads", o.threads, "Worker threads for simulations");

  auto* exp = app.add_subcommand("export-tree", "Convert a JSONL trajectory to Newick files");
  exp->add_option("--trajectory", o.trajectory, "Trajectory JSONL file")->required();
  exp->add_option("--out", o.out, "Output stem")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, {"USAGE", e.what(), {}});
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out);
    if (rates->parsed()) return cmd_rates(o, out);
    if (pbox->parsed()) return cmd_paintbox(o, out);
    if (ver->parsed()) return cmd_verify(o, out);
    if (exp->parsed()) return cmd_export_tree(o, out);
  } catch (const CliError& e) {
    report_error(err, e);
    return kExitUsage;
  } catch (const Error& e) {
    report_error(err, {"BAD_CONFIG", e.what(), std::string(to_string(e.code()))});
    return kExitUsage;
  }
  report_error(err, {"USAGE", "no subcommand", {}});
  return kExitUsage;
}

}  // namespace nestfrag::cli
