#include "btcsim/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "btcsim/config_io.hpp"
#include "btcsim/engine.hpp"
#include "btcsim/experiment.hpp"

namespace btcsim {

std::vector<std::int32_t> parse_depths(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      throw UsageError("--depth: '" + text + "' is not N or A..B");
    }
    if (used != s.size()) throw UsageError("--depth: '" + text + "' is not N or A..B");
    return static_cast<std::int32_t>(v);
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {to_int(text)};
  const std::int32_t a = to_int(text.substr(0, dots));
  const std::int32_t b = to_int(text.substr(dots + 2));
  std::vector<std::int32_t> out;
  for (std::int32_t d = a; d <= b; ++d) out.push_back(d);
  return out;
}

std::vector<double> parse_shares(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("--shares: bad number '" + item + "'");
    }
    if (used != item.size()) throw UsageError("--shares: bad number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--shares: empty list");
  return out;
}

namespace {

struct RawFlags {
  std::string config;
  std::optional<std::string> depth;
  std::optional<std::string> shares;
  std::optional<int> malicious_pool;
  std::optional<std::int32_t> replications;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> max_events;
  std::optional<std::int32_t> max_blocks;
  std::optional<std::int32_t> max_transactions;
};

void add_common(CLI::App* app, RawFlags& raw, CliInvocation& inv) {
  app->add_option("--config", raw.config, "JSON config file (default: $BTCSIM_CONFIG)");
  app->add_option("--shares", raw.shares, "Comma-separated pool shares, e.g. 0.18,0.22,0.10,0.50");
  app->add_option("--malicious-pool", raw.malicious_pool, "Index of the malicious pool, -1 for none");
  app->add_option("--replications", raw.replications, "Replications per estimate");
  app->add_option("--seed", raw.seed, "Master seed");
  app->add_option("--max-events", raw.max_events, "Event bound per run");
  app->add_option("--max-blocks", raw.max_blocks, "Block number bound");
  app->add_option("--max-transactions", raw.max_transactions, "Transaction number bound");
  app->add_option("--format", inv.format, "Output format")->check(CLI::IsMember({"csv", "json", "table"}));
  app->add_option("--out", inv.out, "Write csv/json output to this file");
  app->add_option("--threads", inv.threads, "Worker threads (0: all cores)");
}

void apply_overrides(const RawFlags& raw, ScenarioConfig& c) {
  if (raw.shares) {
    const std::vector<double> shares = parse_shares(*raw.shares);
    const int old_malicious = c.malicious_pool();
    const bool same_count = shares.size() == c.pools.size();
    std::vector<PoolSpec> pools;
    for (double s : shares) pools.push_back({s, false});
    if (old_malicious >= 0) {
      const int index = same_count ? old_malicious : static_cast<int>(shares.size()) - 1;
      pools[static_cast<std::size_t>(index)].malicious = true;
    }
    c.pools = pools;
  }
  if (raw.malicious_pool) {
    const int m = *raw.malicious_pool;
    if (m < -1 || m >= static_cast<int>(c.pools.size())) {
      throw UsageError("--malicious-pool: no pool " + std::to_string(m));
    }
    for (auto& p : c.pools) p.malicious = false;
    if (m >= 0) c.pools[static_cast<std::size_t>(m)].malicious = true;
    c.malicious_peers = m >= 0 ? 1 : 0;
  }
  if (raw.replications) c.replications = *raw.replications;
  if (raw.seed) c.seed = *raw.seed;
  if (raw.max_events) c.bounds.max_events = *raw.max_events;
  if (raw.max_blocks) c.bounds.max_blocks = *raw.max_blocks;
  if (raw.max_transactions) c.bounds.max_transactions = *raw.max_transactions;
}

std::vector<const char*> as_argv(const std::vector<std::string>& args, std::vector<std::string>& storage) {
  storage = args;
  storage.insert(storage.begin(), "btcsim");
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  return argv;
}

}  // namespace

CliInvocation parse_and_validate(const std::vector<std::string>& args, std::string* help) {
  CliInvocation inv;
  RawFlags raw;

  CLI::App app{"Bitcoin double-spend simulator"};
  app.require_subcommand(1, 1);
  auto* simulate = app.add_subcommand("simulate", "Run one replication and print its outcome");
  auto* estimate_cmd = app.add_subcommand("estimate", "Double-spend probability per confirmation depth");
  auto* shares_cmd = app.add_subcommand("block-shares", "Main-chain blocks per pool in honest-only runs");
  auto* oracle = app.add_subcommand("oracle", "Analytic catch-up probability, optionally against the race");
  auto* trace = app.add_subcommand("trace", "Run one replication and print every transition");

  for (CLI::App* sub : {simulate, estimate_cmd, shares_cmd, trace}) {
    add_common(sub, raw, inv);
    sub->add_option("--depth", raw.depth, "Confirmation depth N or range A..B");
  }
  add_common(oracle, raw, inv);
  simulate->add_flag("--trace", inv.trace, "Write the transition trace to standard error");
  simulate->add_flag("--dump-config", inv.dump_config, "Print the merged config as JSON and exit");
  shares_cmd->add_option("--min-blocks", inv.min_blocks, "Keep adding runs until this many blocks are counted");
  oracle->add_option("--q", inv.q, "Attacker fraction of the total rate")->required();
  oracle->add_option("--z", inv.z, "Deficit in blocks")->required();
  oracle->add_option("--simulate", inv.race_replications, "Also run this many simulated races");

  std::vector<std::string> storage;
  auto argv = as_argv(args, storage);
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    if (help) *help = app.help();
    inv.subcommand = "help";
    return inv;
  } catch (const CLI::CallForAllHelp&) {
    if (help) *help = app.help("", CLI::AppFormatMode::All);
    inv.subcommand = "help";
    return inv;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  inv.subcommand = app.get_subcommands().front()->get_name();

  ScenarioConfig base = inv.subcommand == "block-shares" ? honest_scenario() : ScenarioConfig{};
  std::string path = raw.config;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar); env != nullptr) path = env;
  }
  if (!path.empty()) base = load_config(path, base);
  apply_overrides(raw, base);
  if (raw.depth) {
    inv.depths = parse_depths(*raw.depth);
    if (!inv.depths.empty()) base.confirmation_depth = inv.depths.front();
  } else {
    inv.depths = inv.subcommand == "estimate" ? std::vector<std::int32_t>{1, 2, 3, 4}
                                              : std::vector<std::int32_t>{base.confirmation_depth};
  }
  inv.config = base;
  if (inv.subcommand == "oracle") {
    if (!(inv.q > 0.0 && inv.q < 1.0)) throw ConfigError("--q must lie in (0, 1)");
    if (inv.z < 0) throw ConfigError("--z must be nonnegative");
    if (inv.race_replications < 0) throw ConfigError("--simulate must be nonnegative");
    if (inv.config.bounds.max_events < 1) throw ConfigError("max_events must be positive");
  } else {
    validate(inv.config);
    for (std::int32_t d : inv.depths) {
      if (d < 1) throw ConfigError("confirmation depth must be at least 1");
    }
  }
  if (inv.min_blocks < 0) throw ConfigError("--min-blocks must be nonnegative");
  return inv;
}

namespace {

// Writes through `fn` to --out, or to `out` when no path is set.
template <class Fn>
void emit(const CliInvocation& inv, std::ostream& out, Fn fn) {
  if (inv.out.empty()) {
    fn(out);
    return;
  }
  std::ofstream file(inv.out);
  if (!file) throw std::runtime_error("cannot open " + inv.out + " for writing");
  fn(file);
  file.flush();
  if (!file) throw std::runtime_error("write to " + inv.out + " failed");
}

nlohmann::json outcome_json(const RunOutcome& o, std::uint64_t seed) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : o.nodes) {
    nodes.push_back({{"name", n.name}, {"tip", n.tip}, {"length", n.length}, {"entries", n.entries},
                     {"orphans", n.orphans}});
  }
  return {{"seed", seed},
          {"success", o.success},
          {"termination", to_string(o.reason)},
          {"events", o.events},
          {"sim_time_s", o.sim_time},
          {"blocks_mined", o.blocks_mined},
          {"transactions_created", o.transactions_created},
          {"fork_triggered", o.fork_triggered},
          {"mblock", o.mblock},
          {"main_chain_blocks", o.main_chain_blocks},
          {"nodes", nodes}};
}

void write_outcome_table(std::ostream& out, const RunOutcome& o, std::uint64_t seed) {
  char line[160];
  std::snprintf(line, sizeof line, "seed %llu: %s, %s after %lld events, %.1f min simulated\n",
                static_cast<unsigned long long>(seed), o.success ? "double spend succeeded" : "no double spend",
                to_string(o.reason), static_cast<long long>(o.events), o.sim_time / 60.0);
  out << line;
  out << "blocks mined " << o.blocks_mined << ", transactions created " << o.transactions_created;
  if (o.fork_triggered) out << ", duplicate in block " << o.mblock;
  out << '\n';
  std::snprintf(line, sizeof line, "%-8s  %-5s  %-6s  %-7s  %s\n", "Node", "Tip", "Length", "Entries", "Orphans");
  out << line;
  for (const auto& n : o.nodes) {
    std::snprintf(line, sizeof line, "%-8s  %-5d  %-6d  %-7zu  %zu\n", n.name.c_str(), n.tip, n.length, n.entries,
                  n.orphans);
    out << line;
  }
  out << "main-chain blocks per pool:";
  for (std::size_t i = 0; i < o.main_chain_blocks.size(); ++i) out << ' ' << i << '=' << o.main_chain_blocks[i];
  out << '\n';
}

int execute(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  const ScenarioConfig& c = inv.config;
  if (inv.subcommand == "simulate") {
    if (inv.dump_config) {
      emit(inv, out, [&](std::ostream& o) { o << config_to_json(c) << '\n'; });
      return 0;
    }
    const RunOutcome o = run(c, c.seed, {}, inv.trace ? &err : nullptr);
    if (inv.format == "table") {
      write_outcome_table(out, o, c.seed);
    } else {
      emit(inv, out, [&](std::ostream& s) {
        if (inv.format == "json") {
          s << outcome_json(o, c.seed).dump(2) << '\n';
        } else {
          s << "seed,success,termination,events,sim_time_s,blocks_mined,transactions_created\n"
            << c.seed << ',' << (o.success ? 1 : 0) << ',' << to_string(o.reason) << ',' << o.events << ','
            << o.sim_time << ',' << o.blocks_mined << ',' << o.transactions_created << '\n';
        }
      });
    }
    return 0;
  }
  if (inv.subcommand == "trace") {
    std::ostringstream lines;
    const RunOutcome o = run(c, c.seed, {}, &lines);
    emit(inv, out, [&](std::ostream& s) { s << lines.str(); });
    err << "terminated: " << to_string(o.reason) << (o.success ? " (double spend succeeded)" : "") << '\n';
    return 0;
  }
  if (inv.subcommand == "estimate") {
    if (inv.depths.empty()) {
      err << "error: no depths to estimate\n";
      return 1;
    }
    const auto results = estimate(c, inv.depths, inv.threads);
    if (results.empty()) {
      err << "error: empty result set\n";
      return 1;
    }
    if (inv.format == "table" || !inv.out.empty()) write_estimates_table(out, results);
    if (inv.format == "csv") emit(inv, out, [&](std::ostream& s) { write_estimates_csv(s, results); });
    if (inv.format == "json") emit(inv, out, [&](std::ostream& s) { write_estimates_json(s, results); });
    return 0;
  }
  if (inv.subcommand == "block-shares") {
    const auto report = block_share_report(c, inv.min_blocks, inv.threads);
    if (report.rows.empty()) {
      err << "error: empty result set\n";
      return 1;
    }
    if (inv.format == "table" || !inv.out.empty()) write_shares_table(out, report);
    if (inv.format == "csv") emit(inv, out, [&](std::ostream& s) { write_shares_csv(s, report); });
    if (inv.format == "json") emit(inv, out, [&](std::ostream& s) { write_shares_json(s, report); });
    return 0;
  }
  if (inv.subcommand == "oracle") {
    const double p = catchup_oracle(inv.q, inv.z);
    std::optional<RaceEstimate> race;
    if (inv.race_replications > 0) {
      race = estimate_catchup(inv.q, inv.z, inv.race_replications, c.seed, c.bounds.max_events, inv.threads);
    }
    char line[200];
    if (inv.format == "table") {
      std::snprintf(line, sizeof line, "%.6f\n", p);
      out << line;
      if (race) {
        std::snprintf(line, sizeof line, "simulated %lld/%lld = %.6f, CI [%.6f, %.6f]\n",
                      static_cast<long long>(race->estimate.successes),
                      static_cast<long long>(race->estimate.replications), race->estimate.point,
                      race->estimate.ci_low, race->estimate.ci_high);
        out << line;
      }
      return 0;
    }
    emit(inv, out, [&](std::ostream& s) {
      if (inv.format == "json") {
        nlohmann::json j = {{"q", inv.q}, {"z", inv.z}, {"probability", p}};
        if (race) {
          j["simulated"] = {{"successes", race->estimate.successes},
                            {"runs", race->estimate.replications},
                            {"point", race->estimate.point},
                            {"ci_low", race->estimate.ci_low},
                            {"ci_high", race->estimate.ci_high}};
        }
        s << j.dump(2) << '\n';
      } else {
        s << "q,z,probability" << (race ? ",successes,runs,point,ci_low,ci_high" : "") << '\n';
        std::snprintf(line, sizeof line, "%.6f,%d,%.9f", inv.q, inv.z, p);
        s << line;
        if (race) {
          std::snprintf(line, sizeof line, ",%lld,%lld,%.6f,%.6f,%.6f",
                        static_cast<long long>(race->estimate.successes),
                        static_cast<long long>(race->estimate.replications), race->estimate.point,
                        race->estimate.ci_low, race->estimate.ci_high);
          s << line;
        }
        s << '\n';
      }
    });
    return 0;
  }
  err << "error: unknown subcommand " << inv.subcommand << '\n';
  return 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliInvocation inv;
  try {
    std::string help;
    inv = parse_and_validate(args, &help);
    if (inv.subcommand == "help") {
      out << help;
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for the list of flags.\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  }
  try {
    return execute(inv, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace btcsim
