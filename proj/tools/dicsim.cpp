// dicsim: experiment harness and oracle front end.
//
// Exit codes: 0 success, 1 a checked property failed, 2 configuration error,
// 3 oracle guard violation, 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dic/data.hpp"
#include "dic/estimator.hpp"
#include "dic/experiment.hpp"
#include "dic/oracle.hpp"
#include "dic/strategies.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace dic;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;
constexpr int kExitIo = 4;

// Files written by one command; deleted again unless commit() is reached.
class OutputSet {
 public:
  ~OutputSet() {
    if (committed_) return;
    for (const auto& p : paths_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }
  std::ofstream open(const fs::path& path) {
    if (path.has_parent_path()) {
      std::error_code ec;
      fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    paths_.push_back(path);
    return out;
  }
  void commit() { committed_ = true; }

 private:
  std::vector<fs::path> paths_;
  bool committed_ = false;
};

fs::path sibling(const std::string& out, const std::string& suffix) {
  fs::path p(out);
  p.replace_extension(suffix);
  return p;
}

void write_sidecar(OutputSet& files, const std::string& out, const std::string& command, const ExperimentConfig& c,
                   const DicNetwork& net) {
  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["command"] = command;
  meta["config"] = config_to_json(c);
  meta["network"] = {{"nodes", net.node_count()}, {"edges", net.edge_count()}};
  auto f = files.open(sibling(out, ".meta.json"));
  f << meta.dump(2) << '\n';
  if (!f) throw IoError("failed writing sidecar for " + out);
}

struct NetworkFlags {
  std::string net;
  std::string edges;
  std::string direction = "as-is";
  std::string gen;
  double offset = kDefaultAttachmentOffset;
  std::string fixture;
  std::string preset;
  double activation = -1.0;

  void attach(CLI::App* app) {
    app->add_option("--net", net, "network JSON file");
    app->add_option("--edges", edges, "edge-list file");
    app->add_option("--direction", direction, "edge-list direction: as-is, reciprocate, reverse");
    app->add_option("--gen", gen, "generate a power-law network: n,edges,seed");
    app->add_option("--gen-offset", offset, "attachment offset of the generator, in [0, 1)");
    app->add_option("--fixture", fixture, "built-in network: g1, two-node");
    app->add_option("--preset", preset, "f1:p | f2:mean[,bins] | f3:v1,v2,...");
    app->add_option("--activation", activation, "seeding success probability of every node");
  }

  void apply(ExperimentConfig& c) const {
    c.net_path = net;
    c.edge_list_path = edges;
    c.direction = direction;
    if (!gen.empty()) {
      c.generator = parse_generator(gen);
      c.generator->offset = offset;
    }
    c.fixture = fixture;
    c.preset = preset;
    if (activation >= 0.0) c.activation = activation;
  }
};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  // A run's sidecar is itself a valid config.
  return config_from_json(j.contains("config") ? j["config"] : j);
}

std::vector<std::pair<std::string, DicNetwork>> oracle_instances(const std::vector<std::string>& files,
                                                                 const std::string& dir, const std::string& fixture) {
  std::vector<std::pair<std::string, DicNetwork>> out;
  for (const auto& f : files) out.emplace_back(f, load_network(f));
  if (!dir.empty()) {
    std::vector<fs::path> found;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (entry.path().extension() == ".json") found.push_back(entry.path());
    }
    if (ec) throw IoError("cannot list " + dir);
    std::sort(found.begin(), found.end());
    for (const auto& p : found) out.emplace_back(p.filename().string(), load_network(p.string()));
  }
  if (fixture == "g1") out.emplace_back("g1", fixtures::g1());
  if (fixture == "two-node") out.emplace_back("two-node", fixtures::two_node());
  if (!fixture.empty() && fixture != "g1" && fixture != "two-node") throw ConfigError("unknown fixture " + fixture);
  if (out.empty()) throw ConfigError("no oracle instance given (--net, --dir or --fixture)");
  return out;
}

std::unique_ptr<Policy> make_oracle_policy(const std::string& spec, const std::string& pattern) {
  if (spec == "empty") return std::make_unique<EmptyPolicy>();
  if (spec == "exact-greedy") return std::make_unique<ExactGreedyPolicy>(true);
  if (spec == "exact-greedy-a0") return std::make_unique<ExactGreedyPolicy>(false);
  if (spec.rfind("seed:", 0) == 0) {
    std::vector<NodeId> seeds;
    for (const auto& s : split(spec.substr(5))) {
      try {
        seeds.push_back(static_cast<NodeId>(std::stoul(s)));
      } catch (const std::exception&) {
        throw ConfigError("bad node id '" + s + "' in --policy");
      }
    }
    try {
      return std::make_unique<SeedListPolicy>(std::move(seeds), parse_pattern(pattern));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--pattern: ") + e.what());
    }
  }
  throw ConfigError("unknown policy '" + spec + "' (empty, seed:u,v,..., exact-greedy, exact-greedy-a0)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic Independent Cascade simulator"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "budget sweep over strategies, one CSV row per replication");
  NetworkFlags run_net;
  run_net.attach(run);
  std::string strategies = "random,greedy,a-greedy,h-greedy", budgets, config_path;
  ExperimentConfig run_cfg;
  run->add_option("--strategies", strategies, "comma list of random, greedy, a-greedy, h-greedy");
  run->add_option("--budgets", budgets, "a..b[:step] or comma list");
  run->add_option("--reps", run_cfg.replications, "replications per (strategy, budget)");
  run->add_option("--R", run_cfg.samples, "Monte Carlo samples per gain estimate");
  run->add_option("--R-pre", run_cfg.prune_samples, "samples per node in the H-Greedy pre-pass");
  run->add_option("--prune-rule", run_cfg.prune_rule, "H-Greedy control limit: average or population");
  run->add_option("--seed", run_cfg.master_seed, "master seed");
  run->add_option("--workers", run_cfg.workers, "worker threads");
  run->add_option("--delta", run_cfg.delta, "confidence parameter of reported half-widths");
  run->add_flag("!--greedy-ignore-seed-failure", run_cfg.greedy_counts_seed_failure,
                "static Greedy assumes every seed takes");
  run->add_option("--out", run_cfg.out, "result CSV path")->required();
  run->add_option("--config", config_path, "JSON config or sidecar; flags on the command line are ignored");

  // prune-stats
  auto* prune = app.add_subcommand("prune-stats", "single-seed spread estimates and the H-Greedy control limit");
  NetworkFlags prune_net;
  prune_net.attach(prune);
  ExperimentConfig prune_cfg;
  prune->add_option("--R-pre", prune_cfg.prune_samples, "samples per node");
  prune->add_option("--prune-rule", prune_cfg.prune_rule, "control limit: average or population");
  prune->add_option("--seed", prune_cfg.master_seed, "master seed");
  prune->add_option("--workers", prune_cfg.workers, "worker threads");
  prune->add_option("--out", prune_cfg.out, "per-node CSV path")->required();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact checks on small instances");
  std::string subject, policy_spec = "empty", pattern_text = "a*", dir, fixture;
  std::vector<std::string> files;
  int trials = 1000, nodes = 8;
  std::uint64_t oracle_seed = 1;
  oracle->add_option("subject", subject, "properties | theorem1 | theorem2 | exact-value")
      ->required()
      ->check(CLI::IsMember({"properties", "theorem1", "theorem2", "exact-value"}));
  oracle->add_option("--net", files, "instance file (repeatable)");
  oracle->add_option("--dir", dir, "directory of instance files");
  oracle->add_option("--fixture", fixture, "g1 or two-node");
  oracle->add_option("--policy", policy_spec, "empty | seed:u,v,... | exact-greedy | exact-greedy-a0");
  oracle->add_option("--pattern", pattern_text, "pattern for seed lists: a* or a comma list");
  oracle->add_option("--trials", trials, "property trials");
  oracle->add_option("--nodes", nodes, "nodes of the random property instances");
  oracle->add_option("--seed", oracle_seed, "seed of the property trials");

  // gen
  auto* gen = app.add_subcommand("gen", "write a generated power-law network");
  std::size_t gen_nodes = 2500, gen_edges = 26000;
  std::uint64_t gen_seed = 1;
  double gen_offset = kDefaultAttachmentOffset, gen_activation = 1.0;
  std::string gen_preset = "f1:0.01", gen_out;
  int gen_budget = 1;
  gen->add_option("--n", gen_nodes, "node count");
  gen->add_option("--edges", gen_edges, "directed edge target");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--offset", gen_offset, "attachment offset in [0, 1)");
  gen->add_option("--preset", gen_preset, "propagation preset");
  gen->add_option("--activation", gen_activation, "activation probability");
  gen->add_option("--budget", gen_budget, "budget stored in the file");
  gen->add_option("--out", gen_out, "output JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      ExperimentConfig c = run_cfg;
      if (!config_path.empty()) {
        const std::string out = c.out;
        c = load_config_file(config_path);
        c.out = out;
      } else {
        run_net.apply(c);
        c.strategies = split(strategies);
        if (budgets.empty()) throw ConfigError("--budgets is required");
        c.budgets = parse_budgets(budgets);
      }
      validate_config(c);
      const DicNetwork net = build_network(c);
      OutputSet files;
      auto rows_out = files.open(c.out);
      auto summary_out = files.open(sibling(c.out, ".summary.csv"));
      const auto rows = run_experiment(c, net, &std::cerr);
      write_rows_csv(rows_out, rows);
      write_summary_csv(summary_out, summarize(rows, net.node_count(), c.delta));
      write_sidecar(files, c.out, "run", c, net);
      rows_out.close();
      summary_out.close();
      if (!rows_out || !summary_out) throw IoError("failed writing " + c.out);
      files.commit();
      return 0;
    }
    if (*prune) {
      ExperimentConfig c = prune_cfg;
      prune_net.apply(c);
      c.strategies = {"h-greedy"};
      validate_config(c);
      const DicNetwork net = build_network(c);
      OutputSet files;
      auto nodes_out = files.open(c.out);
      auto summary_out = files.open(sibling(c.out, ".summary.csv"));
      const auto result = run_prune_stats(c, net);
      write_prune_csv(nodes_out, result.prune);
      write_prune_summary_csv(summary_out, result.prune);
      write_sidecar(files, c.out, "prune-stats", c, net);
      nodes_out.close();
      summary_out.close();
      if (!nodes_out || !summary_out) throw IoError("failed writing " + c.out);
      files.commit();
      std::cout << std::setprecision(6) << "mean " << result.prune.mean << " stddev " << result.prune.stddev
                << " average_stddev " << result.prune.average_stddev << " threshold " << result.prune.threshold << " pruned_fraction " << result.prune.pruned_fraction()
                << '\n';
      return 0;
    }
    if (*gen) {
      const Preset preset = make_preset(gen_preset, gen_activation);
      const DicNetwork net = generate_power_law(gen_nodes, gen_edges, gen_seed, preset, gen_budget, gen_offset);
      OutputSet files;
      auto out = files.open(gen_out);
      write_network(net, out);
      out.close();
      if (!out) throw IoError("failed writing " + gen_out);
      files.commit();
      std::cout << "nodes " << net.node_count() << " edges " << net.edge_count() << '\n';
      return 0;
    }
    // oracle
    std::cout << std::setprecision(10);
    if (subject == "properties") {
      PropertyReport r;
      if (files.empty() && dir.empty() && fixture.empty()) {
        r = check_properties_random(static_cast<std::size_t>(nodes), trials, oracle_seed);
      } else {
        for (const auto& [name, net] : oracle_instances(files, dir, fixture)) {
          const PropertyReport one = check_properties(net, trials, oracle_seed);
          r.trials += one.trials;
          r.monotonicity_violations += one.monotonicity_violations;
          r.submodularity_violations += one.submodularity_violations;
        }
      }
      const bool pass = r.monotonicity_violations == 0 && r.submodularity_violations == 0;
      std::cout << (pass ? "PASS" : "FAIL") << " properties trials=" << r.trials
                << " monotonicity_violations=" << r.monotonicity_violations
                << " submodularity_violations=" << r.submodularity_violations << '\n';
      return pass ? 0 : kExitFailed;
    }
    const auto instances = oracle_instances(files, dir, fixture);
    bool all = true;
    for (const auto& [name, net] : instances) {
      if (subject == "theorem1") {
        const Theorem1Report r = check_theorem1(net);
        all = all && r.holds;
        std::cout << (r.holds ? "PASS" : "FAIL") << ' ' << name << " A*=" << r.adaptive_star;
        for (const auto& row : r.patterns) std::cout << ' ' << row.pattern << '=' << row.value;
        std::cout << (r.strict_all ? " strict" : "") << '\n';
      } else if (subject == "theorem2") {
        const Theorem2Report r = check_theorem2(net);
        all = all && r.holds;
        std::cout << (r.holds ? "PASS" : "FAIL") << ' ' << name << " greedy=" << r.greedy << " opt=" << r.optimum
                  << " ratio=" << r.ratio << " margin=" << r.margin << '\n';
      } else {
        const auto policy = make_oracle_policy(policy_spec, pattern_text);
        std::cout << name << " value=" << exact_policy_value(net, *policy) << '\n';
      }
    }
    return all ? 0 : kExitFailed;
  } catch (const OracleGuardError& e) {
    std::cerr << "oracle guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  }
}
