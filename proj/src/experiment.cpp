#include "dic/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "dic/data.hpp"
#include "dic/estimator.hpp"

namespace dic {

using nlohmann::json;

namespace {

const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names{"random", "greedy", "a-greedy", "h-greedy"};
  return names;
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(what + ": '" + text + "' is not an integer");
}

}  // namespace

json config_to_json(const ExperimentConfig& c) {
  json j;
  if (!c.net_path.empty()) j["net"] = c.net_path;
  if (!c.edge_list_path.empty()) {
    j["edge_list"] = c.edge_list_path;
    j["direction"] = c.direction;
  }
  if (c.generator) {
    j["gen"] = {{"nodes", c.generator->nodes},
                {"edges", c.generator->edges},
                {"seed", c.generator->seed},
                {"offset", c.generator->offset}};
  }
  if (!c.fixture.empty()) j["fixture"] = c.fixture;
  if (!c.preset.empty()) j["preset"] = c.preset;
  if (c.activation) j["activation"] = *c.activation;
  j["strategies"] = c.strategies;
  j["budgets"] = c.budgets;
  j["reps"] = c.replications;
  j["R"] = c.samples;
  j["R_pre"] = c.prune_samples;
  j["seed"] = c.master_seed;
  j["workers"] = c.workers;
  j["delta"] = c.delta;
  j["greedy_counts_seed_failure"] = c.greedy_counts_seed_failure;
  j["prune_rule"] = c.prune_rule;
  if (!c.out.empty()) j["out"] = c.out;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.net_path = j.value("net", "");
    c.edge_list_path = j.value("edge_list", "");
    c.direction = j.value("direction", "as-is");
    if (j.contains("gen")) {
      const json& g = j.at("gen");
      c.generator = GeneratorSpec{g.at("nodes").get<std::size_t>(), g.at("edges").get<std::size_t>(),
                                  g.at("seed").get<std::uint64_t>(), g.value("offset", kDefaultAttachmentOffset)};
    }
    c.fixture = j.value("fixture", "");
    c.preset = j.value("preset", "");
    if (j.contains("activation")) c.activation = j.at("activation").get<double>();
    if (j.contains("strategies")) c.strategies = j.at("strategies").get<std::vector<std::string>>();
    if (j.contains("budgets")) {
      const json& b = j.at("budgets");
      c.budgets = b.is_string() ? parse_budgets(b.get<std::string>()) : b.get<std::vector<int>>();
    }
    c.replications = j.value("reps", c.replications);
    c.samples = j.value("R", c.samples);
    c.prune_samples = j.value("R_pre", c.prune_samples);
    c.master_seed = j.value("seed", c.master_seed);
    c.workers = j.value("workers", c.workers);
    c.delta = j.value("delta", c.delta);
    c.greedy_counts_seed_failure = j.value("greedy_counts_seed_failure", c.greedy_counts_seed_failure);
    c.prune_rule = j.value("prune_rule", c.prune_rule);
    c.out = j.value("out", "");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

std::vector<int> parse_budgets(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(part, "budget"));
      continue;
    }
    const int lo = parse_int(part.substr(0, dots), "budget range start");
    std::string rest = part.substr(dots + 2);
    int step = 1;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      step = parse_int(rest.substr(colon + 1), "budget step");
      rest = rest.substr(0, colon);
    }
    const int hi = parse_int(rest, "budget range end");
    if (step < 1 || hi < lo) throw ConfigError("budget range '" + part + "' is empty or has a bad step");
    for (int b = lo; b <= hi; b += step) out.push_back(b);
  }
  if (out.empty()) throw ConfigError("no budgets given");
  return out;
}

GeneratorSpec parse_generator(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',')) {
    throw ConfigError("--gen expects n,edges,seed");
  }
  GeneratorSpec g;
  try {
    g.nodes = std::stoull(a);
    g.edges = std::stoull(b);
    g.seed = std::stoull(c);
  } catch (const std::exception&) {
    throw ConfigError("--gen expects n,edges,seed as integers");
  }
  return g;
}

bool is_known_strategy(const std::string& name) {
  const auto& names = strategy_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

void validate_config(const ExperimentConfig& c) {
  const int sources = !c.net_path.empty() + !c.edge_list_path.empty() + c.generator.has_value() + !c.fixture.empty();
  if (sources != 1) throw ConfigError("give exactly one network source (--net, --edges, --gen or --fixture)");
  if (!c.fixture.empty() && c.fixture != "g1" && c.fixture != "two-node") {
    throw ConfigError("unknown fixture '" + c.fixture + "' (g1, two-node)");
  }
  if (c.strategies.empty()) throw ConfigError("no strategies given");
  for (const auto& s : c.strategies) {
    if (!is_known_strategy(s)) throw ConfigError("unknown strategy '" + s + "' (random, greedy, a-greedy, h-greedy)");
  }
  if (c.replications < 1) throw ConfigError("--reps must be at least 1");
  if (c.samples < 1 || c.prune_samples < 1) throw ConfigError("--R and --R-pre must be at least 1");
  if (c.workers < 1) throw ConfigError("--workers must be at least 1");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (c.prune_rule != "average" && c.prune_rule != "population") {
    throw ConfigError("unknown prune rule '" + c.prune_rule + "' (average, population)");
  }
  if (c.activation && !(*c.activation >= 0.0 && *c.activation <= 1.0)) {
    throw ConfigError("--activation must lie in [0, 1]");
  }
}

DicNetwork build_network(const ExperimentConfig& c) {
  validate_config(c);
  const double activation = c.activation.value_or(1.0);
  auto preset = [&] {
    try {
      return make_preset(c.preset.empty() ? "f1:0.01" : c.preset, activation);
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
  };
  if (c.generator) {
    return generate_power_law(c.generator->nodes, c.generator->edges, c.generator->seed, preset(), 1,
                              c.generator->offset);
  }
  if (!c.edge_list_path.empty()) {
    return load_edge_list({c.edge_list_path, parse_directedness(c.direction)}, preset(), 1);
  }
  DicNetwork base = !c.fixture.empty() ? (c.fixture == "g1" ? fixtures::g1() : fixtures::two_node())
                                       : load_network(c.net_path);
  if (c.preset.empty() && !c.activation) return base;
  // Re-label every edge and node with the override.
  NetworkBuilder builder(base.node_count());
  builder.set_budget(base.budget());
  for (NodeId v = 0; v < base.node_count(); ++v) {
    builder.set_activation(v, c.activation.value_or(base.activation(v)));
  }
  const auto override_dist = c.preset.empty() ? std::nullopt : std::optional(preset().propagation);
  for (EdgeId e = 0; e < base.edge_count(); ++e) {
    builder.add_edge(base.source(e), base.target(e), override_dist.value_or(base.distribution(e)));
  }
  return builder.build();
}

namespace {

double per_selection(double ms, int selections) { return selections > 0 ? ms / selections : 0.0; }

void append_rows(std::vector<ResultRow>& rows, const std::string& strategy, int budget, std::uint64_t seed,
                 const std::vector<Replication>& reps, double fixed_ms, std::optional<std::uint64_t> evaluations) {
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const Replication& r = reps[i];
    rows.push_back({strategy, budget, static_cast<int>(i), r.spread, r.rounds, r.seeds_used,
                    evaluations.value_or(r.gain_evaluations),
                    per_selection(fixed_ms + r.selection_ms, std::max(r.selections, fixed_ms > 0 ? 1 : 0)), seed});
  }
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& c, const DicNetwork& net, std::ostream* progress) {
  validate_config(c);
  if (c.budgets.empty()) throw ConfigError("no budgets given");
  for (int b : c.budgets) {
    if (b < 1 || static_cast<std::size_t>(b) > net.node_count()) {
      std::ostringstream msg;
      msg << "budget " << b << " outside [1, " << net.node_count() << "]";
      throw ConfigError(msg.str());
    }
  }
  using Clock = std::chrono::steady_clock;
  StrategyParams params;
  params.samples = c.samples;
  params.prune_samples = c.prune_samples;
  params.seed = c.master_seed;
  params.workers = c.workers;
  params.greedy_counts_seed_failure = c.greedy_counts_seed_failure;
  params.prune_rule = parse_prune_rule(c.prune_rule);

  std::vector<ResultRow> rows;
  for (const std::string& strategy : c.strategies) {
    // The adaptive strategies share one step-one table across budgets.
    std::optional<GreedySetup> setup;
    if (strategy == "a-greedy") setup = prepare_a_greedy(net, params);
    if (strategy == "h-greedy") setup = prepare_h_greedy(net, params);
    for (int b : c.budgets) {
      const DicNetwork net_b = net.with_budget(b);
      if (strategy == "random") {
        const auto reps = run_replications(net_b, make_random_factory(SeedingPattern::single_step(b)),
                                           c.replications, c.master_seed, c.workers);
        append_rows(rows, strategy, b, c.master_seed, reps, 0.0, std::nullopt);
      } else if (strategy == "greedy") {
        const auto t0 = Clock::now();
        std::uint64_t evaluations = 0;
        auto seeds = static_greedy_select(net_b, b, c.samples, c.master_seed, c.greedy_counts_seed_failure,
                                          &evaluations);
        const double select_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        const int picked = static_cast<int>(seeds.size());
        const auto reps = run_replications(
            net_b, make_seed_list_factory(std::move(seeds), SeedingPattern::single_step(b)), c.replications,
            c.master_seed, c.workers);
        for (std::size_t i = 0; i < reps.size(); ++i) {
          const Replication& r = reps[i];
          rows.push_back({strategy, b, static_cast<int>(i), r.spread, r.rounds, r.seeds_used, evaluations,
                          per_selection(select_ms, picked), c.master_seed});
        }
      } else {
        const auto reps = run_replications(net_b, make_greedy_factory(*setup), c.replications, c.master_seed,
                                           c.workers);
        append_rows(rows, strategy, b, c.master_seed, reps, setup->precompute_ms, std::nullopt);
      }
      if (progress) *progress << "done " << strategy << " B=" << b << '\n';
    }
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows, std::size_t node_count, double delta) {
  std::vector<SummaryRow> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].strategy == rows[i].strategy && rows[j].budget == rows[i].budget) ++j;
    SummaryRow s;
    s.strategy = rows[i].strategy;
    s.budget = rows[i].budget;
    s.replications = static_cast<int>(j - i);
    std::uint64_t spread_total = 0;
    double seeds = 0, evals = 0, ms = 0;
    for (std::size_t k = i; k < j; ++k) {
      spread_total += static_cast<std::uint64_t>(rows[k].spread);
      seeds += rows[k].seeds_used;
      evals += static_cast<double>(rows[k].gain_evaluations);
      ms += rows[k].wall_time_ms;
    }
    const double n = static_cast<double>(s.replications);
    s.mean_spread = static_cast<double>(spread_total) / n;
    double ss = 0.0;
    for (std::size_t k = i; k < j; ++k) ss += (rows[k].spread - s.mean_spread) * (rows[k].spread - s.mean_spread);
    s.stddev = s.replications > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    s.half_width = hoeffding_half_width(static_cast<double>(node_count), s.replications, delta);
    s.ci95 = 1.96 * s.stddev / std::sqrt(n);
    s.mean_seeds_used = seeds / n;
    s.mean_gain_evaluations = evals / n;
    s.mean_wall_time_ms = ms / n;
    out.push_back(s);
    i = j;
  }
  return out;
}

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultHeader << '\n';
  for (const ResultRow& r : rows) {
    out << r.strategy << ',' << r.budget << ',' << r.replication << ',' << r.spread << ',' << r.rounds_used << ','
        << r.seeds_used << ',' << r.gain_evaluations << ',' << std::fixed << std::setprecision(4) << r.wall_time_ms
        << std::defaultfloat << ',' << r.master_seed << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "strategy,budget,replications,mean_spread,stddev,half_width,ci95,mean_seeds_used,mean_gain_evaluations,"
         "mean_wall_time_ms\n";
  out << std::setprecision(10);
  for (const SummaryRow& s : rows) {
    out << s.strategy << ',' << s.budget << ',' << s.replications << ',' << s.mean_spread << ',' << s.stddev << ','
        << s.half_width << ',' << s.ci95 << ',' << s.mean_seeds_used << ',' << s.mean_gain_evaluations << ','
        << s.mean_wall_time_ms << '\n';
  }
}

PruneStatsResult run_prune_stats(const ExperimentConfig& c, const DicNetwork& net) {
  validate_config(c);
  const auto t0 = std::chrono::steady_clock::now();
  PruneStatsResult result;
  result.prune = h_greedy_prune(net, c.prune_samples, c.master_seed, c.workers, parse_prune_rule(c.prune_rule));
  result.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

void write_prune_csv(std::ostream& out, const PruneResult& prune) {
  out << "node,estimate,std_error,kept\n" << std::setprecision(10);
  for (std::size_t v = 0; v < prune.estimates.size(); ++v) {
    out << v << ',' << prune.estimates[v] << ',' << prune.standard_errors[v] << ','
        << static_cast<int>(prune.keep[v]) << '\n';
  }
}

void write_prune_summary_csv(std::ostream& out, const PruneResult& prune) {
  out << "nodes,rule,mean,stddev,average_stddev,threshold,kept,pruned_fraction\n" << std::setprecision(10);
  out << prune.estimates.size() << ',' << to_string(prune.rule) << ',' << prune.mean << ',' << prune.stddev << ','
      << prune.average_stddev << ',' << prune.threshold << ',' << prune.kept() << ',' << prune.pruned_fraction()
      << '\n';
}

}  // namespace dic
