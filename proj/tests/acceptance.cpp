// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--strict] [--log FILE] [criterion ...]
//
// Without arguments every criterion runs. --log copies the verdict lines to
// FILE. The exit status is 0 unless a criterion throws, or --strict is given
// and some criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dic/data.hpp"
#include "dic/diffusion.hpp"
#include "dic/estimator.hpp"
#include "dic/experiment.hpp"
#include "dic/model.hpp"
#include "dic/oracle.hpp"
#include "dic/random.hpp"
#include "dic/strategies.hpp"

using namespace dic;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

std::vector<DicNetwork> oracle_instances() {
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(std::string(DIC_FIXTURE_DIR) + "/oracle"))
    if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  std::vector<DicNetwork> out;
  for (const auto& p : paths) out.push_back(load_network(p));
  return out;
}

std::vector<std::string> oracle_names() {
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(std::string(DIC_FIXTURE_DIR) + "/oracle"))
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

// 1. Exact and sampled value of seeding u on the two-node fixture.
Outcome oracle_sampler_agreement() {
  constexpr double kExpected = 1.48;
  constexpr double kExactTolerance = 1e-12;
  constexpr std::int64_t kReplications = 1000000;
  constexpr double kDelta = 0.001;
  constexpr double kMaxSeconds = 30.0;

  const auto t0 = std::chrono::steady_clock::now();
  DicNetwork n = fixtures::two_node();
  SeedListPolicy policy({0}, SeedingPattern::single_step(1));
  const double exact = exact_policy_value(n, policy);
  auto factory = make_seed_list_factory({0}, SeedingPattern::single_step(1));
  Estimate e = estimate_policy_spread(n, factory, kReplications, 20240601, {kDelta, 1});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const bool pass = std::abs(exact - kExpected) <= kExactTolerance &&
                    std::abs(e.mean - exact) <= e.half_width && secs < kMaxSeconds;
  return {pass, fmt("exact %.12f, sampled %.6f, half-width %.6f, %.1f s", exact, e.mean, e.half_width, secs)};
}

// 2. Monotonicity and submodularity of spread_count on random 8-node nets.
Outcome property_suite() {
  constexpr int kTrials = 1000;
  constexpr double kMaxSeconds = 60.0;
  const auto t0 = std::chrono::steady_clock::now();
  PropertyReport r = check_properties_random(8, kTrials, 99);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = r.trials == kTrials && r.monotonicity_violations == 0 && r.submodularity_violations == 0 &&
                    secs < kMaxSeconds;
  return {pass, fmt("%.0f trials, %.0f monotonicity and %.0f submodularity violations, %.1f s", r.trials,
                    r.monotonicity_violations, r.submodularity_violations, secs)};
}

// 3. A* dominates every explicit pattern; strictly on at least one instance.
Outcome theorem1() {
  constexpr std::size_t kMinInstances = 10;
  constexpr double kMaxSeconds = 300.0;
  const auto t0 = std::chrono::steady_clock::now();
  auto nets = oracle_instances();
  auto names = oracle_names();
  bool holds = true;
  int strict = 0;
  std::ostringstream detail;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    Theorem1Report r = check_theorem1(nets[i]);
    holds = holds && r.holds;
    strict += r.strict_any;
    if (!r.holds) detail << names[i] << " violates; ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail << nets.size() << " instances, strict on " << strict << ", " << fmt("%.1f s", secs);
  return {holds && strict >= 1 && nets.size() >= kMinInstances && secs < kMaxSeconds, detail.str()};
}

// 4. Exact-gain A-Greedy reaches (1 - 1/e) of the A* optimum.
Outcome theorem2() {
  constexpr double kMaxSeconds = 300.0;
  const auto t0 = std::chrono::steady_clock::now();
  auto nets = oracle_instances();
  auto names = oracle_names();
  bool holds = true;
  double worst = 1e300;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    Theorem2Report r = check_theorem2(nets[i]);
    std::printf("    %-16s greedy %.6f optimum %.6f ratio %.4f margin %.6f\n", names[i].c_str(), r.greedy,
                r.optimum, r.ratio, r.margin);
    holds = holds && r.holds && r.margin >= 0.0;
    worst = std::min(worst, r.margin);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {holds && !nets.empty() && secs < kMaxSeconds,
          fmt("%.0f instances, smallest margin %.6f, %.1f s", nets.size(), worst, secs)};
}

// 5. Lazy-forward selection equals exhaustive argmax at every step.
Outcome celf_equivalence() {
  constexpr int kRuns = 20;
  constexpr int kMinFewer = 15;
  Rng rng(5);
  int equal = 0;
  int fewer = 0;
  for (int i = 0; i < kRuns; ++i) {
    DicNetwork n = random_network(30, 0.08, 3, 6, rng);
    StrategyParams params;
    params.samples = 300;
    params.seed = rng();
    FullRealization x = sample_full(n, rng);
    GreedySetup lazy = prepare_a_greedy(n, params);
    GreedySetup full = lazy;
    full.lazy = false;
    AdaptiveGreedyPolicy pl(lazy);
    AdaptiveGreedyPolicy pf(full);
    RunResult rl = run_policy(n, pl, x);
    RunResult rf = run_policy(n, pf, x);
    bool same = rl.trace == rf.trace && pl.selections().size() == pf.selections().size();
    for (std::size_t s = 0; same && s < pl.selections().size(); ++s) {
      same = pl.selections()[s].node == pf.selections()[s].node &&
             pl.selections()[s].total_gain == pf.selections()[s].total_gain;
    }
    equal += same;
    fewer += pl.stats().gain_evaluations < pf.stats().gain_evaluations;
  }
  return {equal == kRuns && fewer >= kMinFewer,
          fmt("%.0f/%.0f runs select identically, %.0f use fewer evaluations", equal, kRuns, fewer)};
}

const SummaryRow* find_row(const std::vector<SummaryRow>& rows, const std::string& strategy, int budget) {
  for (const auto& r : rows)
    if (r.strategy == strategy && r.budget == budget) return &r;
  return nullptr;
}

// 6. Strategy ordering and A-Greedy margin on a generated power-law network.
Outcome power_law_reproduction() {
  constexpr double kMinPerSeedRatio = 1.25;
  constexpr double kMaxSeconds = 1800.0;
  const std::vector<int> budgets{10, 20, 30};

  ExperimentConfig c;
  c.generator = GeneratorSpec{2500, 26000, 7};
  c.preset = "f1:0.01";
  c.activation = 0.5;
  c.budgets = budgets;
  c.replications = 200;
  c.samples = 10000;
  c.prune_samples = 2000;
  c.master_seed = 1;
  const auto t0 = std::chrono::steady_clock::now();
  DicNetwork net = build_network(c);
  auto summary = summarize(run_experiment(c, net), net.node_count(), c.delta);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool ordered = true;
  bool separated = true;
  bool margin = true;
  double a_total = 0, g_total = 0, a_seeds = 0, g_seeds = 0;
  std::string ratios;
  for (int b : budgets) {
    const SummaryRow* a = find_row(summary, "a-greedy", b);
    const SummaryRow* h = find_row(summary, "h-greedy", b);
    const SummaryRow* g = find_row(summary, "greedy", b);
    const SummaryRow* r = find_row(summary, "random", b);
    const bool ord = a->mean_spread >= h->mean_spread && h->mean_spread >= g->mean_spread &&
                     g->mean_spread >= r->mean_spread;
    const bool sep = a->mean_spread - a->ci95 > g->mean_spread + g->ci95;
    const double ratio = (a->mean_spread / a->mean_seeds_used) / (g->mean_spread / g->mean_seeds_used);
    std::printf("    B=%-3d A %.2f+-%.2f H %.2f G %.2f+-%.2f R %.2f per-seed ratio %.3f%s%s%s\n", b,
                a->mean_spread, a->ci95, h->mean_spread, g->mean_spread, g->ci95, r->mean_spread, ratio,
                ord ? "" : " [order]", sep ? "" : " [overlap]", ratio >= kMinPerSeedRatio ? "" : " [margin]");
    ordered = ordered && ord;
    separated = separated && sep;
    margin = margin && ratio >= kMinPerSeedRatio;
    ratios += (ratios.empty() ? "" : "/") + fmt("%.3f", ratio);
    a_total += a->mean_spread;
    g_total += g->mean_spread;
    a_seeds += a->mean_seeds_used;
    g_seeds += g->mean_seeds_used;
  }
  const double pooled = (a_total / a_seeds) / (g_total / g_seeds);
  std::ostringstream detail;
  detail << "ordering " << (ordered ? "ok" : "broken") << ", intervals " << (separated ? "disjoint" : "overlap")
         << ", per-seed ratio " << ratios << (margin ? " all >= 1.25" : " not all >= 1.25")
         << fmt(" (pooled %.3f), %.0f s", pooled, secs);
  return {ordered && separated && margin && secs < kMaxSeconds, detail.str()};
}

// 7. H-Greedy prunes enough to save evaluations without losing spread.
Outcome pruning_economics() {
  constexpr double kMinPruned = 0.3;
  constexpr double kMaxEvaluationRatio = 0.8;
  constexpr double kMaxSpreadGap = 0.10;
  constexpr double kMaxSeconds = 1800.0;

  ExperimentConfig c;
  c.generator = GeneratorSpec{2500, 26000, 7};
  c.preset = "f3:0.1,0.01,0.001";
  c.activation = 0.5;
  c.strategies = {"a-greedy", "h-greedy"};
  c.budgets = {10};
  c.replications = 20;
  c.samples = 200;
  c.prune_samples = 1000;
  c.master_seed = 3;
  const auto t0 = std::chrono::steady_clock::now();
  DicNetwork net = build_network(c);
  const double pruned = run_prune_stats(c, net).prune.pruned_fraction();
  auto rows = run_experiment(c, net);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  double evals[2] = {0, 0};
  double spread[2] = {0, 0};
  for (const auto& r : rows) {
    const int k = r.strategy == "h-greedy";
    evals[k] += static_cast<double>(r.gain_evaluations);
    spread[k] += r.spread;
  }
  const double eval_ratio = evals[1] / evals[0];
  const double gap = std::abs(spread[1] - spread[0]) / spread[0];
  const bool pass = pruned >= kMinPruned && eval_ratio <= kMaxEvaluationRatio && gap <= kMaxSpreadGap &&
                    secs < kMaxSeconds;
  return {pass, fmt("pruned %.3f, evaluation ratio %.3f, spread gap %.3f, %.0f s", pruned, eval_ratio, gap, secs)};
}

std::string rows_without_wall_time(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_rows_csv(out, rows);
  // wall_time_ms is the eighth column.
  static const std::regex wall("^((?:[^,]*,){7})[^,]*", std::regex::multiline);
  return std::regex_replace(out.str(), wall, "$1");
}

// 8. Byte-identical result CSVs across worker counts.
Outcome determinism() {
  ExperimentConfig c;
  c.generator = GeneratorSpec{400, 3000, 11};
  c.preset = "f3:0.1,0.01,0.001";
  c.activation = 0.5;
  c.budgets = {1, 3, 5};
  c.replications = 6;
  c.samples = 300;
  c.prune_samples = 300;
  c.master_seed = 42;
  DicNetwork net = build_network(c);
  std::string reference;
  int identical = 0;
  for (unsigned w : {1u, 4u, 8u}) {
    c.workers = w;
    const std::string csv = rows_without_wall_time(run_experiment(c, net));
    if (reference.empty()) reference = csv;
    identical += csv == reference;
  }
  return {identical == 3, fmt("%.0f of 3 worker counts match the single-worker CSV (%.0f bytes)", identical,
                              reference.size())};
}

// 9. Auxiliary graph of G1 with three attempts per node.
Outcome auxiliary_structure() {
  AuxiliaryGraph aux = build_auxiliary(fixtures::g1(), 3);
  const bool pass = aux.node_count() == 24 && aux.attempt_edges.size() == 18 && aux.value_edges.size() == 10;
  return {pass, fmt("%.0f nodes, %.0f attempt edges, %.0f value edges", aux.node_count(),
                    aux.attempt_edges.size(), aux.value_edges.size())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria{
      {1, {"oracle/sampler agreement", oracle_sampler_agreement}},
      {2, {"property suite", property_suite}},
      {3, {"A* dominates explicit patterns", theorem1}},
      {4, {"adaptive greedy approximation", theorem2}},
      {5, {"lazy-forward equivalence", celf_equivalence}},
      {6, {"power-law strategy ordering", power_law_reproduction}},
      {7, {"pruning economics", pruning_economics}},
      {8, {"worker-count determinism", determinism}},
      {9, {"auxiliary graph structure", auxiliary_structure}},
  };
  bool strict = false;
  std::ofstream log;
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--strict") {
      strict = true;
    } else if (arg == "--log" && i + 1 < argc) {
      log.open(argv[++i]);
      if (!log) {
        std::cerr << "cannot write " << argv[i] << '\n';
        return 2;
      }
    } else {
      const int k = std::atoi(arg.c_str());
      if (!criteria.count(k)) {
        std::cerr << "unknown criterion: " << arg << '\n';
        return 2;
      }
      selected.insert(k);
    }
  }
  auto report = [&](const std::string& line) {
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    if (log) log << line << std::endl;
  };
  int failed = 0;
  for (const auto& [k, entry] : criteria) {
    if (!selected.empty() && !selected.count(k)) continue;
    const std::string head = "criterion " + std::to_string(k) + " (" + entry.first + "): ";
    try {
      Outcome o = entry.second();
      report((o.pass ? "PASS " : "FAIL ") + head + o.detail);
      failed += !o.pass;
    } catch (const std::exception& e) {
      report("FAIL " + head + "error: " + e.what());
      return 1;
    }
  }
  report(std::to_string(failed) + " criteria failed");
  return strict && failed > 0 ? 1 : 0;
}
