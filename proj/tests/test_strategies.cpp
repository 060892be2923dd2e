#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "dic/diffusion.hpp"
#include "dic/model.hpp"
#include "dic/oracle.hpp"
#include "dic/random.hpp"
#include "dic/strategies.hpp"
#include "doctest.h"

using namespace dic;

namespace {

DicNetwork star(std::size_t leaves, double activation, double p, int budget) {
  NetworkBuilder b(leaves + 1);
  b.set_activation_all(activation).set_budget(budget);
  for (NodeId v = 1; v <= leaves; ++v) b.add_edge(0, v, fixed_distribution(p));
  return b.build();
}

DicNetwork ring12() {
  NetworkBuilder b(12);
  b.set_activation_all(0.7).set_budget(3);
  for (NodeId v = 0; v < 12; ++v) {
    b.add_edge(v, (v + 1) % 12, uniform_discrete_distribution({0.2, 0.6}));
    b.add_edge((v + 1) % 12, v, uniform_discrete_distribution({0.2, 0.6}));
  }
  return b.build();
}

}  // namespace

TEST_CASE("pattern parsing and validation") {
  CHECK(parse_pattern("a*").adaptive);
  CHECK(parse_pattern("1,0,2").schedule == std::vector<int>{1, 0, 2});
  CHECK(parse_pattern("1,0,2").to_string() == "(1,0,2)");
  CHECK_THROWS(parse_pattern("1,x"));
  CHECK(SeedingPattern{{0, 1}, false}.violation(3));
  CHECK(SeedingPattern{{2, 2}, false}.violation(3));
  CHECK_FALSE(SeedingPattern{{2, 0, 1}, false}.violation(3));
  CHECK(pattern_a0(2, 4).schedule == std::vector<int>{1, 1, 0, 0});
  CHECK(SeedingPattern::single_step(3).schedule == std::vector<int>{3});
}

TEST_CASE("explicit patterns skip zero steps at quiescence") {
  DicNetwork g = fixtures::g1();
  Rng rng(1);
  FullRealization x = sample_full(g, rng);
  std::fill(x.seed_outcomes.begin(), x.seed_outcomes.end(), 0);
  SeedListPolicy p({0, 3}, SeedingPattern{{1, 0, 0, 1}, false});
  RunResult r = run_policy(g, p, x);
  // Nothing activates, so the two waits collapse and seeding takes two rounds.
  CHECK(r.rounds == 2);
  CHECK(r.executed == std::vector<NodeId>{0, 3});
}

TEST_CASE("random policy spends its budget while anything is eligible") {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    DicNetwork n = random_network(7, 0.3, 2, 1 + static_cast<int>(rng() % 5), rng);
    RandomPolicy p(i % 2 ? SeedingPattern::adaptive_star() : SeedingPattern::single_step(n.budget()), rng());
    RunResult r = run_policy(n, p, sample_full(n, rng));
    CHECK(r.seeds_used <= n.budget());
    if (r.seeds_used < n.budget()) {
      PolicyView view{n, r.final_state.observed, n.budget() - r.seeds_used, true};
      for (NodeId v = 0; v < n.node_count(); ++v) CHECK_FALSE(is_eligible(view, v));
    }
  }
}

TEST_CASE("two-node gain") {
  DicNetwork n = fixtures::two_node();
  PartialRealization y = empty_partial(n);
  const double g = marginal_gain(n, y, 0, 200000, 17);
  CHECK(g == doctest::Approx(1.48).epsilon(0.01));
  CHECK(marginal_gain(n, y, 1, 1000, 17) == 1.0);
  CHECK(exact_marginal_gain(n, start(n), 0) == doctest::Approx(1.48).epsilon(1e-12));
}

TEST_CASE("gain batches are reproducible and shrink with more actives") {
  DicNetwork g = fixtures::g1();
  GainEstimator a(5000, 42);
  GainEstimator b(5000, 42);
  PartialRealization y = empty_partial(g);
  CHECK(a.total_gain(g, y, 0) == b.total_gain(g, y, 0));
  const std::uint64_t before = a.total_gain(g, y, 0);
  y.active[3] = 1;
  y.active_count = 1;
  y.attempts_used[3] = 1;
  y.seed_log = {{3, 0, true}};
  y.revealed_draw[3] = 0;
  y.resolved_attempt[3] = false;
  CHECK(a.total_gain(g, y, 0) <= before);
  CHECK(a.total_gain(g, y, 3) == 0);
  const auto table = initial_gain_totals(g, 5000, 42, 3);
  CHECK(table[0] == before);
}

TEST_CASE("A-Greedy re-seeds a failed hub") {
  DicNetwork n = star(5, 0.5, 1.0, 2);
  Rng rng(0);
  FullRealization x = sample_full(n, rng);
  x.set_seed_success(0, 0, false);
  x.set_seed_success(0, 1, true);
  StrategyParams params;
  params.samples = 2000;
  params.seed = 5;
  AdaptiveGreedyPolicy p(prepare_a_greedy(n, params));
  RunResult r = run_policy(n, p, x);
  CHECK(r.executed == std::vector<NodeId>{0, 0});
  CHECK(r.spread == 6);
}

TEST_CASE("lazy selection equals exhaustive selection") {
  Rng rng(21);
  int fewer = 0;
  const int runs = 40;
  for (int i = 0; i < runs; ++i) {
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
    CHECK(rl.executed == rf.executed);
    CHECK(rl.spread == rf.spread);
    fewer += pl.stats().gain_evaluations < pf.stats().gain_evaluations;
  }
  CHECK(fewer >= runs * 3 / 4);
}

TEST_CASE("H-Greedy without pruning behaves like A-Greedy") {
  DicNetwork ring = ring12();
  StrategyParams params;
  params.samples = 500;
  params.prune_samples = 1000;
  params.seed = 9;
  PruneResult prune;
  GreedySetup h = prepare_h_greedy(ring, params, &prune);
  CHECK(prune.pruned_fraction() == 0.0);
  GreedySetup a = prepare_a_greedy(ring, params);
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    FullRealization x = sample_full(ring, rng);
    AdaptiveGreedyPolicy ph(h);
    AdaptiveGreedyPolicy pa(a);
    CHECK(run_policy(ring, ph, x).trace == run_policy(ring, pa, x).trace);
  }
}

TEST_CASE("pruning keeps the high-spread nodes") {
  // One hub with many certain leaves; leaves spread nothing.
  DicNetwork n = star(9, 1.0, 1.0, 2);
  PruneResult pop = h_greedy_prune(n, 200, 3, 1, PruneRule::population);
  CHECK(pop.estimates[0] == doctest::Approx(10.0));
  CHECK(pop.keep[0] == 1);
  CHECK(pop.kept() == 10);
  CHECK(pop.threshold == doctest::Approx(pop.mean - pop.stddev));
  // Deterministic spreads have no simulation variance: the limit is the mean.
  PruneResult avg = h_greedy_prune(n, 200, 3);
  CHECK(avg.average_stddev == 0.0);
  CHECK(avg.threshold == doctest::Approx(avg.mean));
  CHECK(avg.kept() == 1);
  CHECK(avg.keep[0] == 1);
}

TEST_CASE("pruning statistics on a skewed population") {
  // Nine nodes feeding one sink with certainty.
  NetworkBuilder b(10);
  b.set_activation_all(1.0).set_budget(2);
  for (NodeId v = 0; v < 9; ++v) b.add_edge(v, 9, fixed_distribution(1.0));
  DicNetwork n = b.build();
  PruneResult prune = h_greedy_prune(n, 100, 3, 2);
  // Spreads 2 (x9) and 1: mean 1.9, population sd 0.3.
  CHECK(prune.mean == doctest::Approx(1.9));
  CHECK(prune.stddev == doctest::Approx(0.3));
  CHECK(prune.kept() == 9);
  CHECK(prune.keep[9] == 0);
  CHECK(prune.pruned_fraction() == doctest::Approx(0.1));
}

TEST_CASE("static greedy picks the hub first") {
  DicNetwork n = star(5, 0.9, 0.5, 3);
  std::uint64_t evals = 0;
  auto seeds = static_greedy_select(n, 3, 2000, 1, true, &evals);
  REQUIRE(seeds.size() == 3);
  CHECK(seeds[0] == 0);
  CHECK(evals >= 6);
  CHECK(std::set<NodeId>(seeds.begin(), seeds.end()).size() == 3);
}

TEST_CASE("greedy on g1 mean field") {
  DicNetwork g = fixtures::g1();
  auto seeds = static_greedy_select(g, 3, 20000, 4);
  REQUIRE(seeds.size() == 3);
  CHECK(seeds[0] == 0);
}

TEST_CASE("a symmetric ring prunes nothing") {
  DicNetwork ring = ring12();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PruneResult prune = h_greedy_prune(ring, 1000, seed);
    CHECK(prune.pruned_fraction() == 0.0);
    CHECK(prune.stddev > 0.0);
  }
}

TEST_CASE("the best node always survives pruning") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    DicNetwork n = random_network(10, 0.25, 3, 2, rng);
    PruneResult prune = h_greedy_prune(n, 100, rng());
    const auto best = std::max_element(prune.estimates.begin(), prune.estimates.end()) - prune.estimates.begin();
    CHECK(prune.keep[best] == 1);
    CHECK(prune.kept() >= 1);
  }
}
