#include <cmath>

#include "dic/estimator.hpp"
#include "dic/model.hpp"
#include "dic/strategies.hpp"
#include "doctest.h"

using namespace dic;

TEST_CASE("hoeffding sample size") {
  CHECK(hoeffding_samples(10, 0.5, 0.01) == 1060);
  CHECK(hoeffding_samples(1, 10, 0.5) == 1);
  const double h = hoeffding_half_width(10, 1060, 0.01);
  CHECK(h <= 0.5);
  CHECK(h == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("seed-u policy on the two-node net") {
  DicNetwork n = fixtures::two_node();
  auto factory = make_seed_list_factory({0}, SeedingPattern::single_step(1));
  Estimate e = estimate_policy_spread(n, factory, 200000, 3, {0.01, 2});
  CHECK(e.replications == 200000);
  CHECK(e.master_seed == 3);
  CHECK(std::abs(e.mean - 1.48) <= e.half_width);
  CHECK(e.half_width == doctest::Approx(hoeffding_half_width(2, 200000, 0.01)));
}

TEST_CASE("replications do not depend on the worker count") {
  DicNetwork g = fixtures::g1();
  auto factory = make_random_factory(SeedingPattern::adaptive_star());
  auto one = run_replications(g, factory, 500, 77, 1);
  for (unsigned w : {4u, 16u}) {
    auto many = run_replications(g, factory, 500, 77, w);
    REQUIRE(many.size() == one.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(many[i].spread == one[i].spread);
      CHECK(many[i].rounds == one[i].rounds);
      CHECK(many[i].seeds_used == one[i].seeds_used);
    }
  }
  auto other = run_replications(g, factory, 500, 78, 1);
  int differ = 0;
  for (std::size_t i = 0; i < one.size(); ++i) differ += other[i].spread != one[i].spread;
  CHECK(differ > 0);
}

TEST_CASE("adaptive greedy estimates reproduce across workers") {
  DicNetwork g = fixtures::g1();
  StrategyParams params;
  params.samples = 500;
  params.seed = 12;
  auto factory = make_greedy_factory(prepare_a_greedy(g, params));
  Estimate a = estimate_policy_spread(g, factory, 300, 5, {0.01, 1});
  Estimate b = estimate_policy_spread(g, factory, 300, 5, {0.01, 4});
  CHECK(a.mean == b.mean);
}
