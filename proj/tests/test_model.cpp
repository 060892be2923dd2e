#include <cmath>
#include <stdexcept>

#include "dic/model.hpp"
#include "doctest.h"

using namespace dic;

TEST_CASE("distribution validation") {
  CHECK_FALSE(PropagationDistribution({{0.4, 0.8}, {0.8, 0.2}}).violation());
  auto bad = PropagationDistribution({{0.4, 0.8}, {0.8, 0.3}}).violation();
  REQUIRE(bad);
  CHECK(bad->find("mass sum 1.1") != std::string::npos);
  CHECK(PropagationDistribution({{1.2, 1.0}}).violation());
  CHECK(PropagationDistribution({{-0.1, 1.0}}).violation());
  CHECK(PropagationDistribution({{0.2, -0.5}, {0.3, 1.5}}).violation());
  CHECK(PropagationDistribution(std::vector<Atom>{}).violation());
  CHECK_THROWS_AS(discrete_distribution({{0.4, 0.5}}), std::invalid_argument);
  CHECK_NOTHROW(discrete_distribution({{0.4, 0.5 + 1e-12}, {0.1, 0.5}}));
}

TEST_CASE("uniform discrete and fixed laws") {
  auto d = uniform_discrete_distribution({0.1, 0.01, 0.001});
  REQUIRE(d.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(d.mass(i) == doctest::Approx(1.0 / 3));
  CHECK(mean_propagation(d) == doctest::Approx(0.037));
  CHECK(fixed_distribution(0.01).size() == 1);
  CHECK(mean_propagation(fixed_distribution(0.01)) == 0.01);
}

TEST_CASE("sample_index is the inverse cdf") {
  auto d = discrete_distribution({{0.4, 0.8}, {0.8, 0.2}});
  CHECK(d.sample_index(0.0) == 0);
  CHECK(d.sample_index(0.79) == 0);
  CHECK(d.sample_index(0.81) == 1);
  CHECK(d.sample_index(0.999999) == 1);
}

TEST_CASE("quantized exponential atoms") {
  // Reference atoms from closed-form conditional means of Exp(1/0.01) per quantile bin.
  auto two = quantize_exponential(0.01, 2);
  REQUIRE(two.size() == 2);
  CHECK(std::abs(two.value(0) - 0.0030685281944005) < 1e-9);
  CHECK(std::abs(two.value(1) - 0.0169314718055995) < 1e-9);
  CHECK(two.mass(0) == doctest::Approx(0.5));

  auto four = quantize_exponential(0.01, 4);
  REQUIRE(four.size() == 4);
  const double expect[] = {0.0013695378265862, 0.0047675185617178, 0.01, 0.0238629436108324};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(four.value(i) - expect[i]) < 1e-9);
}

TEST_CASE("quantized mean matches the clipped exponential mean") {
  for (double mean : {0.01, 0.1, 0.5, 2.0}) {
    const double clipped = mean * (1.0 - std::exp(-1.0 / mean));
    for (int k : {1, 2, 4, 8, 16}) {
      auto d = quantize_exponential(mean, k);
      CHECK_FALSE(d.violation());
      CHECK(std::abs(mean_propagation(d) - clipped) < 1e-12);
      CHECK(static_cast<int>(d.size()) <= k);
    }
  }
  CHECK_THROWS(quantize_exponential(0.0, 4));
  CHECK_THROWS(quantize_exponential(0.1, 0));
}

TEST_CASE("g1 fixture layout") {
  DicNetwork g = fixtures::g1();
  CHECK(g.node_count() == 6);
  CHECK(g.edge_count() == 5);
  CHECK(g.budget() == 3);
  for (EdgeId e = 0; e < 5; ++e) {
    CHECK(g.source(e) == e);
    CHECK(g.target(e) == e + 1);
    CHECK(g.distribution(e) == discrete_distribution({{0.4, 0.8}, {0.8, 0.2}}));
  }
  for (NodeId v = 0; v < 6; ++v) CHECK(g.activation(v) == 0.5);
  CHECK_FALSE(validate_network(g));
}

TEST_CASE("network validation") {
  CHECK(validate_network(NetworkBuilder(2).add_edge(0, 0, fixed_distribution(0.1)).build()));
  CHECK(validate_network(
      NetworkBuilder(2).add_edge(0, 1, fixed_distribution(0.1)).add_edge(0, 1, fixed_distribution(0.2)).build()));
  CHECK(validate_network(NetworkBuilder(2).set_activation(0, 1.5).build()));
  CHECK(validate_network(NetworkBuilder(2).set_budget(3).build()));
  CHECK(validate_network(NetworkBuilder(2).set_budget(0).build()));
  CHECK_THROWS_AS(require_valid(NetworkBuilder(2).set_budget(3).build()), std::invalid_argument);
}

TEST_CASE("csr groups edges by source") {
  DicNetwork n = NetworkBuilder(3)
                     .add_edge(2, 0, fixed_distribution(0.3))
                     .add_edge(0, 2, fixed_distribution(0.1))
                     .add_edge(0, 1, fixed_distribution(0.2))
                     .build();
  auto [b, e] = n.out_edges(0);
  CHECK(e - b == 2);
  CHECK(n.target(b) == 2);
  CHECK(n.target(b + 1) == 1);
  CHECK(n.out_edges(1).first == n.out_edges(1).second);
  CHECK(n.source(2) == 2);
}

TEST_CASE("mean field and budget copies") {
  DicNetwork g = fixtures::g1();
  DicNetwork m = g.mean_field();
  for (EdgeId e = 0; e < 5; ++e) {
    REQUIRE(m.distribution(e).size() == 1);
    CHECK(m.distribution(e).value(0) == doctest::Approx(0.48));
  }
  CHECK(g.with_budget(5).budget() == 5);
  CHECK(g.with_budget(3) == g);
}
