#pragma once

// Exact computations for tiny instances: the auxiliary graph, exhaustive
// realization enumeration, exact policy values and optimal adaptive values.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dic/diffusion.hpp"
#include "dic/model.hpp"
#include "dic/realization.hpp"
#include "dic/strategies.hpp"

namespace dic {

/// Raised when an instance exceeds the enumeration guard.
class OracleGuardError : public std::runtime_error {
 public:
  OracleGuardError(const std::string& what, double count) : std::runtime_error(what), count_(count) {}
  double count() const { return count_; }

 private:
  double count_;
};

inline constexpr double kEnumerationGuard = 16777216.0;  // 2^24

/// Expanded graph: core nodes 0..N-1, then attempt node N + v*B + j for the
/// j-th seeding of v. Each attempt node has one edge into its core node; each
/// original edge becomes one parallel value edge per atom of its support.
struct AuxiliaryGraph {
  struct AttemptEdge {
    std::size_t from;  // attempt node id
    NodeId to;         // core node
    int attempt;
  };
  struct ValueEdge {
    EdgeId edge;
    NodeId src;
    NodeId dst;
    std::size_t atom;
    double value;
    double mass;
  };

  std::size_t core_nodes = 0;
  std::size_t attempt_nodes = 0;
  std::vector<AttemptEdge> attempt_edges;
  std::vector<ValueEdge> value_edges;

  std::size_t node_count() const { return core_nodes + attempt_nodes; }
};

AuxiliaryGraph build_auxiliary(const DicNetwork& net, int budget);

/// prod_v 2^B * prod_e 2|D_e|, as a double so that huge instances do not wrap.
double realization_count(const DicNetwork& net);

/// Throws OracleGuardError when realization_count exceeds kEnumerationGuard.
void require_enumerable(const DicNetwork& net);

using RealizationVisitor = std::function<void(const FullRealization& x, double probability)>;

/// Visits every full realization once, in a fixed order, with its exact
/// probability (zero-probability realizations included).
void enumerate_realizations(const DicNetwork& net, const RealizationVisitor& visit);

/// Visits the realizations compatible with y with their probability
/// conditioned on y. Only unobserved coordinates are enumerated.
void enumerate_compatible(const DicNetwork& net, const PartialRealization& y, const RealizationVisitor& visit);

enum class ValueRoute { enumeration, decision_tree };

/// Expected final spread of a deterministic policy. The enumeration route
/// runs the policy on every realization; the decision-tree route branches on
/// observed outcomes only, cloning the policy at each branch.
double exact_policy_value(const DicNetwork& net, const Policy& policy, ValueRoute route = ValueRoute::enumeration);

/// Expected final spread of the best strategy of the given pattern, by
/// backward induction over observations.
double optimal_adaptive_value(const DicNetwork& net, const SeedingPattern& pattern);

/// Explicit patterns with a_1 >= 1, sum <= budget, length <= node_count and a
/// nonzero last entry (trailing zeros change nothing).
std::vector<SeedingPattern> enumerate_patterns(int budget, int node_count);

/// Exact expected number of nodes activated by seeding v now and waiting for
/// quiescence, given the current state. Without quiescence, the baseline is the
/// expected spread of letting the current cascade finish.
double exact_marginal_gain(const DicNetwork& net, const DiffusionState& state, NodeId v);

/// Greedy on exact marginal gains. Adaptive (A*) waits for quiescence between
/// seeds; otherwise it seeds one node per round until the budget is spent.
class ExactGreedyPolicy final : public Policy {
 public:
  explicit ExactGreedyPolicy(bool adaptive = true);

  std::optional<SeedCommand> next(const PolicyView& view) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<ExactGreedyPolicy>(*this); }

 private:
  bool adaptive_;
  // Gains depend only on the observation, so clones share one cache.
  std::shared_ptr<std::map<std::string, double>> cache_;
};

struct PropertyReport {
  int trials = 0;
  int monotonicity_violations = 0;
  int submodularity_violations = 0;
};

/// Samples (x, V1 subset of V2, v' not in V2) and checks monotonicity and
/// submodularity of spread_count.
PropertyReport check_properties(const DicNetwork& net, int trials, std::uint64_t seed);

/// check_properties over `trials` fresh random instances with `nodes` nodes.
PropertyReport check_properties_random(std::size_t nodes, int trials, std::uint64_t seed);

/// Random instance for property sweeps: each ordered pair gets an edge with
/// probability `density`, supports of 1..max_support atoms, random activations.
DicNetwork random_network(std::size_t nodes, double density, int max_support, int budget, Rng& rng);

struct Theorem1Row {
  std::string pattern;
  double value = 0.0;
};

struct Theorem1Report {
  double adaptive_star = 0.0;
  std::vector<Theorem1Row> patterns;
  bool holds = true;        // A* >= every pattern (within 1e-12)
  bool strict_any = false;  // A* beats some explicit pattern by > 1e-9
  bool strict_all = false;  // A* beats the best explicit pattern by > 1e-9
};

Theorem1Report check_theorem1(const DicNetwork& net);

struct Theorem2Report {
  double greedy = 0.0;
  double optimum = 0.0;
  double ratio = 0.0;
  double margin = 0.0;  // greedy - (1 - 1/e) * optimum
  bool holds = false;
};

Theorem2Report check_theorem2(const DicNetwork& net);

}  // namespace dic
