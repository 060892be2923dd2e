#pragma once

// Dynamic Independent Cascade network model: nodes carry a seeding success
// probability, edges carry a finite-support distribution over propagation
// probabilities.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dic {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr double kProbabilityTolerance = 1e-9;

struct Atom {
  double value = 0.0;  // propagation probability
  double mass = 0.0;   // probability of drawing `value`

  bool operator==(const Atom&) const = default;
};

/// Finite-support law of an edge's propagation probability.
///
/// The constructor does not validate; use violation() or the factory
/// functions below, which throw std::invalid_argument on bad input.
class PropagationDistribution {
 public:
  PropagationDistribution() = default;
  explicit PropagationDistribution(std::vector<Atom> atoms);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double value(std::size_t i) const { return atoms_[i].value; }
  double mass(std::size_t i) const { return atoms_[i].mass; }

  /// Inverse-CDF lookup of an atom index for u in [0, 1).
  std::size_t sample_index(double u) const;

  /// First violated invariant, if any.
  std::optional<std::string> violation() const;

  bool operator==(const PropagationDistribution& other) const { return atoms_ == other.atoms_; }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

PropagationDistribution fixed_distribution(double p);
PropagationDistribution uniform_discrete_distribution(std::vector<double> values);
PropagationDistribution discrete_distribution(std::vector<Atom> atoms);

/// Equal-mass quantile bins of Exp(mean) clipped to [0, 1]. Each atom sits at
/// the conditional mean of its bin; bins lying wholly in the clipped mass at 1
/// collapse into a single atom at 1.
PropagationDistribution quantize_exponential(double mean, int bins);

double mean_propagation(const PropagationDistribution& d);

/// Directed DIC network in compressed sparse row form. Edge ids are the CSR
/// positions: edges are grouped by source, insertion order within a source.
class DicNetwork {
 public:
  DicNetwork() = default;

  std::size_t node_count() const { return activation_.size(); }
  std::size_t edge_count() const { return targets_.size(); }
  int budget() const { return budget_; }

  double activation(NodeId v) const { return activation_[v]; }
  std::span<const double> activations() const { return activation_; }

  /// Half-open edge id range of v's out-edges.
  std::pair<EdgeId, EdgeId> out_edges(NodeId v) const { return {offsets_[v], offsets_[v + 1]}; }
  NodeId source(EdgeId e) const { return sources_[e]; }
  NodeId target(EdgeId e) const { return targets_[e]; }
  const PropagationDistribution& distribution(EdgeId e) const { return distributions_[dist_index_[e]]; }
  /// Single-atom edges never need a draw to be sampled.
  bool deterministic_value(EdgeId e) const { return distribution(e).size() == 1; }

  DicNetwork with_budget(int budget) const;
  /// Every edge distribution collapsed onto its mean.
  DicNetwork mean_field() const;

  bool operator==(const DicNetwork& other) const;

 private:
  friend class NetworkBuilder;

  std::vector<EdgeId> offsets_{0};
  std::vector<NodeId> sources_;
  std::vector<NodeId> targets_;
  std::vector<std::uint32_t> dist_index_;
  std::vector<PropagationDistribution> distributions_;
  std::vector<double> activation_;
  int budget_ = 0;
};

/// Accumulates nodes and edges; build() does not validate (validate_network does).
class NetworkBuilder {
 public:
  explicit NetworkBuilder(std::size_t node_count);

  NetworkBuilder& set_budget(int budget);
  NetworkBuilder& set_activation(NodeId v, double p);
  NetworkBuilder& set_activation_all(double p);
  NetworkBuilder& add_edge(NodeId src, NodeId dst, PropagationDistribution dist);

  std::size_t node_count() const { return activation_.size(); }
  DicNetwork build() const;

 private:
  struct PendingEdge {
    NodeId src;
    NodeId dst;
    PropagationDistribution dist;
  };
  std::vector<double> activation_;
  std::vector<PendingEdge> edges_;
  int budget_ = 1;
};

/// Returns the first violated invariant (self-loop, duplicate edge, bad
/// distribution, activation outside [0,1], budget outside [1,N]) or nullopt.
std::optional<std::string> validate_network(const DicNetwork& net);

/// Throws std::invalid_argument carrying the violation.
void require_valid(const DicNetwork& net);

namespace fixtures {

/// Six-node chain v1->v2->v3->v4->v5->v6 (0-based ids), activation 0.5,
/// every edge {0.4 w.p. 0.8, 0.8 w.p. 0.2}, budget 3.
DicNetwork g1();

/// u(0) -> v(1), activation 1, edge {0.4 w.p. 0.8, 0.8 w.p. 0.2}, budget 1.
DicNetwork two_node();

}  // namespace fixtures

}  // namespace dic
