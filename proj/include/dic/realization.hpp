#pragma once

// Full and partial realizations: every random outcome of a DIC process, and
// the observable prefix of it.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dic/model.hpp"
#include "dic/random.hpp"

namespace dic {

struct EdgeDraw {
  std::uint16_t atom = 0;  // index into the edge's support
  bool live = false;       // outcome of the single activation attempt

  bool operator==(const EdgeDraw&) const = default;
};

/// One complete resolution of the randomness. The j-th seeding of node v
/// reads seed_outcomes[v * budget + j].
struct FullRealization {
  int budget = 0;
  std::vector<std::uint8_t> seed_outcomes;
  std::vector<EdgeDraw> edge_draws;

  bool seed_success(NodeId v, int attempt) const {
    return seed_outcomes[static_cast<std::size_t>(v) * budget + attempt] != 0;
  }
  void set_seed_success(NodeId v, int attempt, bool ok) {
    seed_outcomes[static_cast<std::size_t>(v) * budget + attempt] = ok ? 1 : 0;
  }

  bool operator==(const FullRealization&) const = default;
};

struct SeedObservation {
  NodeId node = 0;
  int attempt = 0;
  bool success = false;

  bool operator==(const SeedObservation&) const = default;
};

/// What a policy may know: observations only, never latent coordinates.
struct PartialRealization {
  std::vector<std::uint8_t> active;
  std::vector<std::uint16_t> attempts_used;
  std::vector<SeedObservation> seed_log;
  std::vector<std::optional<std::uint16_t>> revealed_draw;
  std::vector<std::optional<bool>> resolved_attempt;
  int round = 0;
  std::size_t active_count = 0;

  bool is_active(NodeId v) const { return active[v] != 0; }
  std::optional<bool> seed_outcome(NodeId v, int attempt) const;

  bool operator==(const PartialRealization&) const = default;
};

/// log Prob[x]; -infinity for realizations of probability zero.
struct RealizationProbability {
  double log_probability = 0.0;
  double probability() const;
};

FullRealization sample_full(const DicNetwork& net, Rng& rng);

/// Throws std::invalid_argument when a draw index is outside its support or
/// the shapes do not match the network.
RealizationProbability probability_of(const DicNetwork& net, const FullRealization& x);

PartialRealization empty_partial(const DicNetwork& net);

bool is_compatible(const FullRealization& x, const PartialRealization& y);

/// Draws x from the prior restricted to realizations compatible with y.
FullRealization condition_sample(const DicNetwork& net, const PartialRealization& y, Rng& rng);

/// Internal consistency of an observation (resolved implies revealed, draws
/// revealed exactly for active sources, attempt counts within budget).
std::optional<std::string> check_consistency(const DicNetwork& net, const PartialRealization& y);

/// No active node has an unresolved out-edge to an inactive node.
bool is_quiescent(const DicNetwork& net, const PartialRealization& y);

/// Executed seeds with multiplicity, in node order.
std::vector<NodeId> seed_multiset(const PartialRealization& y);

}  // namespace dic
