#pragma once

// Round-by-round DIC diffusion against a (hidden) full realization, and the
// policy contract that drives it.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dic/model.hpp"
#include "dic/realization.hpp"

namespace dic {

class DiffusionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct SeedCommand {
  std::vector<NodeId> nodes;

  bool empty() const { return nodes.empty(); }
};

struct DiffusionState {
  PartialRealization observed;
  std::vector<NodeId> frontier;  // activated in the most recent round
  int budget_used = 0;
  bool quiescent = true;
};

struct RoundReport {
  int round = 0;
  std::vector<NodeId> seeded;
  std::vector<std::uint8_t> seed_success;  // parallel to `seeded`
  std::vector<NodeId> newly_active;

  bool operator==(const RoundReport&) const = default;
};

DiffusionState start(const DicNetwork& net);

/// Executes one round. Seeds named in `cmd` consume their next attempt bit;
/// frontier nodes try every out-edge to a node that was inactive when the
/// round began. Both kinds of activation happen simultaneously and propagate
/// in the next round.
///
/// Throws DiffusionError on a null round (empty command while quiescent), on
/// seeding an active node, on a repeated node within one command, and when the
/// budget would be exceeded.
DiffusionState step_round(const DicNetwork& net, const FullRealization& x, DiffusionState state,
                          const SeedCommand& cmd, RoundReport* report = nullptr);

DiffusionState run_to_quiescence(const DicNetwork& net, const FullRealization& x, DiffusionState state,
                                 std::vector<RoundReport>* trace = nullptr);

/// Live-edge reachability from the seeded nodes: v is a root iff one of its
/// first m_v attempt bits is set, where m_v is v's multiplicity in the plan.
int spread_count(const DicNetwork& net, const FullRealization& x, std::span<const NodeId> seed_plan);

/// Everything a policy is allowed to see.
struct PolicyView {
  const DicNetwork& net;
  const PartialRealization& observed;
  int remaining_budget;
  bool quiescent;
};

struct PolicyStats {
  std::uint64_t gain_evaluations = 0;
};

/// Decision rule mapping observations to the next seed command. Returning
/// nullopt stops seeding for the rest of the run; an empty command waits one
/// round. Implementations must be deterministic given their construction
/// arguments and the sequence of views they receive.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::optional<SeedCommand> next(const PolicyView& view) = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;
  virtual PolicyStats stats() const { return {}; }
};

/// Builds one policy instance per replication from a replication-specific seed.
using PolicyFactory = std::function<std::unique_ptr<Policy>(std::uint64_t stream_seed)>;

struct RunResult {
  int spread = 0;
  int rounds = 0;
  int seeds_used = 0;
  int selections = 0;         // policy calls that issued seeds
  double selection_ms = 0.0;  // wall time spent in those calls
  std::vector<NodeId> executed;  // seed multiset in execution order
  std::vector<RoundReport> trace;
  DiffusionState final_state;
};

RunResult run_policy(const DicNetwork& net, Policy& policy, const FullRealization& x, bool record_trace = true);

}  // namespace dic
