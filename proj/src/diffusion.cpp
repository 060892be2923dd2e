#include "dic/diffusion.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace dic {

namespace {

// Marker for nodes activated during the round being executed. Such nodes
// still count as inactive for edges tried in that same round.
constexpr std::uint8_t kActivatedThisRound = 2;

void reveal_out_edges(const DicNetwork& net, const FullRealization& x, PartialRealization& y, NodeId v) {
  auto [begin, end] = net.out_edges(v);
  for (EdgeId e = begin; e < end; ++e) y.revealed_draw[e] = x.edge_draws[e].atom;
}

}  // namespace

DiffusionState start(const DicNetwork& net) {
  DiffusionState s;
  s.observed = empty_partial(net);
  return s;
}

DiffusionState step_round(const DicNetwork& net, const FullRealization& x, DiffusionState state,
                          const SeedCommand& cmd, RoundReport* report) {
  PartialRealization& y = state.observed;
  if (cmd.empty() && state.quiescent) throw DiffusionError("null round: empty command while quiescent");
  if (state.budget_used + static_cast<int>(cmd.nodes.size()) > net.budget()) {
    throw DiffusionError("seed command exceeds the budget");
  }
  for (std::size_t i = 0; i < cmd.nodes.size(); ++i) {
    const NodeId v = cmd.nodes[i];
    std::ostringstream msg;
    if (v >= net.node_count()) {
      msg << "seed " << v << " is not a node";
      throw DiffusionError(msg.str());
    }
    if (y.is_active(v)) {
      msg << "seed " << v << " is already active";
      throw DiffusionError(msg.str());
    }
    if (std::find(cmd.nodes.begin(), cmd.nodes.begin() + i, v) != cmd.nodes.begin() + i) {
      msg << "seed " << v << " repeated within one step";
      throw DiffusionError(msg.str());
    }
  }

  std::vector<NodeId> newly;
  auto activate = [&](NodeId v) {
    if (y.active[v] == 0) {
      y.active[v] = kActivatedThisRound;
      ++y.active_count;
      newly.push_back(v);
    }
  };

  if (report) {
    report->seeded = cmd.nodes;
    report->seed_success.clear();
  }
  for (NodeId v : cmd.nodes) {
    const int attempt = y.attempts_used[v]++;
    const bool ok = x.seed_success(v, attempt);
    y.seed_log.push_back({v, attempt, ok});
    if (report) report->seed_success.push_back(ok ? 1 : 0);
    if (ok) activate(v);
  }
  for (NodeId u : state.frontier) {
    auto [begin, end] = net.out_edges(u);
    for (EdgeId e = begin; e < end; ++e) {
      const NodeId w = net.target(e);
      if (y.active[w] == 1) continue;
      const bool live = x.edge_draws[e].live;
      y.resolved_attempt[e] = live;
      if (live) activate(w);
    }
  }

  bool quiescent = true;
  for (NodeId v : newly) {
    y.active[v] = 1;
    reveal_out_edges(net, x, y, v);
  }
  for (NodeId v : newly) {
    auto [begin, end] = net.out_edges(v);
    for (EdgeId e = begin; e < end && quiescent; ++e) {
      if (!y.is_active(net.target(e))) quiescent = false;
    }
  }

  ++y.round;
  state.budget_used += static_cast<int>(cmd.nodes.size());
  state.quiescent = quiescent;
  if (report) {
    report->round = y.round;
    report->newly_active = newly;
  }
  state.frontier = std::move(newly);
  return state;
}

DiffusionState run_to_quiescence(const DicNetwork& net, const FullRealization& x, DiffusionState state,
                                 std::vector<RoundReport>* trace) {
  const SeedCommand wait;
  while (!state.quiescent) {
    RoundReport row;
    state = step_round(net, x, std::move(state), wait, trace ? &row : nullptr);
    if (trace) trace->push_back(std::move(row));
  }
  return state;
}

int spread_count(const DicNetwork& net, const FullRealization& x, std::span<const NodeId> seed_plan) {
  const std::size_t n = net.node_count();
  if (static_cast<int>(seed_plan.size()) > net.budget()) throw DiffusionError("seed plan exceeds the budget");
  std::vector<int> multiplicity(n, 0);
  for (NodeId v : seed_plan) {
    if (v >= n) throw DiffusionError("seed plan names a node outside the network");
    ++multiplicity[v];
  }
  std::vector<std::uint8_t> reached(n, 0);
  std::vector<NodeId> queue;
  for (NodeId v = 0; v < n; ++v) {
    for (int j = 0; j < multiplicity[v]; ++j) {
      if (x.seed_success(v, j)) {
        reached[v] = 1;
        queue.push_back(v);
        break;
      }
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    auto [begin, end] = net.out_edges(queue[head]);
    for (EdgeId e = begin; e < end; ++e) {
      const NodeId w = net.target(e);
      if (!reached[w] && x.edge_draws[e].live) {
        reached[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return static_cast<int>(queue.size());
}

RunResult run_policy(const DicNetwork& net, Policy& policy, const FullRealization& x, bool record_trace) {
  using Clock = std::chrono::steady_clock;
  RunResult result;
  DiffusionState state = start(net);
  bool stopped = false;
  while (true) {
    const int remaining = net.budget() - state.budget_used;
    std::optional<SeedCommand> cmd;
    if (!stopped && remaining > 0) {
      const PolicyView view{net, state.observed, remaining, state.quiescent};
      const auto t0 = Clock::now();
      cmd = policy.next(view);
      if (cmd && !cmd->empty()) {
        result.selection_ms += std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        ++result.selections;
      }
    }
    if (!cmd) {
      stopped = true;
      if (state.quiescent) break;
      cmd.emplace();
    }
    RoundReport row;
    state = step_round(net, x, std::move(state), *cmd, record_trace ? &row : nullptr);
    result.executed.insert(result.executed.end(), cmd->nodes.begin(), cmd->nodes.end());
    if (record_trace) result.trace.push_back(std::move(row));
  }
  result.spread = static_cast<int>(state.observed.active_count);
  result.rounds = state.observed.round;
  result.seeds_used = state.budget_used;
  result.final_state = std::move(state);
  return result;
}

}  // namespace dic
