#include "dic/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dic {

AuxiliaryGraph build_auxiliary(const DicNetwork& net, int budget) {
  if (budget < 1) throw std::invalid_argument("auxiliary graph needs budget >= 1");
  AuxiliaryGraph g;
  const std::size_t n = net.node_count();
  g.core_nodes = n;
  g.attempt_nodes = n * static_cast<std::size_t>(budget);
  for (NodeId v = 0; v < n; ++v) {
    for (int j = 0; j < budget; ++j) g.attempt_edges.push_back({n + v * static_cast<std::size_t>(budget) + j, v, j});
  }
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const auto& d = net.distribution(e);
    for (std::size_t k = 0; k < d.size(); ++k) {
      g.value_edges.push_back({e, net.source(e), net.target(e), k, d.value(k), d.mass(k)});
    }
  }
  return g;
}

double realization_count(const DicNetwork& net) {
  double log2_count = static_cast<double>(net.node_count()) * net.budget();
  for (EdgeId e = 0; e < net.edge_count(); ++e) log2_count += std::log2(2.0 * net.distribution(e).size());
  return std::exp2(log2_count);
}

void require_enumerable(const DicNetwork& net) {
  const double count = realization_count(net);
  if (count > kEnumerationGuard * (1 + 1e-12)) {
    std::ostringstream msg;
    msg << "instance has " << count << " realizations, above the enumeration limit of " << kEnumerationGuard;
    throw OracleGuardError(msg.str(), count);
  }
}

namespace {

// One enumerated coordinate. Seed digits have two options; edge digits have
// either 2|D_e| options (draw and attempt) or 2 (attempt under a known draw).
struct Digit {
  enum Kind { seed, edge_full, edge_attempt } kind;
  std::uint32_t index;  // node for seeds, edge otherwise
  int attempt;
  std::size_t options;
};

void enumerate_digits(const DicNetwork& net, std::vector<Digit> digits, FullRealization x,
                      const RealizationVisitor& visit) {
  std::vector<std::size_t> choice(digits.size(), 0);
  auto apply = [&](std::size_t i) -> double {
    const Digit& d = digits[i];
    const std::size_t c = choice[i];
    switch (d.kind) {
      case Digit::seed: {
        const double p = net.activation(d.index);
        x.set_seed_success(d.index, d.attempt, c == 1);
        return c == 1 ? p : 1.0 - p;
      }
      case Digit::edge_full: {
        const auto& dist = net.distribution(d.index);
        const std::size_t atom = c / 2;
        const bool live = c % 2 == 1;
        x.edge_draws[d.index] = {static_cast<std::uint16_t>(atom), live};
        return dist.mass(atom) * (live ? dist.value(atom) : 1.0 - dist.value(atom));
      }
      case Digit::edge_attempt: {
        const double value = net.distribution(d.index).value(x.edge_draws[d.index].atom);
        x.edge_draws[d.index].live = c == 1;
        return c == 1 ? value : 1.0 - value;
      }
    }
    return 0.0;
  };
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < digits.size(); ++i) p *= apply(i);
    visit(x, p);
    std::size_t i = 0;
    while (i < digits.size() && ++choice[i] == digits[i].options) choice[i++] = 0;
    if (i == digits.size()) return;
  }
}

FullRealization blank_realization(const DicNetwork& net) {
  FullRealization x;
  x.budget = net.budget();
  x.seed_outcomes.assign(net.node_count() * static_cast<std::size_t>(net.budget()), 0);
  x.edge_draws.assign(net.edge_count(), EdgeDraw{});
  return x;
}

}  // namespace

void enumerate_realizations(const DicNetwork& net, const RealizationVisitor& visit) {
  require_enumerable(net);
  std::vector<Digit> digits;
  for (NodeId v = 0; v < net.node_count(); ++v) {
    for (int j = 0; j < net.budget(); ++j) digits.push_back({Digit::seed, v, j, 2});
  }
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    digits.push_back({Digit::edge_full, e, 0, 2 * net.distribution(e).size()});
  }
  enumerate_digits(net, std::move(digits), blank_realization(net), visit);
}

void enumerate_compatible(const DicNetwork& net, const PartialRealization& y, const RealizationVisitor& visit) {
  require_enumerable(net);
  FullRealization x = blank_realization(net);
  std::vector<Digit> digits;
  for (NodeId v = 0; v < net.node_count(); ++v) {
    for (int j = 0; j < net.budget(); ++j) {
      if (const auto seen = y.seed_outcome(v, j)) {
        x.set_seed_success(v, j, *seen);
      } else {
        digits.push_back({Digit::seed, v, j, 2});
      }
    }
  }
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    if (y.resolved_attempt[e]) {
      x.edge_draws[e] = {*y.revealed_draw[e], *y.resolved_attempt[e]};
    } else if (y.revealed_draw[e]) {
      x.edge_draws[e].atom = *y.revealed_draw[e];
      digits.push_back({Digit::edge_attempt, e, 0, 2});
    } else {
      digits.push_back({Digit::edge_full, e, 0, 2 * net.distribution(e).size()});
    }
  }
  enumerate_digits(net, std::move(digits), std::move(x), visit);
}

namespace {

bool eligible(const DicNetwork& net, const DiffusionState& s, NodeId v) {
  return !s.observed.is_active(v) && s.observed.attempts_used[v] < net.budget();
}

// Calls cont(next_state, probability) for every outcome of executing cmd from
// s. Branches on the consumed seed bits, the attempts of frontier edges, and
// the draws revealed by newly active nodes. Without all_draws, draws on edges
// into active nodes are left at atom 0: they can no longer influence anything.
template <class Cont>
void branch_round(const DicNetwork& net, const DiffusionState& s, const SeedCommand& cmd, bool all_draws,
                  Cont&& cont) {
  const PartialRealization& y = s.observed;
  FullRealization x = blank_realization(net);
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    if (y.revealed_draw[e]) x.edge_draws[e].atom = *y.revealed_draw[e];
  }
  std::vector<EdgeId> tried;
  for (NodeId u : s.frontier) {
    auto [begin, end] = net.out_edges(u);
    for (EdgeId e = begin; e < end; ++e) {
      if (!y.is_active(net.target(e))) tried.push_back(e);
    }
  }
  const std::size_t bits = cmd.nodes.size() + tried.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
    double p = 1.0;
    for (std::size_t i = 0; i < cmd.nodes.size(); ++i) {
      const NodeId v = cmd.nodes[i];
      const bool ok = (mask >> i) & 1;
      x.set_seed_success(v, y.attempts_used[v], ok);
      p *= ok ? net.activation(v) : 1.0 - net.activation(v);
    }
    for (std::size_t i = 0; i < tried.size(); ++i) {
      const EdgeId e = tried[i];
      const bool live = (mask >> (cmd.nodes.size() + i)) & 1;
      const double value = net.distribution(e).value(x.edge_draws[e].atom);
      x.edge_draws[e].live = live;
      p *= live ? value : 1.0 - value;
    }
    if (p == 0.0) continue;
    DiffusionState next = step_round(net, x, s, cmd);
    std::vector<EdgeId> fresh;
    for (NodeId v : next.frontier) {
      auto [begin, end] = net.out_edges(v);
      for (EdgeId e = begin; e < end; ++e) {
        if (net.distribution(e).size() > 1 && (all_draws || !next.observed.is_active(net.target(e)))) {
          fresh.push_back(e);
        }
      }
    }
    std::vector<std::size_t> atom(fresh.size(), 0);
    while (true) {
      double q = p;
      for (std::size_t i = 0; i < fresh.size(); ++i) {
        next.observed.revealed_draw[fresh[i]] = static_cast<std::uint16_t>(atom[i]);
        q *= net.distribution(fresh[i]).mass(atom[i]);
      }
      if (q > 0.0) cont(next, q);
      std::size_t i = 0;
      while (i < fresh.size() && ++atom[i] == net.distribution(fresh[i]).size()) atom[i++] = 0;
      if (i == fresh.size()) break;
    }
  }
}

// Everything the future of a run depends on: who is active, who propagates
// next round and with which draws, and how many attempts each node has spent.
std::string state_key(const DicNetwork& net, const DiffusionState& s, int extra) {
  const PartialRealization& y = s.observed;
  std::string key;
  key.reserve(net.node_count() * 4 + 8);
  std::vector<std::uint8_t> in_frontier(net.node_count(), 0);
  for (NodeId u : s.frontier) in_frontier[u] = 1;
  for (NodeId v = 0; v < net.node_count(); ++v) {
    key.push_back(static_cast<char>(y.is_active(v) | (in_frontier[v] << 1)));
    key.push_back(static_cast<char>(y.attempts_used[v]));
  }
  for (NodeId u : s.frontier) {
    auto [begin, end] = net.out_edges(u);
    for (EdgeId e = begin; e < end; ++e) {
      if (!y.is_active(net.target(e))) key.push_back(static_cast<char>(*y.revealed_draw[e]));
    }
  }
  key.append(reinterpret_cast<const char*>(&extra), sizeof extra);
  return key;
}

double settle(const DicNetwork& net, const DiffusionState& s) {
  if (s.quiescent) return static_cast<double>(s.observed.active_count);
  double total = 0.0;
  branch_round(net, s, SeedCommand{}, false,
               [&](const DiffusionState& next, double p) { total += p * settle(net, next); });
  return total;
}

double expect_after(const DicNetwork& net, const DiffusionState& s, const SeedCommand& cmd) {
  if (cmd.empty() && s.quiescent) return static_cast<double>(s.observed.active_count);
  double total = 0.0;
  branch_round(net, s, cmd, false, [&](const DiffusionState& next, double p) { total += p * settle(net, next); });
  return total;
}

double tree_value(const DicNetwork& net, const DiffusionState& s, Policy& policy, bool stopped) {
  const int remaining = net.budget() - s.budget_used;
  std::optional<SeedCommand> cmd;
  if (!stopped && remaining > 0) cmd = policy.next(PolicyView{net, s.observed, remaining, s.quiescent});
  if (!cmd) {
    stopped = true;
    if (s.quiescent) return static_cast<double>(s.observed.active_count);
    cmd.emplace();
  }
  double total = 0.0;
  branch_round(net, s, *cmd, true, [&](const DiffusionState& next, double p) {
    auto branch = policy.clone();
    total += p * tree_value(net, next, *branch, stopped);
  });
  return total;
}

class OptimalSolver {
 public:
  OptimalSolver(const DicNetwork& net, const SeedingPattern& pattern) : net_(net), pattern_(pattern) {}

  double value(const DiffusionState& s, int step) {
    const std::string key = state_key(net_, s, step);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const double v = solve(s, step);
    memo_.emplace(key, v);
    return v;
  }

 private:
  double expect(const DiffusionState& s, const SeedCommand& cmd, int step) {
    double total = 0.0;
    branch_round(net_, s, cmd, false, [&](const DiffusionState& next, double p) { total += p * value(next, step); });
    return total;
  }

  double stop_or_wait(const DiffusionState& s, int step) {
    return s.quiescent ? static_cast<double>(s.observed.active_count) : expect(s, SeedCommand{}, step);
  }

  double solve(const DiffusionState& s, int step) {
    const int remaining = net_.budget() - s.budget_used;
    if (remaining == 0) return stop_or_wait(s, step);
    std::vector<NodeId> candidates;
    for (NodeId v = 0; v < net_.node_count(); ++v) {
      if (eligible(net_, s, v)) candidates.push_back(v);
    }
    if (pattern_.adaptive) {
      if (!s.quiescent) return expect(s, SeedCommand{}, 0);
      double best = static_cast<double>(s.observed.active_count);
      for (NodeId v : candidates) best = std::max(best, expect(s, SeedCommand{{v}}, 0));
      return best;
    }
    const auto& schedule = pattern_.schedule;
    auto idx = static_cast<std::size_t>(step);
    if (s.quiescent) {
      while (idx < schedule.size() && schedule[idx] == 0) ++idx;
    }
    if (idx >= schedule.size()) return stop_or_wait(s, static_cast<int>(idx));
    const int count = std::min(schedule[idx], remaining);
    const int after = static_cast<int>(idx + 1);
    if (count == 0) return expect(s, SeedCommand{}, after);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(count), candidates.size());
    if (k == 0) return stop_or_wait(s, after);
    // Seeding more never lowers the spread, so only maximal subsets compete.
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::uint8_t> pick(candidates.size(), 0);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), 1);
    do {
      SeedCommand cmd;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (pick[i]) cmd.nodes.push_back(candidates[i]);
      }
      best = std::max(best, expect(s, cmd, after));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return best;
  }

  const DicNetwork& net_;
  const SeedingPattern& pattern_;
  std::map<std::string, double> memo_;
};

// Rebuilds the simulator state from what a policy can see. Active nodes with
// an unresolved edge to an inactive node are exactly the ones that propagate
// in the next round.
DiffusionState state_from_view(const PolicyView& view) {
  DiffusionState s;
  s.observed = view.observed;
  s.budget_used = view.net.budget() - view.remaining_budget;
  s.quiescent = view.quiescent;
  for (NodeId u = 0; u < view.net.node_count(); ++u) {
    if (!view.observed.is_active(u)) continue;
    auto [begin, end] = view.net.out_edges(u);
    for (EdgeId e = begin; e < end; ++e) {
      if (!view.observed.is_active(view.net.target(e)) && !view.observed.resolved_attempt[e]) {
        s.frontier.push_back(u);
        break;
      }
    }
  }
  return s;
}

}  // namespace

double exact_policy_value(const DicNetwork& net, const Policy& policy, ValueRoute route) {
  require_enumerable(net);
  if (route == ValueRoute::decision_tree) {
    auto p = policy.clone();
    return tree_value(net, start(net), *p, false);
  }
  double total = 0.0;
  enumerate_realizations(net, [&](const FullRealization& x, double prob) {
    if (prob == 0.0) return;
    auto p = policy.clone();
    total += prob * run_policy(net, *p, x, false).spread;
  });
  return total;
}

double optimal_adaptive_value(const DicNetwork& net, const SeedingPattern& pattern) {
  require_enumerable(net);
  if (const auto bad = pattern.violation(net.budget())) throw std::invalid_argument("pattern: " + *bad);
  OptimalSolver solver(net, pattern);
  return solver.value(start(net), 0);
}

std::vector<SeedingPattern> enumerate_patterns(int budget, int node_count) {
  std::vector<SeedingPattern> out;
  std::vector<int> current;
  std::function<void(int)> extend = [&](int left) {
    if (!current.empty() && current.back() > 0) out.push_back({current, false});
    if (static_cast<int>(current.size()) == node_count) return;
    for (int a = current.empty() ? 1 : 0; a <= left; ++a) {
      current.push_back(a);
      extend(left - a);
      current.pop_back();
    }
  };
  extend(budget);
  return out;
}

double exact_marginal_gain(const DicNetwork& net, const DiffusionState& state, NodeId v) {
  const double base = state.quiescent ? static_cast<double>(state.observed.active_count)
                                      : expect_after(net, state, SeedCommand{});
  return expect_after(net, state, SeedCommand{{v}}) - base;
}

ExactGreedyPolicy::ExactGreedyPolicy(bool adaptive)
    : adaptive_(adaptive), cache_(std::make_shared<std::map<std::string, double>>()) {}

std::optional<SeedCommand> ExactGreedyPolicy::next(const PolicyView& view) {
  if (adaptive_ && !view.quiescent) return SeedCommand{};
  const DiffusionState s = state_from_view(view);
  std::optional<NodeId> best;
  double best_gain = 0.0;
  for (NodeId v = 0; v < view.net.node_count(); ++v) {
    if (!is_eligible(view, v)) continue;
    const std::string key = state_key(view.net, s, static_cast<int>(v));
    auto it = cache_->find(key);
    if (it == cache_->end()) it = cache_->emplace(key, exact_marginal_gain(view.net, s, v)).first;
    if (!best || it->second > best_gain + 1e-12) {
      best = v;
      best_gain = it->second;
    }
  }
  if (!best) return view.quiescent ? std::nullopt : std::optional<SeedCommand>(SeedCommand{});
  return SeedCommand{{*best}};
}

PropertyReport check_properties(const DicNetwork& net, int trials, std::uint64_t seed) {
  PropertyReport report;
  const std::size_t n = net.node_count();
  const int budget = net.budget();
  if (budget < 1 || n == 0) return report;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const FullRealization x = sample_full(net, rng);
    std::uniform_int_distribution<int> size_pick(0, budget - 1);
    std::uniform_int_distribution<NodeId> node_pick(0, static_cast<NodeId>(n - 1));
    std::vector<int> mult(n, 0);
    std::vector<NodeId> v2;
    const int size2 = size_pick(rng);
    while (static_cast<int>(v2.size()) < size2) {
      const NodeId v = node_pick(rng);
      if (mult[v] < budget) {
        ++mult[v];
        v2.push_back(v);
      }
    }
    std::vector<NodeId> v1;
    for (NodeId v : v2) {
      if (bernoulli(rng, 0.5)) v1.push_back(v);
    }
    std::vector<NodeId> outside;
    for (NodeId v = 0; v < n; ++v) {
      if (mult[v] == 0) outside.push_back(v);
    }
    if (outside.empty()) continue;
    const NodeId extra = outside[std::uniform_int_distribution<std::size_t>(0, outside.size() - 1)(rng)];
    const int f1 = spread_count(net, x, v1);
    const int f2 = spread_count(net, x, v2);
    v1.push_back(extra);
    v2.push_back(extra);
    const int g1 = spread_count(net, x, v1) - f1;
    const int g2 = spread_count(net, x, v2) - f2;
    ++report.trials;
    if (f1 > f2) ++report.monotonicity_violations;
    if (g2 > g1) ++report.submodularity_violations;
  }
  return report;
}

PropertyReport check_properties_random(std::size_t nodes, int trials, std::uint64_t seed) {
  PropertyReport total;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t), StreamTag::property_trials));
    const int budget = std::uniform_int_distribution<int>(2, 4)(rng);
    const double density = 0.15 + 0.35 * unit_uniform(rng);
    const DicNetwork net = random_network(nodes, density, 3, budget, rng);
    const PropertyReport one = check_properties(net, 1, rng());
    total.trials += one.trials;
    total.monotonicity_violations += one.monotonicity_violations;
    total.submodularity_violations += one.submodularity_violations;
  }
  return total;
}

DicNetwork random_network(std::size_t nodes, double density, int max_support, int budget, Rng& rng) {
  NetworkBuilder builder(nodes);
  builder.set_budget(budget);
  for (NodeId v = 0; v < nodes; ++v) builder.set_activation(v, unit_uniform(rng));
  std::uniform_int_distribution<int> support_pick(1, std::max(1, max_support));
  for (NodeId u = 0; u < nodes; ++u) {
    for (NodeId w = 0; w < nodes; ++w) {
      if (u == w || !bernoulli(rng, density)) continue;
      const int k = support_pick(rng);
      std::vector<double> values(static_cast<std::size_t>(k));
      for (double& value : values) value = unit_uniform(rng);
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      std::vector<Atom> atoms;
      double left = 1.0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double mass = i + 1 == values.size() ? left : left * (0.2 + 0.6 * unit_uniform(rng));
        atoms.push_back({values[i], mass});
        left -= mass;
      }
      builder.add_edge(u, w, discrete_distribution(std::move(atoms)));
    }
  }
  return builder.build();
}

Theorem1Report check_theorem1(const DicNetwork& net) {
  Theorem1Report report;
  report.adaptive_star = optimal_adaptive_value(net, SeedingPattern::adaptive_star());
  double best = -std::numeric_limits<double>::infinity();
  for (const SeedingPattern& pattern : enumerate_patterns(net.budget(), static_cast<int>(net.node_count()))) {
    const double v = optimal_adaptive_value(net, pattern);
    report.patterns.push_back({pattern.to_string(), v});
    best = std::max(best, v);
    if (v > report.adaptive_star + 1e-12) report.holds = false;
    if (report.adaptive_star > v + 1e-9) report.strict_any = true;
  }
  report.strict_all = report.adaptive_star > best + 1e-9;
  return report;
}

Theorem2Report check_theorem2(const DicNetwork& net) {
  Theorem2Report report;
  report.greedy = exact_policy_value(net, ExactGreedyPolicy(true), ValueRoute::decision_tree);
  report.optimum = optimal_adaptive_value(net, SeedingPattern::adaptive_star());
  const double bound = 1.0 - 1.0 / std::numbers::e;
  report.ratio = report.optimum > 0.0 ? report.greedy / report.optimum : 1.0;
  report.margin = report.greedy - bound * report.optimum;
  report.holds = report.margin >= -1e-12;
  return report;
}

}  // namespace dic
