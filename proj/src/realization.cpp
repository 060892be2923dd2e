#include "dic/realization.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dic {

std::optional<bool> PartialRealization::seed_outcome(NodeId v, int attempt) const {
  for (const SeedObservation& obs : seed_log) {
    if (obs.node == v && obs.attempt == attempt) return obs.success;
  }
  return std::nullopt;
}

double RealizationProbability::probability() const { return std::exp(log_probability); }

FullRealization sample_full(const DicNetwork& net, Rng& rng) {
  FullRealization x;
  x.budget = net.budget();
  const std::size_t n = net.node_count();
  x.seed_outcomes.resize(n * static_cast<std::size_t>(x.budget));
  for (NodeId v = 0; v < n; ++v) {
    const double p = net.activation(v);
    for (int j = 0; j < x.budget; ++j) x.set_seed_success(v, j, bernoulli(rng, p));
  }
  x.edge_draws.resize(net.edge_count());
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const auto& d = net.distribution(e);
    const std::size_t atom = d.size() == 1 ? 0 : d.sample_index(unit_uniform(rng));
    x.edge_draws[e] = {static_cast<std::uint16_t>(atom), bernoulli(rng, d.value(atom))};
  }
  return x;
}

namespace {

double log_of(double p) { return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity(); }

}  // namespace

RealizationProbability probability_of(const DicNetwork& net, const FullRealization& x) {
  const std::size_t n = net.node_count();
  if (x.budget != net.budget() || x.seed_outcomes.size() != n * static_cast<std::size_t>(x.budget) ||
      x.edge_draws.size() != net.edge_count()) {
    throw std::invalid_argument("realization shape does not match network");
  }
  double lp = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    const double p = net.activation(v);
    for (int j = 0; j < x.budget; ++j) lp += log_of(x.seed_success(v, j) ? p : 1.0 - p);
  }
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const auto& d = net.distribution(e);
    const EdgeDraw& draw = x.edge_draws[e];
    if (draw.atom >= d.size()) {
      std::ostringstream msg;
      msg << "edge " << e << " draw index " << draw.atom << " not in support of size " << d.size();
      throw std::invalid_argument(msg.str());
    }
    const double value = d.value(draw.atom);
    lp += log_of(d.mass(draw.atom));
    lp += log_of(draw.live ? value : 1.0 - value);
  }
  return {lp};
}

PartialRealization empty_partial(const DicNetwork& net) {
  PartialRealization y;
  y.active.assign(net.node_count(), 0);
  y.attempts_used.assign(net.node_count(), 0);
  y.revealed_draw.assign(net.edge_count(), std::nullopt);
  y.resolved_attempt.assign(net.edge_count(), std::nullopt);
  return y;
}

bool is_compatible(const FullRealization& x, const PartialRealization& y) {
  if (x.edge_draws.size() != y.revealed_draw.size()) return false;
  for (std::size_t e = 0; e < x.edge_draws.size(); ++e) {
    if (y.revealed_draw[e] && *y.revealed_draw[e] != x.edge_draws[e].atom) return false;
    if (y.resolved_attempt[e] && *y.resolved_attempt[e] != x.edge_draws[e].live) return false;
  }
  for (const SeedObservation& obs : y.seed_log) {
    if (obs.attempt >= x.budget || x.seed_success(obs.node, obs.attempt) != obs.success) return false;
  }
  return true;
}

FullRealization condition_sample(const DicNetwork& net, const PartialRealization& y, Rng& rng) {
  FullRealization x;
  x.budget = net.budget();
  const std::size_t n = net.node_count();
  x.seed_outcomes.resize(n * static_cast<std::size_t>(x.budget));
  for (NodeId v = 0; v < n; ++v) {
    const double p = net.activation(v);
    for (int j = 0; j < x.budget; ++j) x.set_seed_success(v, j, bernoulli(rng, p));
  }
  for (const SeedObservation& obs : y.seed_log) x.set_seed_success(obs.node, obs.attempt, obs.success);

  x.edge_draws.resize(net.edge_count());
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const auto& d = net.distribution(e);
    std::size_t atom = 0;
    if (y.revealed_draw[e]) {
      atom = *y.revealed_draw[e];
    } else if (d.size() > 1) {
      atom = d.sample_index(unit_uniform(rng));
    }
    const bool live = y.resolved_attempt[e] ? *y.resolved_attempt[e] : bernoulli(rng, d.value(atom));
    x.edge_draws[e] = {static_cast<std::uint16_t>(atom), live};
  }
  return x;
}

std::optional<std::string> check_consistency(const DicNetwork& net, const PartialRealization& y) {
  std::ostringstream msg;
  if (y.active.size() != net.node_count() || y.revealed_draw.size() != net.edge_count()) {
    return std::string("observation shape does not match network");
  }
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    if (y.resolved_attempt[e] && !y.revealed_draw[e]) {
      msg << "edge " << e << " resolved without a revealed draw";
      return msg.str();
    }
    if (y.revealed_draw[e].has_value() != y.is_active(net.source(e))) {
      msg << "edge " << e << " draw revealed iff source active violated";
      return msg.str();
    }
  }
  for (NodeId v = 0; v < net.node_count(); ++v) {
    if (y.attempts_used[v] > net.budget()) {
      msg << "node " << v << " used " << y.attempts_used[v] << " attempts";
      return msg.str();
    }
  }
  for (const SeedObservation& obs : y.seed_log) {
    if (obs.success && !y.is_active(obs.node)) {
      msg << "successful seed " << obs.node << " not active";
      return msg.str();
    }
  }
  return std::nullopt;
}

bool is_quiescent(const DicNetwork& net, const PartialRealization& y) {
  for (NodeId u = 0; u < net.node_count(); ++u) {
    if (!y.is_active(u)) continue;
    auto [begin, end] = net.out_edges(u);
    for (EdgeId e = begin; e < end; ++e) {
      if (!y.is_active(net.target(e)) && !y.resolved_attempt[e]) return false;
    }
  }
  return true;
}

std::vector<NodeId> seed_multiset(const PartialRealization& y) {
  std::vector<NodeId> seeds;
  for (NodeId v = 0; v < y.attempts_used.size(); ++v) {
    for (int j = 0; j < y.attempts_used[v]; ++j) seeds.push_back(v);
  }
  return seeds;
}

}  // namespace dic
