#include "dic/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dic {

PropagationDistribution::PropagationDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  cumulative_.reserve(atoms_.size());
  double acc = 0.0;
  for (const Atom& a : atoms_) {
    acc += a.mass;
    cumulative_.push_back(acc);
  }
}

std::size_t PropagationDistribution::sample_index(double u) const {
  // Scale by the total so rounding in the masses can never leave u uncovered.
  const double target = u * cumulative_.back();
  for (std::size_t i = 0; i + 1 < cumulative_.size(); ++i) {
    if (target < cumulative_[i]) return i;
  }
  return cumulative_.size() - 1;
}

std::optional<std::string> PropagationDistribution::violation() const {
  std::ostringstream msg;
  if (atoms_.empty()) return std::string("empty support");
  if (atoms_.size() > std::numeric_limits<std::uint16_t>::max()) return std::string("support too large");
  double sum = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!(a.value >= 0.0 && a.value <= 1.0)) {
      msg << "value " << a.value << " outside [0,1]";
      return msg.str();
    }
    if (!(a.mass > 0.0 && a.mass <= 1.0)) {
      msg << "mass " << a.mass << " outside (0,1]";
      return msg.str();
    }
    if (i > 0 && !(a.value > atoms_[i - 1].value)) {
      msg << "values not strictly increasing at " << a.value;
      return msg.str();
    }
    sum += a.mass;
  }
  if (std::abs(sum - 1.0) >= kProbabilityTolerance) {
    msg << "mass sum " << sum;
    return msg.str();
  }
  return std::nullopt;
}

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << what << " " << p << " outside [0,1]";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

PropagationDistribution fixed_distribution(double p) {
  check_probability(p, "propagation probability");
  return PropagationDistribution({{p, 1.0}});
}

PropagationDistribution uniform_discrete_distribution(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("uniform distribution needs at least one value");
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
    throw std::invalid_argument("uniform distribution values must be distinct");
  }
  const double mass = 1.0 / static_cast<double>(values.size());
  std::vector<Atom> atoms;
  atoms.reserve(values.size());
  for (double v : values) {
    check_probability(v, "propagation probability");
    atoms.push_back({v, mass});
  }
  return PropagationDistribution(std::move(atoms));
}

PropagationDistribution discrete_distribution(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  PropagationDistribution d(std::move(atoms));
  if (auto v = d.violation()) throw std::invalid_argument("invalid distribution: " + *v);
  return d;
}

PropagationDistribution quantize_exponential(double mean, int bins) {
  if (!(mean > 0.0) || !std::isfinite(mean)) throw std::invalid_argument("exponential mean must be positive");
  if (bins < 1) throw std::invalid_argument("bin count must be at least 1");

  // For X ~ Exp(mean) the quantile at level l is -mean*log(1-l) and
  // exp(-q/mean) = 1-l, so the partial first moment over a bin is closed form.
  const double cdf_at_one = -std::expm1(-1.0 / mean);
  const double k = static_cast<double>(bins);
  std::vector<Atom> atoms;
  for (int i = 0; i < bins; ++i) {
    const double lo = i / k;
    const double hi = (i + 1) / k;
    const double a = -mean * std::log1p(-lo);
    double value = 1.0;
    if (a < 1.0) {
      double moment = (a + mean) * (1.0 - lo);
      if (hi < cdf_at_one) {
        const double b = -mean * std::log1p(-hi);
        moment -= (b + mean) * (1.0 - hi);
      } else {
        moment -= (1.0 + mean) * (1.0 - cdf_at_one);
        moment += hi - std::max(lo, cdf_at_one);  // clipped mass sitting at 1
      }
      value = std::min(1.0, moment * k);
    }
    if (!atoms.empty() && value <= atoms.back().value) {
      atoms.back().mass += 1.0 / k;
    } else {
      atoms.push_back({value, 1.0 / k});
    }
  }
  return PropagationDistribution(std::move(atoms));
}

double mean_propagation(const PropagationDistribution& d) {
  double m = 0.0;
  for (const Atom& a : d.atoms()) m += a.value * a.mass;
  return m;
}

DicNetwork DicNetwork::with_budget(int budget) const {
  DicNetwork copy = *this;
  copy.budget_ = budget;
  return copy;
}

DicNetwork DicNetwork::mean_field() const {
  DicNetwork copy = *this;
  for (auto& d : copy.distributions_) d = PropagationDistribution({{mean_propagation(d), 1.0}});
  return copy;
}

bool DicNetwork::operator==(const DicNetwork& other) const {
  if (budget_ != other.budget_ || activation_ != other.activation_ || offsets_ != other.offsets_ ||
      targets_ != other.targets_) {
    return false;
  }
  for (EdgeId e = 0; e < edge_count(); ++e) {
    if (!(distribution(e) == other.distribution(e))) return false;
  }
  return true;
}

NetworkBuilder::NetworkBuilder(std::size_t node_count) : activation_(node_count, 1.0) {}

NetworkBuilder& NetworkBuilder::set_budget(int budget) {
  budget_ = budget;
  return *this;
}

NetworkBuilder& NetworkBuilder::set_activation(NodeId v, double p) {
  activation_.at(v) = p;
  return *this;
}

NetworkBuilder& NetworkBuilder::set_activation_all(double p) {
  std::fill(activation_.begin(), activation_.end(), p);
  return *this;
}

NetworkBuilder& NetworkBuilder::add_edge(NodeId src, NodeId dst, PropagationDistribution dist) {
  if (src >= activation_.size() || dst >= activation_.size()) {
    throw std::out_of_range("edge endpoint outside node range");
  }
  edges_.push_back({src, dst, std::move(dist)});
  return *this;
}

DicNetwork NetworkBuilder::build() const {
  DicNetwork net;
  const std::size_t n = activation_.size();
  net.activation_ = activation_;
  net.budget_ = budget_;

  std::vector<std::size_t> order(edges_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return edges_[a].src < edges_[b].src; });

  net.offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) ++net.offsets_[e.src + 1];
  for (std::size_t v = 0; v < n; ++v) net.offsets_[v + 1] += net.offsets_[v];

  std::map<std::vector<std::pair<double, double>>, std::uint32_t> seen;
  for (std::size_t idx : order) {
    const auto& e = edges_[idx];
    std::vector<std::pair<double, double>> key;
    for (const Atom& a : e.dist.atoms()) key.emplace_back(a.value, a.mass);
    auto [it, inserted] = seen.try_emplace(std::move(key), static_cast<std::uint32_t>(net.distributions_.size()));
    if (inserted) net.distributions_.push_back(e.dist);
    net.sources_.push_back(e.src);
    net.targets_.push_back(e.dst);
    net.dist_index_.push_back(it->second);
  }
  return net;
}

std::optional<std::string> validate_network(const DicNetwork& net) {
  std::ostringstream msg;
  const std::size_t n = net.node_count();
  if (net.budget() < 1 || static_cast<std::size_t>(net.budget()) > n) {
    msg << "budget " << net.budget() << " outside [1, " << n << "]";
    return msg.str();
  }
  for (NodeId v = 0; v < n; ++v) {
    const double p = net.activation(v);
    if (!(p >= 0.0 && p <= 1.0)) {
      msg << "activation of node " << v << " is " << p << ", outside [0,1]";
      return msg.str();
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    std::set<NodeId> targets;
    auto [begin, end] = net.out_edges(v);
    for (EdgeId e = begin; e < end; ++e) {
      const NodeId w = net.target(e);
      if (w == v) {
        msg << "self-loop on node " << v;
        return msg.str();
      }
      if (!targets.insert(w).second) {
        msg << "duplicate edge " << v << "->" << w;
        return msg.str();
      }
      if (auto bad = net.distribution(e).violation()) {
        msg << "edge " << v << "->" << w << ": " << *bad;
        return msg.str();
      }
    }
  }
  return std::nullopt;
}

void require_valid(const DicNetwork& net) {
  if (auto v = validate_network(net)) throw std::invalid_argument("invalid network: " + *v);
}

namespace fixtures {

namespace {
PropagationDistribution two_point() { return discrete_distribution({{0.4, 0.8}, {0.8, 0.2}}); }
}  // namespace

DicNetwork g1() {
  // Reconstructed topology: a chain holding every edge the worked seeding
  // example exercises.
  NetworkBuilder b(6);
  b.set_activation_all(0.5).set_budget(3);
  for (NodeId v = 0; v + 1 < 6; ++v) b.add_edge(v, v + 1, two_point());
  return b.build();
}

DicNetwork two_node() {
  NetworkBuilder b(2);
  b.set_activation_all(1.0).set_budget(1);
  b.add_edge(0, 1, two_point());
  return b.build();
}

}  // namespace fixtures

}  // namespace dic
