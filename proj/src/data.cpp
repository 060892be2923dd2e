#include "dic/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dic/random.hpp"
#include "json.hpp"

namespace dic {

using nlohmann::json;

Directedness parse_directedness(const std::string& text) {
  if (text == "as-is") return Directedness::as_is;
  if (text == "reciprocate") return Directedness::reciprocate;
  if (text == "reverse") return Directedness::reverse;
  throw InputError("unknown edge direction mode '" + text + "' (as-is, reciprocate, reverse)");
}

namespace {

std::vector<double> parse_numbers(const std::string& text, const std::string& context) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(context + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw InputError(context + ": no values");
  return out;
}

template <class F>
auto rethrow_as_input(const std::string& context, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw InputError(context + ": " + e.what());
  }
}

}  // namespace

PropagationDistribution parse_propagation(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("preset '" + text + "' needs the form fN:values");
  const std::string kind = text.substr(0, colon);
  const auto values = parse_numbers(text.substr(colon + 1), "preset " + kind);
  return rethrow_as_input("preset " + text, [&] {
    if (kind == "f1") {
      if (values.size() != 1) throw std::invalid_argument("f1 takes one probability");
      return fixed_distribution(values[0]);
    }
    if (kind == "f2") {
      if (values.size() > 2) throw std::invalid_argument("f2 takes mean[,bins]");
      const double bins = values.size() == 2 ? values[1] : kDefaultExponentialBins;
      if (bins < 1 || bins != std::floor(bins)) throw std::invalid_argument("bins must be a positive integer");
      if (!(values[0] > 0)) throw std::invalid_argument("mean must be positive");
      return quantize_exponential(values[0], static_cast<int>(bins));
    }
    if (kind == "f3") {
      auto sorted = values;
      std::sort(sorted.begin(), sorted.end());
      return uniform_discrete_distribution(sorted);
    }
    throw std::invalid_argument("unknown preset kind '" + kind + "'");
  });
}

Preset make_preset(const std::string& text, double activation) {
  if (!(activation >= 0.0 && activation <= 1.0)) throw InputError("activation must lie in [0, 1]");
  return Preset{parse_propagation(text), activation, text};
}

namespace {

DicNetwork finish(std::size_t nodes, const std::vector<std::pair<NodeId, NodeId>>& edges, const Preset& preset,
                  int budget) {
  if (budget < 1 || static_cast<std::size_t>(budget) > nodes) {
    std::ostringstream msg;
    msg << "budget " << budget << " outside [1, " << nodes << "]";
    throw InputError(msg.str());
  }
  NetworkBuilder builder(nodes);
  builder.set_budget(budget).set_activation_all(preset.activation);
  for (auto [u, v] : edges) builder.add_edge(u, v, preset.propagation);
  return builder.build();
}

}  // namespace

DicNetwork read_edge_list(std::istream& in, Directedness mode, const Preset& preset, int budget) {
  std::unordered_map<std::string, NodeId> ids;
  auto id_of = [&](const std::string& label) {
    auto [it, fresh] = ids.emplace(label, static_cast<NodeId>(ids.size()));
    return it->second;
  };
  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<std::pair<NodeId, NodeId>> edges;
  auto keep = [&](NodeId u, NodeId v) {
    if (u != v && seen.emplace(u, v).second) edges.emplace_back(u, v);
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream tokens(line);
    std::string a, b, extra;
    tokens >> a >> b;
    auto is_int = [](const std::string& t) {
      const std::size_t digits = t.size() - (!t.empty() && t[0] == '-');
      return digits > 0 && digits <= 18 &&
             std::all_of(t.end() - digits, t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
    };
    const bool ok = !b.empty() && !(tokens >> extra) && is_int(a) && is_int(b);
    if (!ok) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected two integer node ids, got '" << line << "'";
      throw InputError(msg.str());
    }
    const NodeId u = id_of(std::to_string(std::stoll(a)));
    const NodeId v = id_of(std::to_string(std::stoll(b)));
    switch (mode) {
      case Directedness::as_is:
        keep(u, v);
        break;
      case Directedness::reverse:
        keep(v, u);
        break;
      case Directedness::reciprocate:
        keep(u, v);
        keep(v, u);
        break;
    }
  }
  if (edges.empty()) throw InputError("edge list contains no edges");
  return finish(ids.size(), edges, preset, budget);
}

DicNetwork load_edge_list(const EdgeListSpec& spec, const Preset& preset, int budget) {
  std::ifstream in(spec.path);
  if (!in) throw IoError("cannot open edge list " + spec.path);
  try {
    return read_edge_list(in, spec.mode, preset, budget);
  } catch (const InputError& e) {
    throw InputError(spec.path + ": " + e.what());
  }
}

DicNetwork generate_power_law(std::size_t nodes, std::size_t edges_target, std::uint64_t seed, const Preset& preset,
                              int budget, double offset) {
  if (nodes < 2) throw InputError("generator needs at least 2 nodes");
  if (!(offset >= 0.0 && offset < 1.0)) throw InputError("attachment offset must lie in [0, 1)");
  const std::size_t pairs = (edges_target + 1) / 2;
  const std::size_t max_pairs = nodes * (nodes - 1) / 2;
  if (pairs < nodes - 1 || pairs > max_pairs) {
    std::ostringstream msg;
    msg << "cannot place " << edges_target << " reciprocated edges on " << nodes << " connected nodes (need "
        << 2 * (nodes - 1) << ".." << 2 * max_pairs << ")";
    throw InputError(msg.str());
  }
  // Seed clique, then newcomers; every newcomer needs at least one link.
  const double mean_links = static_cast<double>(pairs) / static_cast<double>(nodes);
  std::size_t core = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(mean_links)) + 1, 2, nodes);
  while (core > 2 && core * (core - 1) / 2 + (nodes - core) > pairs) --core;
  std::vector<std::pair<NodeId, NodeId>> links;
  for (NodeId u = 0; u < core; ++u) {
    for (NodeId v = u + 1; v < core; ++v) links.emplace_back(u, v);
  }
  const std::size_t newcomers = nodes - core;
  const std::size_t spread = pairs - links.size();
  const std::size_t min_links = newcomers ? std::max<std::size_t>(1, spread / newcomers) : core - 1;
  const double shift = offset * static_cast<double>(min_links);

  Rng rng(derive_seed(seed, 0, StreamTag::generator));
  std::vector<NodeId> endpoints;
  std::vector<std::size_t> degree(nodes, 0);
  for (auto [u, v] : links) {
    endpoints.push_back(u);
    endpoints.push_back(v);
    ++degree[u];
    ++degree[v];
  }
  std::vector<NodeId> chosen;
  for (std::size_t i = 0; i < newcomers; ++i) {
    const auto t = static_cast<NodeId>(core + i);
    const std::size_t left_links = pairs - links.size();
    const std::size_t left_nodes = newcomers - i;
    const std::size_t want = std::min<std::size_t>(t, (left_links + left_nodes - 1) / left_nodes);
    chosen.clear();
    while (chosen.size() < want) {
      const NodeId w = endpoints[std::uniform_int_distribution<std::size_t>(0, endpoints.size() - 1)(rng)];
      const double d = static_cast<double>(degree[w]);
      if (!bernoulli(rng, std::max(1.0 - shift / d, 1.0 - offset))) continue;
      if (std::find(chosen.begin(), chosen.end(), w) != chosen.end()) continue;
      chosen.push_back(w);
    }
    for (NodeId w : chosen) {
      links.emplace_back(t, w);
      endpoints.push_back(t);
      endpoints.push_back(w);
      ++degree[t];
      ++degree[w];
    }
  }
  if (links.size() != pairs) throw InputError("generator could not reach the requested edge count");
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(2 * links.size());
  for (auto [u, v] : links) {
    edges.emplace_back(u, v);
    edges.emplace_back(v, u);
  }
  return finish(nodes, edges, preset, budget);
}

namespace {

json distribution_json(const PropagationDistribution& d) {
  json support = json::array();
  for (const Atom& a : d.atoms()) support.push_back({a.value, a.mass});
  return {{"type", "discrete"}, {"support", support}};
}

[[noreturn]] void schema_error(const std::string& path, const std::string& problem) {
  throw InputError("network schema: " + path + ": " + problem);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<std::int64_t>();
}

PropagationDistribution distribution_from(const json& j, const std::string& path) {
  const json& type = field(j, "type", path);
  if (!type.is_string()) schema_error(path + ".type", "expected a string");
  const std::string kind = type.get<std::string>();
  try {
    if (kind == "fixed") return fixed_distribution(number(field(j, "p", path), path + ".p"));
    if (kind == "uniform") {
      const json& values = field(j, "values", path);
      if (!values.is_array()) schema_error(path + ".values", "expected an array");
      std::vector<double> v;
      for (std::size_t i = 0; i < values.size(); ++i) {
        v.push_back(number(values[i], path + ".values[" + std::to_string(i) + "]"));
      }
      std::sort(v.begin(), v.end());
      return uniform_discrete_distribution(v);
    }
    if (kind == "discrete") {
      const json& support = field(j, "support", path);
      if (!support.is_array()) schema_error(path + ".support", "expected an array");
      std::vector<Atom> atoms;
      for (std::size_t i = 0; i < support.size(); ++i) {
        const std::string at = path + ".support[" + std::to_string(i) + "]";
        if (!support[i].is_array() || support[i].size() != 2) schema_error(at, "expected [value, mass]");
        atoms.push_back({number(support[i][0], at + "[0]"), number(support[i][1], at + "[1]")});
      }
      return discrete_distribution(std::move(atoms));
    }
    if (kind == "exp") {
      const double mean = number(field(j, "mean", path), path + ".mean");
      const auto bins = j.contains("bins") ? integer(j["bins"], path + ".bins") : kDefaultExponentialBins;
      if (!(mean > 0) || bins < 1) schema_error(path, "exp needs mean > 0 and bins >= 1");
      return quantize_exponential(mean, static_cast<int>(bins));
    }
  } catch (const std::invalid_argument& e) {
    schema_error(path, e.what());
  }
  schema_error(path + ".type", "unknown distribution type '" + kind + "'");
}

}  // namespace

void write_network(const DicNetwork& net, std::ostream& out) {
  json j;
  j["nodes"] = net.node_count();
  j["budget"] = net.budget();
  const auto act = net.activations();
  if (!act.empty() && std::all_of(act.begin(), act.end(), [&](double p) { return p == act.front(); })) {
    j["activation"] = act.front();
  } else {
    j["activation"] = std::vector<double>(act.begin(), act.end());
  }
  json edges = json::array();
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    edges.push_back({{"src", net.source(e)}, {"dst", net.target(e)}, {"dist", distribution_json(net.distribution(e))}});
  }
  j["edges"] = std::move(edges);
  out << j.dump(1) << '\n';
}

DicNetwork read_network(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("network file is not valid JSON: ") + e.what());
  }
  const std::int64_t n = integer(field(j, "nodes", "$"), "$.nodes");
  if (n < 0) schema_error("$.nodes", "must be non-negative");
  const std::int64_t budget = integer(field(j, "budget", "$"), "$.budget");
  NetworkBuilder builder(static_cast<std::size_t>(n));
  builder.set_budget(static_cast<int>(budget));
  const json& act = field(j, "activation", "$");
  if (act.is_array()) {
    if (static_cast<std::int64_t>(act.size()) != n) schema_error("$.activation", "expected one entry per node");
    for (std::size_t v = 0; v < act.size(); ++v) {
      builder.set_activation(static_cast<NodeId>(v), number(act[v], "$.activation[" + std::to_string(v) + "]"));
    }
  } else {
    builder.set_activation_all(number(act, "$.activation"));
  }
  const json& edges = field(j, "edges", "$");
  if (!edges.is_array()) schema_error("$.edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string at = "$.edges[" + std::to_string(i) + "]";
    const auto src = integer(field(edges[i], "src", at), at + ".src");
    const auto dst = integer(field(edges[i], "dst", at), at + ".dst");
    if (src < 0 || src >= n) schema_error(at + ".src", "node id out of range");
    if (dst < 0 || dst >= n) schema_error(at + ".dst", "node id out of range");
    builder.add_edge(static_cast<NodeId>(src), static_cast<NodeId>(dst),
                     distribution_from(field(edges[i], "dist", at), at + ".dist"));
  }
  DicNetwork net = builder.build();
  if (const auto bad = validate_network(net)) throw InputError("network invalid: " + *bad);
  return net;
}

void save_network(const DicNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_network(net, out);
  if (!out) throw IoError("failed writing " + path);
}

DicNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open network file " + path);
  try {
    return read_network(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace dic
