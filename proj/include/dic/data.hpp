#pragma once

// Network ingestion: edge lists, the synthetic power-law generator, JSON
// network files, and the propagation presets.

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dic/model.hpp"

namespace dic {

/// Bad content: malformed lines, schema violations, invalid parameters.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Files that cannot be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Directedness { as_is, reciprocate, reverse };

Directedness parse_directedness(const std::string& text);

struct EdgeListSpec {
  std::string path;
  Directedness mode = Directedness::as_is;
};

/// One propagation law for every edge and one activation probability for
/// every node.
struct Preset {
  PropagationDistribution propagation = fixed_distribution(0.01);
  double activation = 1.0;
  std::string label = "f1:0.01";
};

inline constexpr int kDefaultExponentialBins = 16;

/// "f1:p", "f2:mean[,bins]" or "f3:v1,v2,...".
PropagationDistribution parse_propagation(const std::string& text);
Preset make_preset(const std::string& text, double activation);

/// Whitespace-separated "src dst" pairs, '#' comments, blank lines allowed.
/// Ids are remapped to [0, N) in first-seen order; self-loops and duplicate
/// directed edges are dropped.
DicNetwork read_edge_list(std::istream& in, Directedness mode, const Preset& preset, int budget);
DicNetwork load_edge_list(const EdgeListSpec& spec, const Preset& preset, int budget);

inline constexpr double kDefaultAttachmentOffset = 0.9;

/// Preferential attachment with reciprocated edges. Each newcomer links to
/// existing nodes chosen with probability proportional to
/// max(degree - c * m, (1 - c) * degree), where c is `offset` and m the
/// smallest newcomer link count; a larger c gives a heavier degree tail
/// (exponent near 3 - c). The newcomers' link counts are spread so the
/// directed edge count matches edges_target up to rounding.
DicNetwork generate_power_law(std::size_t nodes, std::size_t edges_target, std::uint64_t seed, const Preset& preset,
                              int budget, double offset = kDefaultAttachmentOffset);

void write_network(const DicNetwork& net, std::ostream& out);
DicNetwork read_network(std::istream& in);
void save_network(const DicNetwork& net, const std::string& path);
DicNetwork load_network(const std::string& path);

}  // namespace dic
