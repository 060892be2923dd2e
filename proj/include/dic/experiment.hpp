#pragma once

// Budget sweeps over strategies and the CSV/JSON artifacts they produce.

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dic/data.hpp"
#include "dic/model.hpp"
#include "dic/strategies.hpp"
#include "json.hpp"

namespace dic {

inline constexpr const char* kVersion = "0.1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeneratorSpec {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::uint64_t seed = 0;
  double offset = kDefaultAttachmentOffset;
};

struct ExperimentConfig {
  // Exactly one network source.
  std::string net_path;
  std::string edge_list_path;
  std::string direction = "as-is";
  std::optional<GeneratorSpec> generator;
  std::string fixture;

  // Overrides the network's own laws when set; required for generated and
  // edge-list networks (defaulting to f1:0.01 and activation 1).
  std::string preset;
  std::optional<double> activation;

  std::vector<std::string> strategies{"random", "greedy", "a-greedy", "h-greedy"};
  std::vector<int> budgets;
  int replications = 1;
  int samples = 10000;        // R
  int prune_samples = 2000;   // R_pre
  std::uint64_t master_seed = 1;
  unsigned workers = 1;
  double delta = 0.01;
  bool greedy_counts_seed_failure = true;
  std::string prune_rule = "average";  // or "population"
  std::string out;
};

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// "a..b", "a..b:step", "a" or a comma list of those.
std::vector<int> parse_budgets(const std::string& text);

/// Parses "n,edges,seed".
GeneratorSpec parse_generator(const std::string& text);

bool is_known_strategy(const std::string& name);

/// Checks everything that does not need the network.
void validate_config(const ExperimentConfig& config);

/// Builds the configured network; budgets are applied per run.
DicNetwork build_network(const ExperimentConfig& config);

struct ResultRow {
  std::string strategy;
  int budget = 0;
  int replication = 0;
  int spread = 0;
  int rounds_used = 0;
  int seeds_used = 0;
  std::uint64_t gain_evaluations = 0;
  double wall_time_ms = 0.0;  // average per seed-selection step
  std::uint64_t master_seed = 0;
};

struct SummaryRow {
  std::string strategy;
  int budget = 0;
  int replications = 0;
  double mean_spread = 0.0;
  double stddev = 0.0;      // sample standard deviation of spread
  double half_width = 0.0;  // Hoeffding, at the configured delta
  double ci95 = 0.0;        // normal approximation, 1.96 * stddev / sqrt(n)
  double mean_seeds_used = 0.0;
  double mean_gain_evaluations = 0.0;
  double mean_wall_time_ms = 0.0;
};

/// Rows ordered by strategy (as configured), budget, replication.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, const DicNetwork& net,
                                      std::ostream* progress = nullptr);

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows, std::size_t node_count, double delta);

inline constexpr const char* kResultHeader =
    "strategy,budget,replication,spread,rounds_used,seeds_used,gain_evaluations,wall_time_ms,master_seed";

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct PruneStatsResult {
  PruneResult prune;
  double elapsed_ms = 0.0;
};

PruneStatsResult run_prune_stats(const ExperimentConfig& config, const DicNetwork& net);
void write_prune_csv(std::ostream& out, const PruneResult& prune);
void write_prune_summary_csv(std::ostream& out, const PruneResult& prune);

}  // namespace dic
