#pragma once

// Seeding patterns and the strategies compared in the experiments: Random,
// static Greedy on the mean-field network, adaptive greedy (A-Greedy) with
// lazy-forward evaluation, and its pruned variant H-Greedy.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dic/diffusion.hpp"
#include "dic/model.hpp"
#include "dic/random.hpp"
#include "dic/realization.hpp"

namespace dic {

/// Budget-per-step schedule. The adaptive pattern seeds one node at a time
/// and waits for quiescence in between; it has no explicit schedule.
struct SeedingPattern {
  std::vector<int> schedule;
  bool adaptive = false;

  static SeedingPattern adaptive_star() { return {{}, true}; }
  /// Non-adaptive: every seed in step one.
  static SeedingPattern single_step(int budget) { return {{budget}, false}; }

  int total() const;
  std::optional<std::string> violation(int budget) const;
  std::string to_string() const;

  bool operator==(const SeedingPattern&) const = default;
};

/// One seed per step until the budget is spent, then zeros up to length N.
SeedingPattern pattern_a0(int budget, int node_count);

/// Inactive, attempts left, and (if a mask is given) inside the mask.
bool is_eligible(const PolicyView& view, NodeId v, const std::vector<std::uint8_t>* mask = nullptr);

/// Follows a seeding pattern and delegates the choice of nodes. Zero entries
/// reached at quiescence are skipped instead of waiting a null round.
class SchedulePolicy : public Policy {
 public:
  explicit SchedulePolicy(SeedingPattern pattern) : pattern_(std::move(pattern)) {}
  std::optional<SeedCommand> next(const PolicyView& view) final;

 protected:
  virtual std::vector<NodeId> choose(const PolicyView& view, int count) = 0;

 private:
  SeedingPattern pattern_;
  std::size_t step_ = 0;
};

class RandomPolicy final : public SchedulePolicy {
 public:
  RandomPolicy(SeedingPattern pattern, std::uint64_t seed) : SchedulePolicy(std::move(pattern)), rng_(seed) {}
  std::unique_ptr<Policy> clone() const override { return std::make_unique<RandomPolicy>(*this); }

 protected:
  std::vector<NodeId> choose(const PolicyView& view, int count) override;

 private:
  Rng rng_;
};

/// Never seeds anything.
class EmptyPolicy final : public Policy {
 public:
  std::optional<SeedCommand> next(const PolicyView&) override { return std::nullopt; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<EmptyPolicy>(); }
};

/// "a*" or a comma list of step sizes such as "1,0,1".
SeedingPattern parse_pattern(const std::string& text);

/// Seeds a precomputed list in order, following the given pattern.
class SeedListPolicy final : public SchedulePolicy {
 public:
  SeedListPolicy(std::vector<NodeId> seeds, SeedingPattern pattern)
      : SchedulePolicy(std::move(pattern)), seeds_(std::move(seeds)) {}
  std::unique_ptr<Policy> clone() const override { return std::make_unique<SeedListPolicy>(*this); }

 protected:
  std::vector<NodeId> choose(const PolicyView& view, int count) override;

 private:
  std::vector<NodeId> seeds_;
  std::size_t cursor_ = 0;
};

/// Monte Carlo estimate of the expected number of nodes newly activated by
/// seeding v now, given a quiescent observation y.
///
/// Sample r of the batch is a conditional realization whose unobserved
/// coordinates are pure functions of (key, r, coordinate), so every candidate
/// in a batch sees the same realizations and a re-evaluation after more
/// observations reads the same coordinates again. The next seed attempt of v
/// in sample r uses one uniform regardless of how many attempts v already
/// spent; attempts are i.i.d., so this is a coupling, not a bias. Under it the
/// per-sample gain only shrinks as the active set grows, which is what makes
/// lazy evaluation exact.
class GainEstimator {
 public:
  GainEstimator(int samples, std::uint64_t key) : samples_(samples), key_(key) {}

  /// Sum of per-sample gains over the batch; optionally also the sum of squares.
  std::uint64_t total_gain(const DicNetwork& net, const PartialRealization& y, NodeId v,
                           std::uint64_t* square_total = nullptr);
  double gain(const DicNetwork& net, const PartialRealization& y, NodeId v) {
    return static_cast<double>(total_gain(net, y, v)) / samples_;
  }
  int samples() const { return samples_; }
  std::uint64_t key() const { return key_; }

 private:
  bool edge_live(const DicNetwork& net, const PartialRealization& y, EdgeId e, std::uint64_t r) const;

  int samples_;
  std::uint64_t key_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<NodeId> queue_;
};

double marginal_gain(const DicNetwork& net, const PartialRealization& y, NodeId v, int samples, std::uint64_t seed);

/// Gain totals of every node under the empty observation, for a given batch.
std::vector<std::uint64_t> initial_gain_totals(const DicNetwork& net, int samples, std::uint64_t key,
                                               unsigned workers = 1);

struct SelectionRecord {
  NodeId node = 0;
  std::uint64_t total_gain = 0;
  std::uint64_t evaluations = 0;  // gain evaluations spent on this selection
};

/// Shared, immutable inputs of an adaptive greedy policy. Computing the
/// step-one gain table once lets every replication start from it.
struct GreedySetup {
  int samples = 10000;
  std::uint64_t key = 0;
  bool lazy = true;
  std::shared_ptr<const std::vector<std::uint8_t>> candidates;  // null: every node
  std::shared_ptr<const std::vector<std::uint64_t>> initial_totals;
  double precompute_ms = 0.0;
};

/// A-Greedy: at every quiescent point seeds the eligible node of largest
/// estimated marginal gain, smallest id on ties. Failed seeds stay eligible.
class AdaptiveGreedyPolicy final : public Policy {
 public:
  explicit AdaptiveGreedyPolicy(GreedySetup setup);

  std::optional<SeedCommand> next(const PolicyView& view) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<AdaptiveGreedyPolicy>(*this); }
  PolicyStats stats() const override { return {evaluations_}; }

  const std::vector<SelectionRecord>& selections() const { return selections_; }

 private:
  struct Entry {
    std::uint64_t total;
    NodeId node;
    int stamp;
  };
  struct Lower {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.total < b.total || (a.total == b.total && a.node > b.node);
    }
  };

  std::optional<SelectionRecord> select_lazy(const PolicyView& view);
  std::optional<SelectionRecord> select_exhaustive(const PolicyView& view);
  std::uint64_t evaluate(const PolicyView& view, NodeId v);

  GreedySetup setup_;
  GainEstimator estimator_;
  std::vector<Entry> heap_;
  bool heap_built_ = false;
  int step_ = 0;
  std::uint64_t evaluations_ = 0;
  std::vector<SelectionRecord> selections_;
};

/// Which spread the lower 1-sigma control limit subtracts from the mean.
enum class PruneRule {
  /// Standard deviation of the node-averaged single-seed spread when every
  /// node's cascade is simulated independently: sqrt(sum_v Var[H(v)]) / N.
  simulation_average,
  /// Population standard deviation of the per-node estimates. Can never prune
  /// half of the nodes or more.
  population,
};

PruneRule parse_prune_rule(const std::string& text);
std::string to_string(PruneRule rule);

struct PruneResult {
  PruneRule rule = PruneRule::simulation_average;
  std::vector<std::uint8_t> keep;
  std::vector<double> estimates;        // single-seed expected spread per node
  std::vector<double> standard_errors;  // Monte Carlo standard error per estimate
  double mean = 0.0;
  double stddev = 0.0;          // population standard deviation across nodes
  double average_stddev = 0.0;  // sqrt(sum of per-node spread variances) / N
  double threshold = 0.0;

  std::size_t kept() const;
  double pruned_fraction() const;
};

/// Keeps nodes whose estimated single-seed spread reaches the lower 1-sigma
/// control limit: the mean minus the rule's standard deviation.
PruneResult h_greedy_prune(const DicNetwork& net, int samples, std::uint64_t seed, unsigned workers = 1,
                           PruneRule rule = PruneRule::simulation_average);

/// CELF greedy on the mean-field network maximizing the expected spread of a
/// seed set launched at once. With include_seed_failure false every seed is
/// assumed to take.
std::vector<NodeId> static_greedy_select(const DicNetwork& net, int budget, int samples, std::uint64_t seed,
                                         bool include_seed_failure = true, std::uint64_t* evaluations = nullptr);

struct StrategyParams {
  int samples = 10000;        // R
  int prune_samples = 2000;   // R_pre
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool lazy = true;
  bool greedy_counts_seed_failure = true;
  PruneRule prune_rule = PruneRule::simulation_average;
};

GreedySetup prepare_a_greedy(const DicNetwork& net, const StrategyParams& params);
GreedySetup prepare_h_greedy(const DicNetwork& net, const StrategyParams& params, PruneResult* prune = nullptr);

PolicyFactory make_greedy_factory(GreedySetup setup);
PolicyFactory make_random_factory(SeedingPattern pattern);
PolicyFactory make_seed_list_factory(std::vector<NodeId> seeds, SeedingPattern pattern);

}  // namespace dic
