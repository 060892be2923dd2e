#pragma once

#include <cstdint>
#include <vector>

#include "dic/diffusion.hpp"
#include "dic/model.hpp"

namespace dic {

struct Estimate {
  double mean = 0.0;
  std::int64_t replications = 0;
  double half_width = 0.0;  // Hoeffding bound at the configured delta
  std::uint64_t master_seed = 0;
};

struct EstimateOptions {
  double delta = 0.01;
  unsigned workers = 1;
};

/// Outcome of one replication, kept for per-row reporting.
struct Replication {
  int spread = 0;
  int rounds = 0;
  int seeds_used = 0;
  int selections = 0;
  std::uint64_t gain_evaluations = 0;
  double selection_ms = 0.0;
};

/// Replication i samples its realization from derive_seed(master, i, realization)
/// and builds its policy from derive_seed(master, i, policy). Results are
/// index-addressed, so they do not depend on the worker count.
std::vector<Replication> run_replications(const DicNetwork& net, const PolicyFactory& factory,
                                          std::int64_t replications, std::uint64_t master_seed,
                                          unsigned workers = 1);

Estimate estimate_policy_spread(const DicNetwork& net, const PolicyFactory& factory, std::int64_t replications,
                                std::uint64_t master_seed, EstimateOptions options = {});

/// Smallest R with P(|mean - mu| >= eps) <= delta for samples bounded in [0, N].
std::int64_t hoeffding_samples(double range, double eps, double delta);

double hoeffding_half_width(double range, std::int64_t replications, double delta);

}  // namespace dic
