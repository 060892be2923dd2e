#include "dic/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dic/parallel.hpp"
#include "dic/random.hpp"

namespace dic {

std::vector<Replication> run_replications(const DicNetwork& net, const PolicyFactory& factory,
                                          std::int64_t replications, std::uint64_t master_seed,
                                          unsigned workers) {
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  std::vector<Replication> out(static_cast<std::size_t>(replications));
  parallel_for(out.size(), workers, [&](std::size_t i) {
    Rng rng(derive_seed(master_seed, i, StreamTag::realization));
    const FullRealization x = sample_full(net, rng);
    auto policy = factory(derive_seed(master_seed, i, StreamTag::policy));
    const RunResult r = run_policy(net, *policy, x, false);
    out[i] = {r.spread, r.rounds, r.seeds_used, r.selections, policy->stats().gain_evaluations, r.selection_ms};
  });
  return out;
}

Estimate estimate_policy_spread(const DicNetwork& net, const PolicyFactory& factory, std::int64_t replications,
                                std::uint64_t master_seed, EstimateOptions options) {
  const auto reps = run_replications(net, factory, replications, master_seed, options.workers);
  std::uint64_t total = 0;
  for (const Replication& r : reps) total += static_cast<std::uint64_t>(r.spread);
  Estimate est;
  est.replications = replications;
  est.mean = static_cast<double>(total) / static_cast<double>(replications);
  est.half_width = hoeffding_half_width(static_cast<double>(net.node_count()), replications, options.delta);
  est.master_seed = master_seed;
  return est;
}

std::int64_t hoeffding_samples(double range, double eps, double delta) {
  if (!(eps > 0.0) || !(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("need eps > 0 and 0 < delta < 1");
  const double r = range * range * std::log(2.0 / delta) / (2.0 * eps * eps);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(r - 1e-9)));
}

double hoeffding_half_width(double range, std::int64_t replications, double delta) {
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  return range * std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(replications)));
}

}  // namespace dic
