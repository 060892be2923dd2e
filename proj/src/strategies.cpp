#include "dic/strategies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dic/parallel.hpp"

namespace dic {

namespace {

constexpr std::uint64_t seed_coordinate(NodeId v) { return static_cast<std::uint64_t>(v) << 2; }
constexpr std::uint64_t draw_coordinate(EdgeId e) { return (static_cast<std::uint64_t>(e) << 2) | 1; }
constexpr std::uint64_t live_coordinate(EdgeId e) { return (static_cast<std::uint64_t>(e) << 2) | 2; }

std::uint64_t batch_key(std::uint64_t seed, StreamTag tag) { return derive_seed(seed, 0, tag); }

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

int SeedingPattern::total() const { return std::accumulate(schedule.begin(), schedule.end(), 0); }

std::optional<std::string> SeedingPattern::violation(int budget) const {
  if (adaptive) return std::nullopt;
  if (schedule.empty() || schedule.front() < 1) return std::string("first step must seed at least one node");
  for (int a : schedule) {
    if (a < 0) return std::string("negative step size");
  }
  if (total() > budget) {
    std::ostringstream msg;
    msg << "schedule spends " << total() << " > budget " << budget;
    return msg.str();
  }
  return std::nullopt;
}

std::string SeedingPattern::to_string() const {
  if (adaptive) return "A*";
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < schedule.size(); ++i) out << (i ? "," : "") << schedule[i];
  out << ')';
  return out.str();
}

SeedingPattern parse_pattern(const std::string& text) {
  if (text == "a*" || text == "A*") return SeedingPattern::adaptive_star();
  SeedingPattern p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      p.schedule.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("pattern entry '" + item + "' is not an integer");
    }
  }
  if (p.schedule.empty()) throw std::invalid_argument("empty pattern");
  return p;
}

SeedingPattern pattern_a0(int budget, int node_count) {
  if (budget < 1 || budget > node_count) throw std::invalid_argument("pattern_a0 needs 1 <= B <= N");
  SeedingPattern p;
  p.schedule.assign(static_cast<std::size_t>(node_count), 0);
  std::fill(p.schedule.begin(), p.schedule.begin() + budget, 1);
  return p;
}

bool is_eligible(const PolicyView& view, NodeId v, const std::vector<std::uint8_t>* mask) {
  return !view.observed.is_active(v) && view.observed.attempts_used[v] < view.net.budget() &&
         (mask == nullptr || (*mask)[v] != 0);
}

std::optional<SeedCommand> SchedulePolicy::next(const PolicyView& view) {
  int count = 1;
  if (pattern_.adaptive) {
    if (!view.quiescent) return SeedCommand{};
  } else {
    const auto& s = pattern_.schedule;
    if (view.quiescent) {
      while (step_ < s.size() && s[step_] == 0) ++step_;
    }
    if (step_ >= s.size()) return std::nullopt;
    count = s[step_++];
    if (count == 0) return SeedCommand{};
  }
  count = std::min(count, view.remaining_budget);
  SeedCommand cmd{choose(view, count)};
  if (cmd.empty() && view.quiescent) return std::nullopt;  // nothing eligible, ever again
  return cmd;
}

std::vector<NodeId> RandomPolicy::choose(const PolicyView& view, int count) {
  std::vector<NodeId> eligible;
  for (NodeId v = 0; v < view.net.node_count(); ++v) {
    if (is_eligible(view, v)) eligible.push_back(v);
  }
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(count), eligible.size());
  for (std::size_t i = 0; i < take; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, eligible.size() - 1);
    std::swap(eligible[i], eligible[pick(rng_)]);
  }
  eligible.resize(take);
  return eligible;
}

std::vector<NodeId> SeedListPolicy::choose(const PolicyView& view, int count) {
  std::vector<NodeId> out;
  while (cursor_ < seeds_.size() && static_cast<int>(out.size()) < count) {
    const NodeId v = seeds_[cursor_++];
    if (is_eligible(view, v) && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

bool GainEstimator::edge_live(const DicNetwork& net, const PartialRealization& y, EdgeId e, std::uint64_t r) const {
  if (y.resolved_attempt[e]) return *y.resolved_attempt[e];
  const auto& d = net.distribution(e);
  std::size_t atom = 0;
  if (y.revealed_draw[e]) {
    atom = *y.revealed_draw[e];
  } else if (d.size() > 1) {
    atom = d.sample_index(counter_uniform(key_, r, draw_coordinate(e)));
  }
  return counter_uniform(key_, r, live_coordinate(e)) < d.value(atom);
}

std::uint64_t GainEstimator::total_gain(const DicNetwork& net, const PartialRealization& y, NodeId v,
                                        std::uint64_t* square_total) {
  if (square_total) *square_total = 0;
  const double p = net.activation(v);
  if (p <= 0.0 || y.is_active(v)) return 0;
  if (stamp_.size() != net.node_count()) {
    stamp_.assign(net.node_count(), 0);
    epoch_ = 0;
  }
  std::uint64_t total = 0;
  for (std::uint64_t r = 0; r < static_cast<std::uint64_t>(samples_); ++r) {
    if (p < 1.0 && !(counter_uniform(key_, r, seed_coordinate(v)) < p)) continue;
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    queue_.clear();
    queue_.push_back(v);
    stamp_[v] = epoch_;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      auto [begin, end] = net.out_edges(queue_[head]);
      for (EdgeId e = begin; e < end; ++e) {
        const NodeId w = net.target(e);
        if (stamp_[w] == epoch_ || y.is_active(w)) continue;
        if (edge_live(net, y, e, r)) {
          stamp_[w] = epoch_;
          queue_.push_back(w);
        }
      }
    }
    total += queue_.size();
    if (square_total) *square_total += queue_.size() * queue_.size();
  }
  return total;
}

double marginal_gain(const DicNetwork& net, const PartialRealization& y, NodeId v, int samples, std::uint64_t seed) {
  GainEstimator est(samples, batch_key(seed, StreamTag::gain_batch));
  return est.gain(net, y, v);
}

namespace {

std::vector<std::uint64_t> gain_totals(const DicNetwork& net, int samples, std::uint64_t key, unsigned workers,
                                       const std::vector<std::uint8_t>* mask,
                                       std::vector<std::uint64_t>* squares = nullptr) {
  const PartialRealization empty = empty_partial(net);
  std::vector<std::uint64_t> totals(net.node_count(), 0);
  if (squares) squares->assign(net.node_count(), 0);
  const std::size_t n = net.node_count();
  const unsigned w = std::max(1u, workers);
  // Contiguous chunks so each worker reuses one estimator's scratch space.
  parallel_for(w, w, [&](std::size_t chunk) {
    GainEstimator est(samples, key);
    for (std::size_t v = chunk * n / w; v < (chunk + 1) * n / w; ++v) {
      if (mask == nullptr || (*mask)[v]) {
        totals[v] = est.total_gain(net, empty, static_cast<NodeId>(v), squares ? &(*squares)[v] : nullptr);
      }
    }
  });
  return totals;
}

}  // namespace

std::vector<std::uint64_t> initial_gain_totals(const DicNetwork& net, int samples, std::uint64_t key,
                                               unsigned workers) {
  return gain_totals(net, samples, key, workers, nullptr);
}

AdaptiveGreedyPolicy::AdaptiveGreedyPolicy(GreedySetup setup)
    : setup_(std::move(setup)), estimator_(setup_.samples, setup_.key) {
  if (setup_.samples < 1) throw std::invalid_argument("gain estimation needs at least one sample");
}

std::uint64_t AdaptiveGreedyPolicy::evaluate(const PolicyView& view, NodeId v) {
  ++evaluations_;
  const bool pristine = view.observed.active_count == 0 && view.observed.seed_log.empty();
  if (pristine && setup_.initial_totals) return (*setup_.initial_totals)[v];
  return estimator_.total_gain(view.net, view.observed, v);
}

std::optional<SeedCommand> AdaptiveGreedyPolicy::next(const PolicyView& view) {
  if (!view.quiescent) return SeedCommand{};
  ++step_;
  const auto pick = setup_.lazy ? select_lazy(view) : select_exhaustive(view);
  if (!pick) return std::nullopt;
  selections_.push_back(*pick);
  return SeedCommand{{pick->node}};
}

std::optional<SelectionRecord> AdaptiveGreedyPolicy::select_lazy(const PolicyView& view) {
  const auto* mask = setup_.candidates.get();
  const std::uint64_t before = evaluations_;
  if (!heap_built_) {
    heap_built_ = true;
    for (NodeId v = 0; v < view.net.node_count(); ++v) {
      if (is_eligible(view, v, mask)) heap_.push_back({evaluate(view, v), v, step_});
    }
    std::make_heap(heap_.begin(), heap_.end(), Lower{});
  }
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), Lower{});
    Entry top = heap_.back();
    heap_.pop_back();
    if (!is_eligible(view, top.node, mask)) continue;
    if (top.stamp != step_) {
      // Stale bound from an earlier step: refresh it and let it compete again.
      top.total = evaluate(view, top.node);
      top.stamp = step_;
      heap_.push_back(top);
      std::push_heap(heap_.begin(), heap_.end(), Lower{});
      continue;
    }
    heap_.push_back(top);  // stays a candidate if its seed fails
    std::push_heap(heap_.begin(), heap_.end(), Lower{});
    return SelectionRecord{top.node, top.total, evaluations_ - before};
  }
  return std::nullopt;
}

std::optional<SelectionRecord> AdaptiveGreedyPolicy::select_exhaustive(const PolicyView& view) {
  const auto* mask = setup_.candidates.get();
  const std::uint64_t before = evaluations_;
  std::optional<Entry> best;
  for (NodeId v = 0; v < view.net.node_count(); ++v) {
    if (!is_eligible(view, v, mask)) continue;
    const Entry e{evaluate(view, v), v, step_};
    if (!best || Lower{}(*best, e)) best = e;
  }
  if (!best) return std::nullopt;
  return SelectionRecord{best->node, best->total, evaluations_ - before};
}

std::size_t PruneResult::kept() const {
  return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), std::uint8_t{1}));
}

double PruneResult::pruned_fraction() const {
  return keep.empty() ? 0.0 : 1.0 - static_cast<double>(kept()) / static_cast<double>(keep.size());
}

PruneRule parse_prune_rule(const std::string& text) {
  if (text == "average") return PruneRule::simulation_average;
  if (text == "population") return PruneRule::population;
  throw std::invalid_argument("unknown prune rule '" + text + "' (average, population)");
}

std::string to_string(PruneRule rule) { return rule == PruneRule::population ? "population" : "average"; }

PruneResult h_greedy_prune(const DicNetwork& net, int samples, std::uint64_t seed, unsigned workers,
                           PruneRule rule) {
  if (samples < 1) throw std::invalid_argument("pruning needs at least one sample");
  std::vector<std::uint64_t> squares;
  const auto totals = gain_totals(net, samples, batch_key(seed, StreamTag::prune_batch), workers, nullptr, &squares);
  PruneResult out;
  out.rule = rule;
  const std::size_t n = net.node_count();
  const double r = samples;
  out.estimates.resize(n);
  out.standard_errors.resize(n);
  double variance_sum = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    const double m = static_cast<double>(totals[v]) / r;
    const double var = samples > 1 ? std::max(0.0, (static_cast<double>(squares[v]) - r * m * m) / (r - 1)) : 0.0;
    out.estimates[v] = m;
    out.standard_errors[v] = std::sqrt(var / r);
    variance_sum += var;
  }
  out.mean = std::accumulate(out.estimates.begin(), out.estimates.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double h : out.estimates) ss += (h - out.mean) * (h - out.mean);
  out.stddev = std::sqrt(ss / static_cast<double>(n));
  out.average_stddev = std::sqrt(variance_sum) / static_cast<double>(n);
  out.threshold = out.mean - (rule == PruneRule::population ? out.stddev : out.average_stddev);
  out.keep.resize(n);
  for (std::size_t v = 0; v < n; ++v) out.keep[v] = out.estimates[v] >= out.threshold ? 1 : 0;
  return out;
}

std::vector<NodeId> static_greedy_select(const DicNetwork& net, int budget, int samples, std::uint64_t seed,
                                         bool include_seed_failure, std::uint64_t* evaluations) {
  if (samples < 1) throw std::invalid_argument("greedy needs at least one sample");
  const DicNetwork mf = net.mean_field();
  const std::size_t n = mf.node_count();
  const std::uint64_t key = batch_key(seed, StreamTag::static_greedy);
  const auto R = static_cast<std::size_t>(samples);
  std::vector<std::uint8_t> covered(R * n, 0);
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t epoch = 0;
  std::vector<NodeId> queue;
  std::uint64_t evals = 0;

  auto takes = [&](std::size_t r, NodeId v) {
    const double p = mf.activation(v);
    if (!include_seed_failure || p >= 1.0) return true;
    return counter_uniform(key, r, seed_coordinate(v)) < p;
  };
  // Visits the part of v's live-edge reach not yet covered in sample r.
  auto explore = [&](std::size_t r, NodeId v, bool mark) {
    const std::uint8_t* cov = covered.data() + r * n;
    if (cov[v] || !takes(r, v)) return std::size_t{0};
    ++epoch;
    queue.clear();
    queue.push_back(v);
    stamp[v] = epoch;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      auto [begin, end] = mf.out_edges(queue[head]);
      for (EdgeId e = begin; e < end; ++e) {
        const NodeId w = mf.target(e);
        if (stamp[w] == epoch || cov[w]) continue;
        if (counter_uniform(key, r, live_coordinate(e)) < mf.distribution(e).value(0)) {
          stamp[w] = epoch;
          queue.push_back(w);
        }
      }
    }
    if (mark) {
      for (NodeId w : queue) covered[r * n + w] = 1;
    }
    return queue.size();
  };
  auto total_gain = [&](NodeId v) {
    ++evals;
    std::uint64_t t = 0;
    for (std::size_t r = 0; r < R; ++r) t += explore(r, v, false);
    return t;
  };

  struct Entry {
    std::uint64_t total;
    NodeId node;
    int stamp;
  };
  auto lower = [](const Entry& a, const Entry& b) {
    return a.total < b.total || (a.total == b.total && a.node > b.node);
  };
  std::vector<Entry> heap;
  for (NodeId v = 0; v < n; ++v) heap.push_back({total_gain(v), v, 0});
  std::make_heap(heap.begin(), heap.end(), lower);

  std::vector<NodeId> chosen;
  int round = 0;
  while (static_cast<int>(chosen.size()) < budget && !heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), lower);
    Entry top = heap.back();
    heap.pop_back();
    if (top.stamp != round) {
      top.total = total_gain(top.node);
      top.stamp = round;
      heap.push_back(top);
      std::push_heap(heap.begin(), heap.end(), lower);
      continue;
    }
    chosen.push_back(top.node);
    for (std::size_t r = 0; r < R; ++r) explore(r, top.node, true);
    ++round;
  }
  if (evaluations) *evaluations = evals;
  return chosen;
}

GreedySetup prepare_a_greedy(const DicNetwork& net, const StrategyParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  GreedySetup setup;
  setup.samples = params.samples;
  setup.key = batch_key(params.seed, StreamTag::gain_batch);
  setup.lazy = params.lazy;
  setup.initial_totals = std::make_shared<const std::vector<std::uint64_t>>(
      gain_totals(net, params.samples, setup.key, params.workers, nullptr));
  setup.precompute_ms = elapsed_ms(t0);
  return setup;
}

GreedySetup prepare_h_greedy(const DicNetwork& net, const StrategyParams& params, PruneResult* prune) {
  const auto t0 = std::chrono::steady_clock::now();
  PruneResult pr = h_greedy_prune(net, params.prune_samples, params.seed, params.workers, params.prune_rule);
  GreedySetup setup;
  setup.samples = params.samples;
  setup.key = batch_key(params.seed, StreamTag::gain_batch);
  setup.lazy = params.lazy;
  auto mask = std::make_shared<const std::vector<std::uint8_t>>(pr.keep);
  setup.initial_totals = std::make_shared<const std::vector<std::uint64_t>>(
      gain_totals(net, params.samples, setup.key, params.workers, mask.get()));
  setup.candidates = std::move(mask);
  setup.precompute_ms = elapsed_ms(t0);
  if (prune) *prune = std::move(pr);
  return setup;
}

PolicyFactory make_greedy_factory(GreedySetup setup) {
  return [setup = std::move(setup)](std::uint64_t) { return std::make_unique<AdaptiveGreedyPolicy>(setup); };
}

PolicyFactory make_random_factory(SeedingPattern pattern) {
  return [pattern = std::move(pattern)](std::uint64_t seed) { return std::make_unique<RandomPolicy>(pattern, seed); };
}

PolicyFactory make_seed_list_factory(std::vector<NodeId> seeds, SeedingPattern pattern) {
  return [seeds = std::move(seeds), pattern = std::move(pattern)](std::uint64_t) {
    return std::make_unique<SeedListPolicy>(seeds, pattern);
  };
}

}  // namespace dic
