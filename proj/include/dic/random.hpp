#pragma once

#include <cstdint>
#include <random>

namespace dic {

using Rng = std::mt19937_64;

/// Purpose tags keep substreams derived from one master seed independent.
enum class StreamTag : std::uint64_t {
  realization = 1,
  policy = 2,
  gain_batch = 3,
  prune_batch = 4,
  static_greedy = 5,
  generator = 6,
  property_trials = 7,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for replication `index` of the stream `tag` under `master`.
/// Depends only on its arguments, never on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, StreamTag tag);

/// Uniform double in [0, 1) with 53 random bits.
inline double unit_uniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) {
  return unit_uniform(rng) < p;
}

/// Counter-based uniform: a pure function of (key, sample, coordinate).
/// Lets many estimators read the same lazily materialized realization batch.
inline double counter_uniform(std::uint64_t key, std::uint64_t sample, std::uint64_t coordinate) {
  std::uint64_t h = mix64(key ^ mix64(sample + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ (coordinate * 0xd6e8feb86659fd93ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace dic
