#pragma once

#include <cstdint>
#include <string_view>

namespace hearaug {

// Deterministic random number generator (xoshiro256**) with hand-rolled
// samplers. The standard <random> engines are portable but the
// distributions are not, and dataset generation promises bit-identical
// output across platforms, so all sampling code lives here.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  // Derives an independent substream from (master, stream_id, tag).
  // Used to give every dataset record its own reproducible stream that
  // does not depend on generation order.
  static Rng substream(uint64_t master, uint64_t stream_id,
                       std::string_view tag);

  uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller. Each call consumes two uniforms.
  double gaussian();

  // Uniform integer in [0, n). n must be > 0.
  std::size_t pick_index(std::size_t n);

  bool bernoulli(double p);

 private:
  uint64_t state_[4];
};

// SplitMix64 mixing step, exposed for stable hashing of stream tags.
uint64_t splitmix64(uint64_t& state);

// FNV-1a over a byte string, used to fold string tags into stream seeds.
uint64_t fnv1a64(std::string_view bytes, uint64_t basis = 0xcbf29ce484222325ull);

}  // namespace hearaug
