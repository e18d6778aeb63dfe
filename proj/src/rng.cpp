#include "hearaug/rng.hpp"

#include <cmath>
#include <numbers>

#include "hearaug/errors.hpp"

namespace hearaug {

uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint64_t fnv1a64(std::string_view bytes, uint64_t basis) {
  uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

Rng::Rng(uint64_t seed) {
  // Expand the seed through SplitMix64 as recommended for xoshiro seeding.
  uint64_t s = seed;
  for (auto& word : state_) word = splitmix64(s);
}

Rng Rng::substream(uint64_t master, uint64_t stream_id, std::string_view tag) {
  uint64_t h = fnv1a64(tag);
  uint64_t mix = master ^ (h + 0x9e3779b97f4a7c15ull);
  uint64_t s = mix;
  uint64_t a = splitmix64(s);
  s ^= stream_id * 0xd1342543de82ef95ull + 1;
  uint64_t b = splitmix64(s);
  return Rng(a ^ (b << 1 | b >> 63));
}

static inline uint64_t rotl(uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

uint64_t Rng::next_u64() {
  // xoshiro256**
  const uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double Rng::gaussian() {
  // Box-Muller; u1 shifted away from zero so the log is finite.
  double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::pick_index(std::size_t n) {
  if (n == 0) throw InvalidArgument("pick_index: empty range");
  auto idx = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return idx < n ? idx : n - 1;
}

bool Rng::bernoulli(double p) { return uniform() < p; }

}  // namespace hearaug
