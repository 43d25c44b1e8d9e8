#pragma once

#include <array>
#include <cstdint>

namespace osmix {

// Deterministic random stream: xoshiro256++ seeded through SplitMix64.
// The same seed yields a bit-identical sequence on every run of the same
// build, which is what makes simulation and fit outputs reproducible.
//
// Substreams derived with substream(id) are independent streams keyed on
// (seed, id). Each pipeline phase owns one substream, so e.g. extra
// analytics draws never perturb the MCMC chain.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  std::uint64_t seed() const { return seed_; }

  RngStream substream(std::uint64_t id) const {
    std::uint64_t s = seed_ ^ (0x9E3779B97F4A7C15ULL * (id + 1));
    return RngStream(splitmix64(s));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1): 53-bit grid offset by half a step,
  // so 0 and 1 are never returned and log(u), log(1-u) stay finite.
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
  std::uint64_t seed_;
};

}  // namespace osmix
