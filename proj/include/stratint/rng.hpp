#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace stratint {

// Seeding contract: (master_seed, stream_index) fully determines every draw of
// one stream. Distinct stream indices give disjoint blocks of the underlying
// SplitMix64 sequence, so streams never share state no matter how work is
// scheduled across threads.
struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

namespace detail {

inline constexpr std::uint64_t kSplitMix64Gamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 (Steele, Lea, Flood 2014). Used only to expand seeds.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t s) : state(s) {}

  std::uint64_t next() {
    std::uint64_t z = (state += kSplitMix64Gamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// xoshiro256++ 1.0 (Blackman, Vigna 2019).
class Xoshiro256PlusPlus {
 public:
  explicit Xoshiro256PlusPlus(RngSeed seed) {
    // Stream k reads the four SplitMix64 outputs at offsets 4k..4k+3 of the
    // sequence anchored at master_seed; the jump is a single wrap-around
    // multiply because SplitMix64 advances by a fixed gamma.
    SplitMix64 expander(seed.master_seed +
                        4 * seed.stream_index * kSplitMix64Gamma);
    for (auto& word : state_) word = expander.next();
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl64(state_[3], 45);
    return result;
  }

 private:
  std::uint64_t state_[4];
};

}  // namespace detail

// Deterministic variate stream. The generator is pinned by name so results
// stay replayable: changing any piece of the pipeline below requires bumping
// kGeneratorId.
class RandomStream {
 public:
  static constexpr std::string_view kGeneratorId =
      "splitmix64-xoshiro256pp-boxmuller/1";

  explicit RandomStream(RngSeed seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_.next(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_.next() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the sine mate is cached, so normals are
  // consumed in deterministic pairs.
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate) {
    if (!(rate > 0.0))
      throw std::invalid_argument("RandomStream::exponential: rate must be positive");
    return -std::log1p(-uniform()) / rate;
  }

  // Fair coin from the top bit.
  bool coin_flip() { return (engine_.next() >> 63) != 0; }

 private:
  detail::Xoshiro256PlusPlus engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace stratint
