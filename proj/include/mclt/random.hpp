#pragma once

#include <cstdint>
#include <string_view>

namespace mclt {

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

/// The splitmix64 output function applied to an already-advanced state.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Reference splitmix64 step: advance the state by gamma and mix.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += kSplitMixGamma;
  return splitmix64_mix(state);
}

/// 64-bit FNV-1a of a short tag.
constexpr std::uint64_t hash64(std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : tag) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Child seed for stream `index` under `tag`: the (index+1)-th splitmix64
/// output starting from state master ^ hash64(tag). Advancing index+1 times
/// is a single multiply-add because splitmix64 is counter-based.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    std::string_view tag) {
  const std::uint64_t start = master ^ hash64(tag);
  return splitmix64_mix(start + (index + 1) * kSplitMixGamma);
}

/// Uniform on the open interval (0,1) from the top 52 bits; every value,
/// including the largest 1 - 2^-53, is exactly representable.
constexpr double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Sequential splitmix64 stream. Draw k (0-based) is a pure function of
/// (seed, k), so streams can be split without shared state.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next_u64() { return splitmix64_next(state_); }
  constexpr double uniform() { return to_unit_open(next_u64()); }
  double normal();

 private:
  std::uint64_t state_;
};

}  // namespace mclt
