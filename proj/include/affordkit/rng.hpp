#pragma once

// Seeded PRNG for deterministic simulation. splitmix64 core: the output
// stream depends only on the 64-bit seed, with no platform- or
// libstdc++-version-dependent behavior (std::* distributions are not
// bit-stable across implementations).

#include <cmath>
#include <cstdint>
#include <string_view>

namespace affordkit {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Derives an independent stream seed from a base seed and extra parts.
// Used to key per-call RNG streams, e.g. hash(seed, image_id, phrase),
// so concurrent or reordered calls cannot change results.
inline std::uint64_t derive_seed(std::uint64_t base) { return base; }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t part, Rest... rest);
template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t base, std::string_view part, Rest... rest);

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t part, Rest... rest) {
  std::uint64_t s = base ^ (part + 0x9E3779B97F4A7C15ULL + (base << 6) + (base >> 2));
  splitmix64_next(s);
  return derive_seed(s, rest...);
}

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t base, std::string_view part, Rest... rest) {
  return derive_seed(base, fnv1a64(part), rest...);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  bool bernoulli(double p) { return uniform() < p; }

  // Knuth's product method; fine for the small rates used here.
  // Consumes exactly one draw when lambda == 0.
  int poisson(double lambda) {
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  // Box-Muller without caching the spare value, so every call consumes
  // exactly two draws and stream alignment stays predictable.
  double gaussian() {
    constexpr double kTau = 6.283185307179586476925286766559;
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTau * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace affordkit
