#pragma once

// Versioned random streams for the experiments. Changing anything here
// changes every published sweep, so bump kRngVersion when you do.
//
//   seed(base, dim, trial) = mix(mix(mix(base) ^ dim) ^ trial)
//   mix = SplitMix64 finalizer
//   stream = std::mt19937_64 seeded with that value
//   uniform01 = (next >> 11) * 2^-53                    in [0, 1)
//   uniform symmetric = 2 * uniform01 - 1               in [-1, 1)
//   normal = Box-Muller on (1 - uniform01, uniform01), cosine branch first

#include <cstdint>
#include <random>

namespace tnt {

inline constexpr int kRngVersion = 1;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t dim,
                                    std::uint64_t trial) noexcept {
  return splitmix64(splitmix64(splitmix64(base) ^ dim) ^ trial);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform_symmetric() { return 2.0 * uniform01() - 1.0; }
  double standard_normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tnt
