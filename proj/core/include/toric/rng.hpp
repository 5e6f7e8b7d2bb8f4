#pragma once

#include <cstdint>
#include <random>

namespace toric {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of the `index`-th stream under `master`. Independent of how draws
/// are spread over workers.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix_seed(mix_seed(master) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 with platform-independent uniform variates (the standard
/// distributions are implementation-defined).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., count - 1}.
  std::uint64_t index(std::uint64_t count) {
    auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(count));
    return k < count ? k : count - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace toric
