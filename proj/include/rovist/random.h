#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace rovist {

// Seeded generator whose output is identical on every platform.
//
// Wraps std::mt19937_64, whose raw sequence is fixed by the standard. The
// standard distributions are implementation-defined, so bounded integers,
// uniforms and normals are derived here from raw 64-bit draws instead.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, bound) by rejection sampling. bound > 0.
  std::uint64_t Below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Standard normal via Box-Muller.
  double Normal();

  // In-place Fisher-Yates shuffle: for i = n-1 down to 1, swap(i, Below(i+1)).
  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// 64-bit FNV-1a. Used to key the stub backends by their input.
std::uint64_t Fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

// SplitMix64 finalizer; turns a counter or hash into a well-mixed word.
std::uint64_t SplitMix64(std::uint64_t x);

}  // namespace rovist
