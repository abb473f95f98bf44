#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bashsynth {

// Reproducible randomness. std::mt19937_64 has a standardized output
// sequence, but the std distributions do not, so bounded draws and shuffles
// are done here to keep outputs identical across standard libraries.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // `count` distinct indices from [0, total), returned in ascending order.
  std::vector<std::size_t> sample_indices(std::size_t total, std::size_t count);

 private:
  std::mt19937_64 engine_;
};

// FNV-1a, 64 bit. Stable across runs and platforms.
std::uint64_t stable_hash(std::string_view text);
std::string to_hex(std::uint64_t value);
// Derives an independent stream seed from a base seed and a label.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

}  // namespace bashsynth
