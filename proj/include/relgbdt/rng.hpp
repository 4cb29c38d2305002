#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace relgbdt {

// Deterministic random source. Wraps std::mt19937_64 (fully specified by the
// standard) and does its own value conversions, since std::uniform_*_distribution
// output is implementation-defined and would break byte-reproducibility promises.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1), 53 bits.
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection-free multiply-shift would bias for
  // huge n; masked rejection keeps it exact.
  uint64_t next_below(uint64_t n) {
    uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      uint64_t v = gen_() & mask;
      if (v < n) return v;
    }
  }

  // Moves a uniformly chosen k-subset to the front of `items` (partial
  // Fisher-Yates; order of the chosen prefix is random).
  template <typename T>
  void partial_shuffle(std::vector<T>& items, size_t k) {
    for (size_t i = 0; i < k && i + 1 < items.size(); ++i) {
      size_t j = i + static_cast<size_t>(next_below(items.size() - i));
      std::swap(items[i], items[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 finalizer; used to combine stream coordinates into seeds.
inline uint64_t mix_u64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class TrainPhase { forward = 0, backward = 1 };

// Independent per-(iteration, node, class, phase) stream so any prefix of a
// training run is reproducible in isolation.
inline Rng derive_rng(uint64_t seed, uint64_t iteration, uint64_t node,
                      uint64_t klass, TrainPhase phase) {
  uint64_t h = mix_u64(seed);
  h = mix_u64(h ^ (iteration + 1));
  h = mix_u64(h ^ (node + 1));
  h = mix_u64(h ^ (klass + 1));
  h = mix_u64(h ^ (static_cast<uint64_t>(phase) + 1));
  return Rng(h);
}

}  // namespace relgbdt
