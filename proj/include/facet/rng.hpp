#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace facet {

// SplitMix64 (Steele/Lea/Flood). Every stochastic step in this project is
// driven by this generator so that splits, fold assignments, augmentation
// plans and synthetic predictions reproduce bit-for-bit from a seed, also
// across language ports. The update and output functions are fixed; do not
// swap in std::mt19937 or similar.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Plain modulo reduction: the bias for realistic n is
  // below 2^-40 and the reduction is trivially portable.
  std::uint64_t next_below(std::uint64_t n) { return n ? next() % n : 0; }

  // Uniform double in [0, 1), 53 mantissa bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  std::uint64_t state_;
};

// FNV-1a, used to derive stable per-label sub-seeds.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Sub-seed for a named stream: hash the label, fold in the base seed, then
// scramble once so labels differing in one bit do not yield nearby streams.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view label) {
  SplitMix64 mix(base_seed ^ fnv1a64(label));
  return mix.next();
}

// Fisher-Yates driven by SplitMix64; the loop direction (n-1 down to 1) is
// part of the reproducibility contract.
template <typename T>
void fisher_yates_shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace facet
