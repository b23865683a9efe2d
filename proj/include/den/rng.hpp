/*
 * Copyright 2026 the den authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace den {

// Every random draw in this project goes through the SplitMix64 generator
// below. The standard library engines/distributions are avoided on purpose:
// their output is not pinned by the C++ standard, and reproducing the same
// corpus, split, and parameter init byte-for-byte across platforms is part
// of the contract (seeded runs must be bitwise repeatable).

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ull;

// Finalizer from SplitMix64.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// FNV-1a over bytes; used to derive per-name sub-seeds.
inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += kSplitMixGamma;
    return mix64(state_);
  }

  // Uniform in [0, 1) with 53 bits of precision. Exact dyadic rational,
  // so identical on every IEEE-754 platform.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  // Approximate standard normal as a sum of 12 uniforms minus 6
  // (Irwin-Hall). Uses only +/- so it stays bitwise reproducible; the
  // tails are clipped at +-6 which is irrelevant at this scale.
  double normal() {
    double acc = 0.0;
    for (int i = 0; i < 12; ++i) acc += next_double();
    return acc - 6.0;
  }

 private:
  std::uint64_t state_;
};

// Named sub-stream: decouples draws for one purpose from every other, so
// adding a parameter or reordering initialization does not shift streams.
inline SplitMix64 seeded_stream(std::uint64_t seed, std::string_view name) {
  return SplitMix64(mix64(seed ^ fnv1a64(name)));
}

// Fisher-Yates, documented as the canonical shuffle for splits and batches.
template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(v[i - 1], v[j]);
  }
}

}  // namespace den
