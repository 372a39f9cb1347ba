// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <cstdint>
#include <span>

namespace datacase {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t v) {
  std::uint64_t s = v;
  return splitmix64(s);
}

// Deterministic generator with a fully specified algorithm, so streams
// are reproducible across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x853C49E6748FEA9BULL) {}

  std::uint64_t next() { return splitmix64(state_); }

  // Uniform in [0, n). Modulo bias is irrelevant at the sizes used here.
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  void fill(std::span<std::uint8_t> out) {
    size_t i = 0;
    while (i < out.size()) {
      std::uint64_t w = next();
      for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
        out[i] = static_cast<std::uint8_t>(w >> (8 * b));
      }
    }
  }

 private:
  std::uint64_t state_;
};

// XORs data with the keystream generated from seed. Applying twice with
// the same seed restores the original bytes.
inline void xor_keystream(std::span<std::uint8_t> data, std::uint64_t seed) {
  Rng rng(seed);
  size_t i = 0;
  while (i < data.size()) {
    std::uint64_t w = rng.next();
    for (int b = 0; b < 8 && i < data.size(); ++b, ++i) {
      data[i] ^= static_cast<std::uint8_t>(w >> (8 * b));
    }
  }
}

}  // namespace datacase
