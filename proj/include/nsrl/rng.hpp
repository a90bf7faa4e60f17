// Copyright 2026 The nonstat-rl Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NSRL_RNG_HPP_
#define NSRL_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace nsrl {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t HashString(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return Mix64(h);
}

// Seeded generator whose outputs are fully specified by the standard
// (mt19937_64 raw draws plus our own conversions), so runs reproduce across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(Mix64(seed)) {}

  // Child stream keyed by an integer or a name; does not advance *this.
  Rng split(std::uint64_t key) const { return Rng(Mix64(seed_key() ^ Mix64(key))); }
  Rng split(std::string_view key) const { return split(HashString(key)); }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Inverse-CDF draw from weights that sum to (approximately) one. Falls
  // back to the last positive entry when rounding leaves u above the total.
  template <typename Weights>
  int categorical(const Weights& probs, int n) {
    const double u = uniform();
    double cumulative = 0.0;
    int last_positive = 0;
    for (int i = 0; i < n; ++i) {
      if (probs[i] > 0.0) last_positive = i;
      cumulative += probs[i];
      if (u < cumulative) return i;
    }
    return last_positive;
  }

  // Exp(1) draw, used for Dirichlet(1) rows.
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::uint64_t seed_key() const {
    std::mt19937_64 copy = engine_;
    return copy();
  }

  std::mt19937_64 engine_;
};

}  // namespace nsrl

#endif  // NSRL_RNG_HPP_
