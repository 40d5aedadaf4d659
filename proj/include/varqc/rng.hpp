// Copyright 2026 The varqc Authors
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

#ifndef VARQC_RNG_HPP_
#define VARQC_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace varqc {

// splitmix64 step. Used to derive independent stream seeds from a master
// seed; mt19937_64 seeded from correlated integers would share state.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Mixes a master seed with stream identifiers into one 64-bit stream seed.
// Deterministic and order-sensitive.
inline std::uint64_t mix_seed(std::uint64_t seed,
                              std::initializer_list<std::uint64_t> stream) {
  std::uint64_t x = seed;
  std::uint64_t out = splitmix64(x);
  for (std::uint64_t s : stream) {
    x ^= s + 0x9e3779b97f4a7c15ULL;
    out = splitmix64(x);
  }
  return out;
}

// FNV-1a, for folding string tags into stream ids.
inline std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::mt19937_64 make_rng(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> stream) {
  return std::mt19937_64(mix_seed(seed, stream));
}

// Uniform double in [0, 1) with 53 random bits. Hand-rolled because
// std::uniform_real_distribution is not bit-reproducible across library
// implementations and reruns must produce byte-identical artifacts.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace varqc

#endif  // VARQC_RNG_HPP_
