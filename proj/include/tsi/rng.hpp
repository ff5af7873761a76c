// Copyright 2026 The tsi Authors.
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

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace tsi {

// Deterministic RNG. All randomness in the library goes through this wrapper:
// std::shuffle and the std distributions are implementation-defined, which
// would break byte-identical outputs for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Unbiased draw in [0, bound) via rejection sampling.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    const std::uint64_t min = (0 - bound) % bound;  // 2^64 mod bound
    std::uint64_t x = next();
    while (x < min) x = next();
    return x % bound;
  }

  std::size_t index(std::size_t size) { return static_cast<std::size_t>(below(size)); }

  // Uniform in [0, 1) with 53 random bits.
  double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Pairwise-disjoint random index subsets of the requested sizes, drawn from
// [0, population). Throws when the sizes cannot be satisfied.
inline std::vector<std::vector<std::size_t>> disjoint_index_samples(
    std::size_t population, const std::vector<std::size_t>& sizes, std::uint64_t seed) {
  std::size_t total = 0;
  for (std::size_t s : sizes) total += s;
  if (total > population) {
    throw std::runtime_error("disjoint_index_samples: requested " + std::to_string(total) +
                             " items from a population of " + std::to_string(population));
  }
  std::vector<std::size_t> perm(population);
  for (std::size_t i = 0; i < population; ++i) perm[i] = i;
  Rng rng(seed);
  rng.shuffle(perm);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(sizes.size());
  std::size_t at = 0;
  for (std::size_t s : sizes) {
    out.emplace_back(perm.begin() + at, perm.begin() + at + s);
    at += s;
  }
  return out;
}

}  // namespace tsi
