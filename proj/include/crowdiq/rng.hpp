/*
 * Copyright 2026 The crowdiq Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Portable random streams. Every sampler here is written out explicitly so a
// given seed produces the same bits with any standard library; the
// distributions in <random> are implementation-defined.

#ifndef CROWDIQ_RNG_HPP_
#define CROWDIQ_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>

namespace crowdiq {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent stream seed from a master seed and a path of
// counters, e.g. derive_seed(seed, {kTagCell, participant, item}).
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path);

// xoshiro256** seeded through SplitMix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on {0, ..., bound-1}; bound > 0. Unbiased (rejection).
  std::uint64_t below(std::uint64_t bound);
  // Standard normal (Marsaglia polar method).
  double normal();
  // Gamma(shape, 1) by Marsaglia-Tsang; shape > 0.
  double gamma(double shape);
  // Beta(alpha, beta) via two gammas.
  double beta(double alpha, double beta);

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t s_[4];
};

}  // namespace crowdiq

#endif  // CROWDIQ_RNG_HPP_
