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

#include "crowdiq/synth.hpp"

#include <cmath>
#include <string>

#include "crowdiq/error.hpp"
#include "crowdiq/parallel.hpp"
#include "crowdiq/rng.hpp"

namespace crowdiq::synth {

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kKeyStream = 1;
constexpr std::uint64_t kAptitudeStream = 2;
constexpr std::uint64_t kCellStream = 3;

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

void validate(const SynthConfig& config) {
  if (config.n < 1) throw InvalidArgument("n must be >= 1");
  if (config.m < 1) throw InvalidArgument("m must be >= 1");
  if (config.k < 2 || config.k > kMaxChoices) {
    throw InvalidArgument("k must be in 2.." + std::to_string(kMaxChoices));
  }
  if (const auto* fixed = std::get_if<FixedAptitude>(&config.aptitude)) {
    if (!is_probability(fixed->g)) {
      throw InvalidArgument("fixed aptitude must lie in [0,1]");
    }
  } else if (const auto* b = std::get_if<BetaAptitude>(&config.aptitude)) {
    if (!(b->alpha > 0.0) || !(b->beta > 0.0) || !std::isfinite(b->alpha) ||
        !std::isfinite(b->beta)) {
      throw InvalidArgument("beta aptitude parameters must be positive");
    }
  } else {
    const auto& g = std::get<ExplicitAptitudes>(config.aptitude).g;
    if (g.size() != static_cast<std::size_t>(config.n)) {
      throw InvalidArgument("explicit aptitudes: expected " +
                            std::to_string(config.n) + " values, got " +
                            std::to_string(g.size()));
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!is_probability(g[i])) {
        throw InvalidArgument("explicit aptitude " + std::to_string(i + 1) +
                              " outside [0,1]");
      }
    }
  }
  if (config.key && (config.key->m() != config.m || config.key->k() != config.k)) {
    throw InvalidArgument("explicit answer key does not match m/k");
  }
}

double draw_aptitude(const SynthConfig& config, std::size_t participant) {
  return std::visit(
      [&](const auto& spec) -> double {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, FixedAptitude>) {
          return spec.g;
        } else if constexpr (std::is_same_v<T, BetaAptitude>) {
          Rng rng(derive_seed(config.seed, {kAptitudeStream, participant}));
          return rng.beta(spec.alpha, spec.beta);
        } else {
          return spec.g[participant];
        }
      },
      config.aptitude);
}

}  // namespace

SynthData generate(const SynthConfig& config) {
  validate(config);
  const auto n = static_cast<std::size_t>(config.n);
  const auto m = static_cast<std::size_t>(config.m);
  const auto k = static_cast<std::uint64_t>(config.k);

  std::vector<int> key_codes(m);
  if (config.key) {
    for (std::size_t q = 0; q < m; ++q) key_codes[q] = (*config.key)[static_cast<int>(q)];
  } else {
    for (std::size_t q = 0; q < m; ++q) {
      Rng rng(derive_seed(config.seed, {kKeyStream, q}));
      key_codes[q] = static_cast<int>(rng.below(k)) + 1;
    }
  }

  std::vector<double> aptitudes(n);
  std::vector<int> codes(n * m);
  parallel_for(n, config.threads, [&](std::size_t i) {
    const double g = draw_aptitude(config, i);
    aptitudes[i] = g;
    for (std::size_t q = 0; q < m; ++q) {
      Rng rng(derive_seed(config.seed, {kCellStream, i, q}));
      const bool knows = rng.uniform() < g;
      codes[i * m + q] =
          knows ? key_codes[q] : static_cast<int>(rng.below(k)) + 1;
    }
  });

  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "p" + std::to_string(i + 1);
  return SynthData{
      ResponseMatrix::create(std::move(ids), config.m, config.k, codes),
      AnswerKey(config.k, key_codes), std::move(aptitudes)};
}

}  // namespace crowdiq::synth
