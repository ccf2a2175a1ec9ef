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

// Synthetic questionnaires from the know-or-guess model: participant i knows
// an item with probability g_i and answers it correctly, otherwise picks one
// of the k codes uniformly (possibly the correct one).

#ifndef CROWDIQ_SYNTH_HPP_
#define CROWDIQ_SYNTH_HPP_

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "crowdiq/core.hpp"

namespace crowdiq::synth {

struct FixedAptitude {
  double g = 0.5;
};

struct BetaAptitude {
  double alpha = 1.0;
  double beta = 1.0;
};

struct ExplicitAptitudes {
  std::vector<double> g;  // one per participant
};

using AptitudeSpec = std::variant<FixedAptitude, BetaAptitude, ExplicitAptitudes>;

struct SynthConfig {
  int n = 1;
  int m = kDefaultItems;
  int k = kDefaultChoices;
  AptitudeSpec aptitude = BetaAptitude{};
  std::uint64_t seed = 0;
  // nullopt: a uniformly random key.
  std::optional<AnswerKey> key;
  unsigned threads = 1;
};

struct SynthData {
  ResponseMatrix responses;
  AnswerKey key;
  std::vector<double> aptitudes;
};

// Throws InvalidArgument on a bad config. Output depends only on the config
// (and not on `threads`). Participant ids are p1..pn.
SynthData generate(const SynthConfig& config);

}  // namespace crowdiq::synth

#endif  // CROWDIQ_SYNTH_HPP_
