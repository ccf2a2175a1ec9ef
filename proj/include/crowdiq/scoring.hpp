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

#ifndef CROWDIQ_SCORING_HPP_
#define CROWDIQ_SCORING_HPP_

#include "crowdiq/core.hpp"

namespace crowdiq {

// Norm statistics of the reference sample used for the default table.
inline constexpr double kDefaultMeanRaw = 36.04;
inline constexpr double kDefaultSdRaw = 5.49;
inline constexpr int kDefaultIqLow = 40;
inline constexpr int kDefaultIqHigh = 160;

struct ScoredResult {
  int raw = 0;
  int iq = 0;
  friend bool operator==(const ScoredResult&, const ScoredResult&) = default;
};

// Number of items where answers match the key. Throws InvalidArgument on an
// m or k mismatch.
int raw_score(const CodeSequence& answers, const AnswerKey& key);

// Linear standardization: iq(r) = round(100 + 15 (r - mean_raw) / sd_raw),
// rounded half away from zero and clamped to [low, high].
ScoreTable default_score_table(int m = kDefaultItems,
                               double mean_raw = kDefaultMeanRaw,
                               double sd_raw = kDefaultSdRaw,
                               int low = kDefaultIqLow,
                               int high = kDefaultIqHigh);

ScoredResult score(const CodeSequence& answers, const AnswerKey& key,
                   const ScoreTable& table);

}  // namespace crowdiq

#endif  // CROWDIQ_SCORING_HPP_
