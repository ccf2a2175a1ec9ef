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

#include "crowdiq/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "crowdiq/error.hpp"

namespace crowdiq {

int raw_score(const CodeSequence& answers, const AnswerKey& key) {
  if (answers.m() != key.m()) {
    throw InvalidArgument("answers cover " + std::to_string(answers.m()) +
                          " items but the key covers " + std::to_string(key.m()));
  }
  if (answers.k() != key.k()) {
    throw InvalidArgument("answers use k=" + std::to_string(answers.k()) +
                          " but the key uses k=" + std::to_string(key.k()));
  }
  int raw = 0;
  for (int q = 0; q < key.m(); ++q) raw += answers[q] == key[q] ? 1 : 0;
  return raw;
}

ScoreTable default_score_table(int m, double mean_raw, double sd_raw, int low,
                               int high) {
  if (m < 1) throw InvalidArgument("m must be >= 1");
  if (!(sd_raw > 0.0) || !std::isfinite(sd_raw)) {
    throw InvalidArgument("sd_raw must be positive");
  }
  if (!std::isfinite(mean_raw)) throw InvalidArgument("mean_raw must be finite");
  if (low >= high) throw InvalidArgument("clamp requires low < high");
  std::vector<int> iq(static_cast<std::size_t>(m) + 1);
  for (int r = 0; r <= m; ++r) {
    const double z = 100.0 + 15.0 * (r - mean_raw) / sd_raw;
    // std::lround rounds halfway cases away from zero.
    const double clamped = std::clamp(z, static_cast<double>(low),
                                      static_cast<double>(high));
    iq[static_cast<std::size_t>(r)] =
        std::clamp(static_cast<int>(std::lround(clamped)), low, high);
  }
  return ScoreTable(std::move(iq));
}

ScoredResult score(const CodeSequence& answers, const AnswerKey& key,
                   const ScoreTable& table) {
  const int raw = raw_score(answers, key);
  if (table.m() != key.m()) {
    throw InvalidArgument("score table covers raw 0.." +
                          std::to_string(table.m()) + " but the key has m=" +
                          std::to_string(key.m()));
  }
  return {raw, table.iq(raw)};
}

}  // namespace crowdiq
