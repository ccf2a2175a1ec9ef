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

#include <algorithm>
#include <random>
#include <vector>

#include "crowdiq/error.hpp"
#include "crowdiq/scoring.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crowdiq;

TEST_CASE("scoring: reference constants") {
  CHECK(kDefaultMeanRaw == 36.04);
  CHECK(kDefaultSdRaw == 5.49);
  CHECK(kDefaultIqLow == 40);
  CHECK(kDefaultIqHigh == 160);
  CHECK(kDefaultItems == 60);
  CHECK(kDefaultChoices == 8);
}

TEST_CASE("scoring: raw score examples") {
  std::vector<int> key_codes(60);
  for (int q = 0; q < 60; ++q) key_codes[static_cast<std::size_t>(q)] = q % 8 + 1;
  const AnswerKey key(8, key_codes);
  CHECK(raw_score(FilledQuestionnaire(8, key_codes), key) == 60);
  std::vector<int> wrong = key_codes;
  for (auto& c : wrong) c = c % 8 + 1;
  CHECK(raw_score(FilledQuestionnaire(8, wrong), key) == 0);

  const std::vector<int> five_key{1, 2, 3, 4, 5};
  const std::vector<int> five_answers{1, 1, 3, 4, 1};
  CHECK(raw_score(FilledQuestionnaire(8, five_answers), AnswerKey(8, five_key)) == 3);
}

TEST_CASE("scoring: dimension mismatches are rejected") {
  const std::vector<int> two{1, 2};
  const std::vector<int> three{1, 2, 3};
  CHECK_THROWS_AS(raw_score(FilledQuestionnaire(8, two), AnswerKey(8, three)), InvalidArgument);
  CHECK_THROWS_AS(raw_score(FilledQuestionnaire(4, three), AnswerKey(8, three)), InvalidArgument);
  CHECK_THROWS_AS(score(FilledQuestionnaire(8, three), AnswerKey(8, three), default_score_table(60)),
                  InvalidArgument);
}

TEST_CASE("scoring: default table values") {
  const auto table = default_score_table();
  CHECK(table.m() == 60);
  CHECK(table.iq(36) == 100);   // 99.89 rounds to 100
  CHECK(table.iq(60) == 160);   // 165.46 clamps to 160
  CHECK(table.iq(0) == 40);     // 1.53 clamps to 40
  // Integral mean is a fixed point of the standardization.
  CHECK(default_score_table(60, 30.0, 5.0).iq(30) == 100);
  for (int r = 0; r <= 60; ++r) {
    CHECK(table.iq(r) == oracle::standardized_iq(r, 36.04, 5.49, 40, 160));
  }
}

TEST_CASE("scoring: rounding is half away from zero") {
  // 100 + 15 * (r - mean) / sd lands exactly on .5 for these parameters.
  const auto table = default_score_table(10, 0.0, 30.0, -1000, 1000);
  CHECK(table.iq(1) == 101);  // 100.5
  CHECK(table.iq(3) == 102);  // 101.5
  // Negative halves round away from zero too.
  const auto negative = default_score_table(10, 20.0, 2.0, -1000, 1000);
  CHECK(negative.iq(1) == -43);  // -42.5
  CHECK(negative.iq(3) == -28);  // -27.5
  CHECK(negative.iq(4) == -20);  // -20.0
}

TEST_CASE("scoring: default tables are monotone and total") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = std::uniform_int_distribution<int>(1, 100)(gen);
    const double mean = std::uniform_real_distribution<double>(0, m)(gen);
    const double sd = std::uniform_real_distribution<double>(0.1, 20)(gen);
    const auto table = default_score_table(m, mean, sd);
    REQUIRE(table.m() == m);
    for (int r = 0; r <= m; ++r) {
      CHECK(table.iq(r) == oracle::standardized_iq(r, mean, sd, 40, 160));
      if (r > 0) CHECK(table.iq(r) >= table.iq(r - 1));
    }
  }
}

TEST_CASE("scoring: invalid table parameters") {
  CHECK_THROWS_AS(default_score_table(0), InvalidArgument);
  CHECK_THROWS_AS(default_score_table(60, 36.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(default_score_table(60, 36.0, 5.0, 160, 40), InvalidArgument);
  CHECK_THROWS_AS(default_score_table(60, 36.0, 5.0, 100, 100), InvalidArgument);
}

TEST_CASE("scoring: score composes raw score and lookup") {
  std::vector<int> key_codes(60, 3);
  const AnswerKey key(8, key_codes);
  const auto table = default_score_table();
  CHECK(score(FilledQuestionnaire(8, key_codes), key, table) == ScoredResult{60, 160});
  CHECK(score(FilledQuestionnaire(8, std::vector<int>(60, 4)), key, table) == ScoredResult{0, 40});
  std::mt19937_64 gen(1);
  int last_raw = -1;
  int last_iq = -1;
  for (int raw = 0; raw <= 60; ++raw) {
    std::vector<int> answers(60, 4);
    for (int q = 0; q < raw; ++q) answers[static_cast<std::size_t>(q)] = 3;
    std::shuffle(answers.begin(), answers.end(), gen);
    const auto result = score(FilledQuestionnaire(8, answers), key, table);
    CHECK(result.raw == raw);
    CHECK(result.iq == table.iq(raw));
    CHECK(result.raw > last_raw);
    CHECK(result.iq >= last_iq);
    last_raw = result.raw;
    last_iq = result.iq;
  }
}
