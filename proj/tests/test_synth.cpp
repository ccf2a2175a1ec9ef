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

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "crowdiq/error.hpp"
#include "crowdiq/rng.hpp"
#include "crowdiq/synth.hpp"
#include "doctest.h"

using namespace crowdiq;
using synth::SynthConfig;

TEST_CASE("rng: streams are reproducible and distinct") {
  Rng a(derive_seed(1, {2, 3}));
  Rng b(derive_seed(1, {2, 3}));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 50; ++i) {
    seeds.insert(derive_seed(7, {i}));
    seeds.insert(derive_seed(7, {i, 0}));
  }
  CHECK(seeds.size() == 100);
}

TEST_CASE("rng: uniform, below and beta behave") {
  Rng rng(42);
  double sum = 0.0;
  std::array<int, 7> hits{};
  for (int i = 0; i < 70000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    const auto b = rng.below(7);
    REQUIRE(b < 7);
    ++hits[b];
  }
  CHECK(sum / 70000 == doctest::Approx(0.5).epsilon(0.01));
  for (const int h : hits) CHECK(std::abs(h - 10000) < 500);

  // Beta(4,2): mean 2/3, variance 4*2/(36*7).
  double bsum = 0.0;
  double bsq = 0.0;
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) {
    const double x = rng.beta(4.0, 2.0);
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    bsum += x;
    bsq += x * x;
  }
  const double mean = bsum / draws;
  const double var = bsq / draws - mean * mean;
  CHECK(std::abs(mean - 2.0 / 3.0) < 0.005);
  CHECK(std::abs(var - 8.0 / 252.0) < 0.002);

  // Shape below one exercises the augmentation branch.
  double small = 0.0;
  for (int i = 0; i < draws; ++i) small += rng.beta(0.5, 0.5);
  CHECK(std::abs(small / draws - 0.5) < 0.01);
}

TEST_CASE("synth: fixed g=1 reproduces the key in every row") {
  SynthConfig config;
  config.n = 5;
  config.m = 10;
  config.k = 8;
  config.aptitude = synth::FixedAptitude{1.0};
  config.seed = 7;
  const auto data = synth::generate(config);
  for (std::size_t i = 0; i < 5; ++i) {
    for (int q = 0; q < 10; ++q) CHECK(data.responses.at(i, q) == data.key[q]);
  }
  CHECK(data.aptitudes == std::vector<double>(5, 1.0));
  CHECK(data.responses.participant_id(4) == "p5");
}

TEST_CASE("synth: fixed g=0 guesses uniformly (chi-square)") {
  SynthConfig config;
  config.n = 1;
  config.m = 10000;
  config.k = 8;
  config.aptitude = synth::FixedAptitude{0.0};
  config.seed = 3;
  const auto data = synth::generate(config);
  std::array<double, 8> counts{};
  for (int q = 0; q < config.m; ++q) ++counts[static_cast<std::size_t>(data.responses.at(0, q) - 1)];
  const double expected = config.m / 8.0;
  double chi2 = 0.0;
  for (const double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // Upper 0.001 quantile of chi-square with 7 degrees of freedom.
  CHECK(chi2 < 24.322);

  // Responses must also be independent of the key: agreement near 1/8.
  int agree = 0;
  for (int q = 0; q < config.m; ++q) agree += data.responses.at(0, q) == data.key[q];
  const double sd = std::sqrt(config.m * (1.0 / 8) * (7.0 / 8));
  CHECK(std::abs(agree - config.m / 8.0) < 4 * sd);
}

TEST_CASE("synth: agreement with the key converges to g + (1-g)/k") {
  for (const double g : {0.1, 0.45, 0.8}) {
    SynthConfig config;
    config.n = 50;
    config.m = 2000;
    config.k = 8;
    config.aptitude = synth::FixedAptitude{g};
    config.seed = 99;
    const auto data = synth::generate(config);
    long agree = 0;
    for (std::size_t i = 0; i < data.responses.n(); ++i) {
      for (int q = 0; q < config.m; ++q) agree += data.responses.at(i, q) == data.key[q];
    }
    const double cells = 50.0 * 2000.0;
    const double p = g + (1 - g) / 8;
    const double sd = std::sqrt(p * (1 - p) / cells);
    CHECK(std::abs(agree / cells - p) < 4 * sd);
  }
}

TEST_CASE("synth: deterministic in seed and independent of threads") {
  SynthConfig config;
  config.n = 30;
  config.m = 40;
  config.k = 5;
  config.aptitude = synth::BetaAptitude{2.0, 3.0};
  config.seed = 1234;
  const auto first = synth::generate(config);
  const auto second = synth::generate(config);
  config.threads = 8;
  const auto threaded = synth::generate(config);
  CHECK(first.responses == second.responses);
  CHECK(first.key == second.key);
  CHECK(first.aptitudes == second.aptitudes);
  CHECK(first.responses == threaded.responses);
  CHECK(first.aptitudes == threaded.aptitudes);
  config.seed = 1235;
  CHECK_FALSE(synth::generate(config).responses == first.responses);
}

TEST_CASE("synth: beta aptitudes follow the prior") {
  SynthConfig config;
  config.n = 4000;
  config.m = 1;
  config.aptitude = synth::BetaAptitude{4.0, 2.0};
  config.seed = 5;
  const auto data = synth::generate(config);
  double sum = 0.0;
  for (const double g : data.aptitudes) sum += g;
  const double sd = std::sqrt(8.0 / 252.0 / 4000.0);
  CHECK(std::abs(sum / 4000.0 - 2.0 / 3.0) < 4 * sd);
}

TEST_CASE("synth: explicit aptitudes and key are honoured") {
  const std::vector<int> key_codes{2, 2, 1};
  SynthConfig config;
  config.n = 2;
  config.m = 3;
  config.k = 2;
  config.aptitude = synth::ExplicitAptitudes{{1.0, 1.0}};
  config.key = AnswerKey(2, key_codes);
  const auto data = synth::generate(config);
  CHECK(data.key == *config.key);
  CHECK(data.responses.at(1, 0) == 2);
  CHECK(data.responses.at(1, 2) == 1);
}

TEST_CASE("synth: invalid configurations are rejected") {
  SynthConfig config;
  config.n = 0;
  CHECK_THROWS_AS(synth::generate(config), InvalidArgument);
  config.n = 1;
  config.k = 1;
  CHECK_THROWS_AS(synth::generate(config), InvalidArgument);
  config.k = 8;
  config.m = 0;
  CHECK_THROWS_AS(synth::generate(config), InvalidArgument);
  config.m = 4;
  config.aptitude = synth::FixedAptitude{1.5};
  CHECK_THROWS_AS(synth::generate(config), InvalidArgument);
  config.aptitude = synth::BetaAptitude{0.0, 1.0};
  CHECK_THROWS_AS(synth::generate(config), InvalidArgument);
  config.aptitude = synth::ExplicitAptitudes{{0.5, 0.5}};
  CHECK_THROWS_AS(synth::generate(config), InvalidArgument);
  config.aptitude = synth::FixedAptitude{0.5};
  const std::vector<int> short_key{1, 2};
  config.key = AnswerKey(8, short_key);
  CHECK_THROWS_AS(synth::generate(config), InvalidArgument);
}
