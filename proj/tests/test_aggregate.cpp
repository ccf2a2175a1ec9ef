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
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "crowdiq/aggregate.hpp"
#include "crowdiq/error.hpp"
#include "crowdiq/scoring.hpp"
#include "crowdiq/synth.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crowdiq;

namespace {

ResponseMatrix matrix_of(int k, const std::vector<std::vector<int>>& rows) {
  std::vector<int> codes;
  for (const auto& r : rows) codes.insert(codes.end(), r.begin(), r.end());
  return ResponseMatrix::create(oracle::ids(rows.size()),
                                static_cast<int>(rows.front().size()), k, codes);
}

std::vector<int> answers_of(const AggregationOutput& out) {
  return {out.answers.codes().begin(), out.answers.codes().end()};
}

ResponseMatrix random_matrix(std::mt19937_64& gen, int max_n, int max_m, int max_k) {
  const int n = std::uniform_int_distribution<int>(1, max_n)(gen);
  const int m = std::uniform_int_distribution<int>(1, max_m)(gen);
  const int k = std::uniform_int_distribution<int>(2, max_k)(gen);
  std::vector<int> codes(static_cast<std::size_t>(n * m));
  for (auto& c : codes) c = std::uniform_int_distribution<int>(1, k)(gen);
  return ResponseMatrix::create(oracle::ids(static_cast<std::size_t>(n)), m, k, codes);
}

}  // namespace

TEST_CASE("majority: examples") {
  const auto matrix = matrix_of(8, {{1, 2, 4}, {1, 5, 4}, {3, 2, 4}});
  CHECK(answers_of(aggregate_majority(matrix, Crowd::everyone(3))) ==
        std::vector<int>{1, 2, 4});
  const auto tie = matrix_of(8, {{2}, {5}});
  CHECK(answers_of(aggregate_majority(tie, Crowd::everyone(2)))[0] == 2);
  const auto tie_reversed = matrix_of(8, {{5}, {2}});
  CHECK(answers_of(aggregate_majority(tie_reversed, Crowd::everyone(2)))[0] == 2);
  const auto same = matrix_of(8, {{7, 1, 3}, {7, 1, 3}});
  const auto out = aggregate_majority(same, Crowd::everyone(2));
  CHECK(answers_of(out) == std::vector<int>{7, 1, 3});
  CHECK(out.method == Method::kMajority);
  CHECK_FALSE(out.inference.has_value());
}

TEST_CASE("majority: matches brute-force counting and ignores member order") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto matrix = random_matrix(gen, 9, 20, 8);
    std::vector<std::size_t> members(matrix.n());
    std::iota(members.begin(), members.end(), std::size_t{0});
    std::shuffle(members.begin(), members.end(), gen);
    members.resize(std::uniform_int_distribution<std::size_t>(1, matrix.n())(gen));
    const auto expected = oracle::majority(matrix, members);
    CHECK(answers_of(aggregate_majority(matrix, Crowd(members, matrix.n()))) == expected);
    std::reverse(members.begin(), members.end());
    CHECK(answers_of(aggregate_majority(matrix, Crowd(members, matrix.n()))) == expected);
  }
}

TEST_CASE("aggregators reject an empty crowd") {
  const auto matrix = matrix_of(8, {{1}});
  const Crowd empty({}, 1);
  CHECK_THROWS_AS(aggregate_majority(matrix, empty), InvalidArgument);
  CHECK_THROWS_AS(aggregate_ml(matrix, empty), InvalidArgument);
}

TEST_CASE("ml: invalid settings are rejected") {
  const auto matrix = matrix_of(8, {{1}});
  InferenceSettings s;
  s.prior_alpha = 0.0;
  CHECK_THROWS_AS(aggregate_ml(matrix, Crowd::everyone(1), s), InvalidArgument);
  s = {};
  s.tolerance = 0.0;
  CHECK_THROWS_AS(aggregate_ml(matrix, Crowd::everyone(1), s), InvalidArgument);
  s = {};
  s.max_iterations = 0;
  CHECK_THROWS_AS(aggregate_ml(matrix, Crowd::everyone(1), s), InvalidArgument);
}

TEST_CASE("ml: a single participant is reproduced") {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto matrix = random_matrix(gen, 1, 30, 8);
    const auto out = aggregate_ml(matrix, Crowd::everyone(1));
    const auto row = matrix.row(0);
    CHECK(answers_of(out) == std::vector<int>(row.begin(), row.end()));
  }
}

TEST_CASE("ml: unanimity dominates") {
  const auto matrix = matrix_of(8, {{4, 4, 1, 8}, {4, 4, 1, 8}, {4, 4, 1, 8}});
  CHECK(answers_of(aggregate_ml(matrix, Crowd::everyone(3))) == std::vector<int>{4, 4, 1, 8});
}

TEST_CASE("ml: inference result invariants") {
  synth::SynthConfig config;
  config.n = 12;
  config.m = 40;
  config.aptitude = synth::BetaAptitude{2.0, 2.0};
  config.seed = 17;
  const auto data = synth::generate(config);
  const auto out = aggregate_ml(data.responses, Crowd::everyone(12));
  REQUIRE(out.inference.has_value());
  const auto& inf = *out.inference;
  CHECK(inf.converged);
  CHECK(inf.iterations == static_cast<int>(inf.log_likelihood_trace.size()));
  for (int q = 0; q < config.m; ++q) {
    const auto mu = inf.posterior(q);
    CHECK(std::accumulate(mu.begin(), mu.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    const auto best = std::max_element(mu.begin(), mu.end()) - mu.begin() + 1;
    CHECK(out.answers[q] == best);
  }
  REQUIRE(inf.aptitudes.size() == 12);
  for (std::size_t j = 0; j < 12; ++j) {
    CHECK(inf.aptitudes[j] > 0.0);
    CHECK(inf.aptitudes[j] < 1.0);
    const auto [a, b] = inf.aptitude_pseudo_posteriors[j];
    CHECK(a + b == doctest::Approx(2.0 + config.m));
  }
  for (std::size_t t = 1; t < inf.log_likelihood_trace.size(); ++t) {
    CHECK(inf.log_likelihood_trace[t] >= inf.log_likelihood_trace[t - 1] - 1e-9);
  }
}

TEST_CASE("ml: trace equals an independently computed likelihood") {
  synth::SynthConfig config;
  config.n = 6;
  config.m = 15;
  config.k = 4;
  config.aptitude = synth::BetaAptitude{3.0, 2.0};
  config.seed = 8;
  const auto data = synth::generate(config);
  std::vector<std::size_t> members{5, 0, 3, 2};
  const Crowd crowd(members, data.responses.n());
  for (const auto& [alpha, beta] : {std::pair{1.0, 1.0}, std::pair{2.5, 1.5}}) {
    InferenceSettings s;
    s.prior_alpha = alpha;
    s.prior_beta = beta;
    s.tolerance = 1e-14;
    s.max_iterations = 30;
    const auto full = aggregate_ml(data.responses, crowd, s).inference->log_likelihood_trace;
    for (int t = 1; t <= 6; ++t) {
      // With t iterations the reported aptitudes are those of the t-th E-step.
      s.max_iterations = t;
      const auto partial = aggregate_ml(data.responses, crowd, s);
      const auto& g = partial.inference->aptitudes;
      const double expected = oracle::penalized_log_likelihood(data.responses, members, g, alpha, beta);
      CHECK(full[static_cast<std::size_t>(t - 1)] == doctest::Approx(expected).epsilon(1e-10));
      CHECK(penalized_log_likelihood(data.responses, crowd, g, s) ==
            doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("ml: likelihood is non-decreasing on random data and priors") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 60; ++trial) {
    const auto matrix = random_matrix(gen, 9, 25, 6);
    InferenceSettings s;
    s.prior_alpha = std::uniform_real_distribution<double>(0.5, 4.0)(gen);
    s.prior_beta = std::uniform_real_distribution<double>(0.5, 4.0)(gen);
    const auto out = aggregate_ml(matrix, Crowd::everyone(matrix.n()), s);
    const auto& trace = out.inference->log_likelihood_trace;
    for (std::size_t t = 1; t < trace.size(); ++t) {
      CHECK(trace[t] >= trace[t - 1] - 1e-9);
    }
    for (const double g : out.inference->aptitudes) {
      CHECK(g >= kAptitudeFloor);
      CHECK(g <= 1.0 - kAptitudeFloor);
    }
  }
}

TEST_CASE("ml: relabelling codes permutes posteriors and answers") {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto matrix = random_matrix(gen, 8, 15, 6);
    const int k = matrix.k();
    std::vector<int> sigma(static_cast<std::size_t>(k));
    std::iota(sigma.begin(), sigma.end(), 1);
    std::shuffle(sigma.begin(), sigma.end(), gen);
    std::vector<int> codes;
    for (std::size_t i = 0; i < matrix.n(); ++i) {
      for (const auto c : matrix.row(i)) codes.push_back(sigma[c - 1]);
    }
    const auto relabelled = ResponseMatrix::create(matrix.participant_ids(), matrix.m(), k, codes);
    const auto a = aggregate_ml(matrix, Crowd::everyone(matrix.n()));
    const auto b = aggregate_ml(relabelled, Crowd::everyone(matrix.n()));
    for (int q = 0; q < matrix.m(); ++q) {
      const auto mu_a = a.inference->posterior(q);
      const auto mu_b = b.inference->posterior(q);
      for (int c = 1; c <= k; ++c) {
        CHECK(mu_b[sigma[c - 1] - 1] == doctest::Approx(mu_a[c - 1]).epsilon(1e-6));
      }
      // Compare decoded answers only where the maximum is not a near tie.
      std::vector<double> sorted(mu_a.begin(), mu_a.end());
      std::sort(sorted.rbegin(), sorted.rend());
      if (sorted[0] - sorted[1] > 1e-6) CHECK(b.answers[q] == sigma[a.answers[q] - 1]);
    }
  }
}

TEST_CASE("ml: ties are broken toward the smallest code") {
  const auto tie = matrix_of(8, {{5, 3}, {2, 6}});
  CHECK(answers_of(aggregate_ml(tie, Crowd::everyone(2))) == std::vector<int>{2, 3});
}

TEST_CASE("ml: constructed three-participant case") {
  // A follows the key on items 1-11. B and C follow it on items 1-2 only and
  // agree with each other everywhere. A is wrong on item 12 as well.
  const std::vector<int> key_codes{1, 2, 3, 4, 5, 6, 7, 8, 1, 2, 3, 4};
  std::vector<int> a = key_codes;
  a[11] = 6;
  std::vector<int> bc{1, 2};
  for (int q = 2; q < 12; ++q) bc.push_back(key_codes[static_cast<std::size_t>(q)] % 8 + 1);
  const auto matrix = matrix_of(8, {a, bc, bc});
  const AnswerKey key(8, key_codes);
  const auto maj = aggregate_majority(matrix, Crowd::everyone(3));
  const auto ml = aggregate_ml(matrix, Crowd::everyone(3));
  CHECK(answers_of(maj) == bc);
  // B and C reinforce each other, so the model trusts them over A and neither
  // aggregator can recover items 3-12.
  CHECK(answers_of(ml) == bc);
  CHECK(raw_score(maj.answers, key) == 2);
  CHECK(raw_score(ml.answers, key) == 2);
  CHECK(ml.inference->aptitudes[0] < 0.2);
  CHECK(ml.inference->aptitudes[1] > 0.99);
}

TEST_CASE("ml: reliable minority outvotes a coinciding majority") {
  // Three members always answer correctly. Four others agree on the same
  // wrong code for items 1-5 and scatter over distinct wrong codes elsewhere.
  const int m = 20;
  std::vector<int> key_codes;
  for (int q = 0; q < m; ++q) key_codes.push_back(q % 8 + 1);
  std::vector<std::vector<int>> rows(3, key_codes);
  for (int j = 0; j < 4; ++j) {
    std::vector<int> row;
    for (int q = 0; q < m; ++q) {
      const int y = key_codes[static_cast<std::size_t>(q)];
      row.push_back(q < 5 ? y % 8 + 1 : (y + j) % 8 + 1);
    }
    rows.push_back(row);
  }
  const auto matrix = matrix_of(8, rows);
  const AnswerKey key(8, key_codes);
  const auto maj = aggregate_majority(matrix, Crowd::everyone(7));
  const auto ml = aggregate_ml(matrix, Crowd::everyone(7));
  CHECK(raw_score(maj.answers, key) == 15);
  CHECK(raw_score(ml.answers, key) == 20);
}

TEST_CASE("ml: aggregate dispatches on the method") {
  const auto matrix = matrix_of(8, {{1, 2}, {1, 3}, {4, 3}});
  Aggregator agg;
  CHECK(aggregate(matrix, Crowd::everyone(3), agg).method == Method::kMajority);
  agg.method = Method::kModel;
  const auto out = aggregate(matrix, Crowd::everyone(3), agg);
  CHECK(out.method == Method::kModel);
  CHECK(out.inference.has_value());
  CHECK(method_name(Method::kModel) == "ML");
  CHECK(method_name(Method::kMajority) == "MAJ");
}
