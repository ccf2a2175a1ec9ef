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

// Aggregators turn a crowd's questionnaires into a single questionnaire.
//
// MAJ  per-item plurality vote; ties go to the smallest code.
// ML   maximum-posterior decoding under the know-or-guess model
//        P(r_iq = a | y_q, g_i) = g_i [a = y_q] + (1 - g_i) / k
//      with y_q ~ Uniform(1..k) and g_i ~ Beta(alpha, beta). Posteriors are
//      fitted by MAP expectation-maximization over the aptitudes, with the
//      correct answers and the know/guess indicators as latent variables.

#ifndef CROWDIQ_AGGREGATE_HPP_
#define CROWDIQ_AGGREGATE_HPP_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "crowdiq/core.hpp"

namespace crowdiq {

enum class Method { kMajority, kModel };

std::string_view method_name(Method method);  // "MAJ" / "ML"

struct InferenceSettings {
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
  double tolerance = 1e-8;  // on max |delta mu_q(a)| between iterations
  int max_iterations = 500;
};

// Aptitudes are kept inside [kAptitudeFloor, 1 - kAptitudeFloor].
inline constexpr double kAptitudeFloor = 1e-9;

struct InferenceResult {
  int k = 0;
  // m x k, row-major; entry [q*k + (a-1)] = mu_q(a).
  std::vector<double> item_posteriors;
  std::vector<double> aptitudes;  // one per crowd member, crowd order
  // Beta(alpha + sum_q w_iq, beta + m - sum_q w_iq) per crowd member.
  std::vector<std::pair<double, double>> aptitude_pseudo_posteriors;
  std::vector<double> log_likelihood_trace;  // penalized, one per E-step
  int iterations = 0;
  bool converged = false;

  std::span<const double> posterior(int item) const {
    return {item_posteriors.data() + static_cast<std::size_t>(item) * k,
            static_cast<std::size_t>(k)};
  }
};

struct AggregationOutput {
  FilledQuestionnaire answers;
  Method method;
  std::optional<InferenceResult> inference;  // present iff method == kModel
};

struct Aggregator {
  Method method = Method::kMajority;
  InferenceSettings settings;  // used by kModel only
};

// Throws InvalidArgument on an empty crowd.
AggregationOutput aggregate_majority(const ResponseMatrix& matrix,
                                     const Crowd& crowd);

// Throws InvalidArgument on an empty crowd or bad settings, NumericalError if
// a non-finite value appears.
AggregationOutput aggregate_ml(const ResponseMatrix& matrix, const Crowd& crowd,
                               const InferenceSettings& settings = {});

AggregationOutput aggregate(const ResponseMatrix& matrix, const Crowd& crowd,
                            const Aggregator& aggregator);

// Penalized observed-data log-likelihood of aptitudes g (crowd order), with
// each item's correct answer marginalized out:
//   sum_q log sum_y (1/k) prod_i P(r_iq | y, g_i)
//     + sum_i (alpha-1) log g_i + (beta-1) log(1-g_i)
double penalized_log_likelihood(const ResponseMatrix& matrix, const Crowd& crowd,
                                std::span<const double> aptitudes,
                                const InferenceSettings& settings = {});

}  // namespace crowdiq

#endif  // CROWDIQ_AGGREGATE_HPP_
