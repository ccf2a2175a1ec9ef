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

// Study protocols over a population of questionnaires: crowd IQ as a function
// of crowd size, IQ-band subsamples, and contextual IQ under both
// aggregators. Tables serialize as CSV with a leading `#` metadata line.

#ifndef CROWDIQ_EXPERIMENTS_HPP_
#define CROWDIQ_EXPERIMENTS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crowdiq/aggregate.hpp"
#include "crowdiq/core.hpp"
#include "crowdiq/game.hpp"
#include "crowdiq/synth.hpp"

namespace crowdiq::experiments {

inline constexpr int kDefaultCrowdsPerSize = 300;

// IQ of each participant's own questionnaire.
std::vector<int> individual_iqs(const ResponseMatrix& matrix,
                                const AnswerKey& key, const ScoreTable& table);

// Pearson correlation; nullopt with fewer than two points or a constant
// series.
std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y);

// --- Crowd size sweep ------------------------------------------------------

struct SweepConfig {
  std::vector<int> sizes;
  int crowds_per_size = kDefaultCrowdsPerSize;
  std::uint64_t seed = 0;
  std::vector<Aggregator> aggregators = {Aggregator{}};
  unsigned threads = 1;
};

struct SweepRow {
  int size = 0;
  Method aggregator = Method::kMajority;
  double mean_crowd_iq = 0.0;
  std::optional<double> sd_crowd_iq;  // sample sd; nullopt when q == 1
  double mean_max_individual_iq = 0.0;
};

// Crowd c of size s is drawn without replacement from a stream derived from
// (seed, s, c); every aggregator is evaluated on the same crowds.
std::vector<SweepRow> crowd_size_sweep(const ResponseMatrix& matrix,
                                       const AnswerKey& key,
                                       const ScoreTable& table,
                                       const SweepConfig& config);

std::string sweep_to_csv(std::span<const SweepRow> rows,
                         const SweepConfig& config);

// The crowds the sweep uses for one size, in draw order (members sorted).
std::vector<std::vector<std::size_t>> sample_crowds(std::size_t n, int size,
                                                    int count,
                                                    std::uint64_t seed);

// --- IQ bands --------------------------------------------------------------

struct BandFilter {
  int low = 0;
  int high = 0;
};

struct BandSubsample {
  std::vector<std::size_t> retained;    // indices into the source matrix
  std::optional<ResponseMatrix> matrix;  // nullopt when nobody qualifies
};

BandSubsample band_subsample(const ResponseMatrix& matrix, const AnswerKey& key,
                             const ScoreTable& table, const BandFilter& filter);

// --- Contextual IQ ---------------------------------------------------------

struct ContextualSettings {
  game::ShapleyMethod method = game::MonteCarlo{};
  InferenceSettings ml;
  game::ShapleyOptions options;
};

struct ContextualRow {
  std::string participant_id;
  int individual_iq = 0;
  double contextual_iq_maj = 0.0;
  double contextual_iq_ml = 0.0;
};

struct ContextualComparison {
  std::vector<ContextualRow> rows;
  std::optional<double> pearson_individual_maj;
  std::optional<double> pearson_maj_ml;
  game::ShapleyReport maj;
  game::ShapleyReport ml;
};

ContextualComparison contextual_comparison(const ResponseMatrix& matrix,
                                           const AnswerKey& key,
                                           const ScoreTable& table,
                                           const ContextualSettings& settings);

std::string contextual_to_csv(const ContextualComparison& comparison,
                              const ContextualSettings& settings);

// --- Synthetic populations -------------------------------------------------

struct Calibration {
  synth::BetaAptitude prior;
  synth::SynthData data;
  double mean_raw = 0.0;
  double sd_raw = 0.0;
};

// Finds Beta aptitude parameters whose generated population (with this seed)
// has raw-score mean and sample sd closest to the targets. Starts from the
// moment-matched solution and refines on a grid around it.
Calibration calibrate_population(int n, int m, int k, double target_mean_raw,
                                 double target_sd_raw, std::uint64_t seed,
                                 unsigned threads = 1);

}  // namespace crowdiq::experiments

#endif  // CROWDIQ_EXPERIMENTS_HPP_
