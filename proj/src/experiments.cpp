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

#include "crowdiq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "crowdiq/error.hpp"
#include "crowdiq/parallel.hpp"
#include "crowdiq/rng.hpp"
#include "crowdiq/scoring.hpp"

namespace crowdiq::experiments {

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

std::string format_optional(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string();
}

std::string join_sizes(std::span<const int> sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(sizes[i]);
  }
  return out;
}

std::string method_label(const game::ShapleyMethod& method) {
  if (const auto* mc = std::get_if<game::MonteCarlo>(&method)) {
    return "monte_carlo samples=" + std::to_string(mc->samples) +
           " seed=" + std::to_string(mc->seed);
  }
  return "exact";
}

struct RawStats {
  double mean;
  double sd;
};

RawStats raw_stats(const synth::SynthData& data) {
  const auto n = data.responses.n();
  std::vector<double> raws(n);
  for (std::size_t i = 0; i < n; ++i) {
    raws[i] = raw_score(FilledQuestionnaire::from_row(data.responses, i), data.key);
  }
  const double mean = std::accumulate(raws.begin(), raws.end(), 0.0) / n;
  double ss = 0.0;
  for (const double r : raws) ss += (r - mean) * (r - mean);
  return {mean, n > 1 ? std::sqrt(ss / (n - 1)) : 0.0};
}

}  // namespace

std::vector<int> individual_iqs(const ResponseMatrix& matrix,
                                const AnswerKey& key, const ScoreTable& table) {
  std::vector<int> iqs(matrix.n());
  for (std::size_t i = 0; i < matrix.n(); ++i) {
    iqs[i] = score(FilledQuestionnaire::from_row(matrix, i), key, table).iq;
  }
  return iqs;
}

std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidArgument("pearson: series lengths differ");
  }
  const auto n = x.size();
  if (n < 2) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// Crowd size sweep

std::vector<std::vector<std::size_t>> sample_crowds(std::size_t n, int size,
                                                    int count,
                                                    std::uint64_t seed) {
  if (size < 1 || static_cast<std::size_t>(size) > n) {
    throw InvalidArgument("crowd size " + std::to_string(size) +
                          " outside 1..n (n=" + std::to_string(n) + ")");
  }
  if (count < 1) throw InvalidArgument("crowds per size must be >= 1");
  std::vector<std::vector<std::size_t>> crowds(static_cast<std::size_t>(count));
  std::vector<std::size_t> pool(n);
  for (int c = 0; c < count; ++c) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(size),
                               static_cast<std::uint64_t>(c)}));
    // Partial Fisher-Yates: the first `size` slots are a uniform s-subset.
    for (std::size_t i = 0; i < static_cast<std::size_t>(size); ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(pool[i], pool[j]);
    }
    auto& crowd = crowds[static_cast<std::size_t>(c)];
    crowd.assign(pool.begin(), pool.begin() + size);
    std::sort(crowd.begin(), crowd.end());
  }
  return crowds;
}

std::vector<SweepRow> crowd_size_sweep(const ResponseMatrix& matrix,
                                       const AnswerKey& key,
                                       const ScoreTable& table,
                                       const SweepConfig& config) {
  if (config.sizes.empty()) throw InvalidArgument("no crowd sizes given");
  if (config.aggregators.empty()) throw InvalidArgument("no aggregators given");
  if (config.crowds_per_size < 1) {
    throw InvalidArgument("crowds per size must be >= 1");
  }
  for (const int s : config.sizes) {
    if (s < 1 || static_cast<std::size_t>(s) > matrix.n()) {
      throw InvalidArgument("crowd size " + std::to_string(s) +
                            " outside 1..n (n=" + std::to_string(matrix.n()) +
                            ")");
    }
  }
  const auto individual = individual_iqs(matrix, key, table);
  const auto q = static_cast<std::size_t>(config.crowds_per_size);
  const auto aggregators = config.aggregators.size();

  std::vector<SweepRow> rows;
  for (const int size : config.sizes) {
    const auto crowds = sample_crowds(matrix.n(), size, config.crowds_per_size,
                                      config.seed);
    // [crowd][aggregator]
    std::vector<double> crowd_iq(q * aggregators);
    std::vector<double> max_iq(q);
    parallel_for(q, config.threads, [&](std::size_t c) {
      const Crowd crowd(crowds[c], matrix.n());
      int best = std::numeric_limits<int>::min();
      for (const auto i : crowd.members()) best = std::max(best, individual[i]);
      max_iq[c] = best;
      for (std::size_t a = 0; a < aggregators; ++a) {
        const auto out = aggregate(matrix, crowd, config.aggregators[a]);
        crowd_iq[c * aggregators + a] = score(out.answers, key, table).iq;
      }
    });
    const double mean_max = std::accumulate(max_iq.begin(), max_iq.end(), 0.0) / q;
    for (std::size_t a = 0; a < aggregators; ++a) {
      double sum = 0.0;
      for (std::size_t c = 0; c < q; ++c) sum += crowd_iq[c * aggregators + a];
      const double mean = sum / q;
      std::optional<double> sd;
      if (q > 1) {
        double ss = 0.0;
        for (std::size_t c = 0; c < q; ++c) {
          const double d = crowd_iq[c * aggregators + a] - mean;
          ss += d * d;
        }
        sd = std::sqrt(ss / (q - 1));
      }
      rows.push_back({size, config.aggregators[a].method, mean, sd, mean_max});
    }
  }
  return rows;
}

std::string sweep_to_csv(std::span<const SweepRow> rows,
                         const SweepConfig& config) {
  std::string aggregators;
  for (std::size_t a = 0; a < config.aggregators.size(); ++a) {
    if (a > 0) aggregators += ';';
    aggregators += method_name(config.aggregators[a].method);
  }
  std::string out = "# experiment=crowd-size seed=" + std::to_string(config.seed) +
                    " crowds_per_size=" + std::to_string(config.crowds_per_size) +
                    " sizes=" + join_sizes(config.sizes) +
                    " aggregators=" + aggregators + "\n";
  out += "size,aggregator,mean_crowd_iq,sd_crowd_iq,mean_max_individual_iq\n";
  for (const auto& row : rows) {
    out += std::to_string(row.size) + "," + std::string(method_name(row.aggregator)) +
           "," + format_double(row.mean_crowd_iq) + "," +
           format_optional(row.sd_crowd_iq) + "," +
           format_double(row.mean_max_individual_iq) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bands

BandSubsample band_subsample(const ResponseMatrix& matrix, const AnswerKey& key,
                             const ScoreTable& table, const BandFilter& filter) {
  if (filter.low > filter.high) {
    throw InvalidArgument("band requires low <= high");
  }
  BandSubsample out;
  const auto iqs = individual_iqs(matrix, key, table);
  for (std::size_t i = 0; i < iqs.size(); ++i) {
    if (iqs[i] >= filter.low && iqs[i] <= filter.high) out.retained.push_back(i);
  }
  if (!out.retained.empty()) out.matrix = matrix.select(out.retained);
  return out;
}

// ---------------------------------------------------------------------------
// Contextual IQ

ContextualComparison contextual_comparison(const ResponseMatrix& matrix,
                                           const AnswerKey& key,
                                           const ScoreTable& table,
                                           const ContextualSettings& settings) {
  ContextualComparison out;
  out.maj = game::contextual_iq(matrix, key, table, Aggregator{Method::kMajority, settings.ml},
                                settings.method, settings.options);
  out.ml = game::contextual_iq(matrix, key, table, Aggregator{Method::kModel, settings.ml},
                               settings.method, settings.options);
  const auto iqs = individual_iqs(matrix, key, table);
  std::vector<double> individual(iqs.begin(), iqs.end());
  for (std::size_t i = 0; i < matrix.n(); ++i) {
    out.rows.push_back({matrix.participant_id(i), iqs[i], out.maj.values[i],
                        out.ml.values[i]});
  }
  out.pearson_individual_maj = pearson(individual, out.maj.values);
  out.pearson_maj_ml = pearson(out.maj.values, out.ml.values);
  return out;
}

std::string contextual_to_csv(const ContextualComparison& comparison,
                              const ContextualSettings& settings) {
  std::string out = "# experiment=contextual method=" + method_label(settings.method) +
                    " pearson_individual_maj=" +
                    format_optional(comparison.pearson_individual_maj) +
                    " pearson_maj_ml=" + format_optional(comparison.pearson_maj_ml) +
                    "\n";
  out += "participant_id,individual_iq,contextual_iq_maj,contextual_iq_ml\n";
  for (const auto& row : comparison.rows) {
    out += row.participant_id + "," + std::to_string(row.individual_iq) + "," +
           format_double(row.contextual_iq_maj) + "," +
           format_double(row.contextual_iq_ml) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calibration

Calibration calibrate_population(int n, int m, int k, double target_mean_raw,
                                 double target_sd_raw, std::uint64_t seed,
                                 unsigned threads) {
  if (n < 2 || m < 1 || k < 2) throw InvalidArgument("calibration needs n >= 2, m >= 1, k >= 2");
  if (!(target_mean_raw > m / static_cast<double>(k)) || !(target_mean_raw < m)) {
    throw InvalidArgument("target mean raw score must lie in (m/k, m)");
  }
  if (!(target_sd_raw > 0.0)) throw InvalidArgument("target sd must be positive");

  // P(correct) = g + (1-g)/k, so with p = target_mean / m:
  //   E g = (p - 1/k) / (1 - 1/k)
  //   Var raw = m p (1-p) + m (m-1) Var p,   Var p = (1 - 1/k)^2 Var g
  const double scale = 1.0 - 1.0 / k;
  const double p = target_mean_raw / m;
  const double mean_g = (p - 1.0 / k) / scale;
  const double excess = (target_sd_raw * target_sd_raw - m * p * (1.0 - p)) /
                        (static_cast<double>(m) * (m - 1));
  const double floor_sd = 1e-3;
  const double sd_g = m > 1 && excess > 0.0 ? std::sqrt(excess) / scale : floor_sd;

  constexpr int kSteps = 10;  // grid is (2*kSteps+1)^2
  std::optional<Calibration> best;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int a = -kSteps; a <= kSteps; ++a) {
    for (int b = -kSteps; b <= kSteps; ++b) {
      const double mg = mean_g * (1.0 + 0.02 * a);
      const double sg = std::max(floor_sd, sd_g * (1.0 + 0.04 * b));
      if (!(mg > 0.0 && mg < 1.0)) continue;
      const double nu = mg * (1.0 - mg) / (sg * sg) - 1.0;
      if (!(nu > 0.0)) continue;
      const synth::BetaAptitude prior{mg * nu, (1.0 - mg) * nu};
      synth::SynthConfig config;
      config.n = n;
      config.m = m;
      config.k = k;
      config.aptitude = prior;
      config.seed = seed;
      config.threads = threads;
      auto data = synth::generate(config);
      const auto stats = raw_stats(data);
      const double loss = std::abs(stats.mean - target_mean_raw) +
                          std::abs(stats.sd - target_sd_raw);
      if (loss < best_loss) {
        best_loss = loss;
        best = Calibration{prior, std::move(data), stats.mean, stats.sd};
      }
    }
  }
  if (!best) throw InvalidArgument("no feasible aptitude prior for these targets");
  return std::move(*best);
}

}  // namespace crowdiq::experiments
