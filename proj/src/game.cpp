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

#include "crowdiq/game.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <unordered_map>

#include "crowdiq/error.hpp"
#include "crowdiq/parallel.hpp"
#include "crowdiq/rng.hpp"
#include "crowdiq/scoring.hpp"

namespace crowdiq::game {

namespace {

constexpr std::size_t kHardExactCap = 30;
// Permutations per accumulation block. Fixed so that the floating point
// reduction order never depends on the thread count.
constexpr std::size_t kBlock = 64;

struct BitsHash {
  std::size_t operator()(const std::vector<std::uint64_t>& bits) const {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (const auto word : bits) h = mix64(h ^ word);
    return static_cast<std::size_t>(h);
  }
};

// Running mean / sum of squared deviations (Welford), mergeable (Chan et al.).
struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }
  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    const double d = o.mean - mean;
    mean += d * o.count / total;
    m2 += o.m2 + d * d * count * o.count / total;
    count = total;
  }
};

double empty_value(const ValueFunction& v, std::size_t n) {
  const double value = v(Coalition(n));
  if (value != 0.0) {
    throw InvalidArgument("value function must return 0 for the empty coalition");
  }
  return value;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Coalition

Coalition::Coalition(std::size_t players)
    : players_(players), bits_((players + 63) / 64, 0) {}

Coalition Coalition::of(std::size_t players, std::span<const std::size_t> members) {
  Coalition c(players);
  for (const auto i : members) c.add(i);
  return c;
}

void Coalition::add(std::size_t player) {
  if (player >= players_) {
    throw InvalidArgument("player " + std::to_string(player) +
                          " out of range (n=" + std::to_string(players_) + ")");
  }
  if (contains(player)) return;
  bits_[player / 64] |= std::uint64_t{1} << (player % 64);
  members_.insert(std::upper_bound(members_.begin(), members_.end(), player),
                  player);
}

bool Coalition::contains(std::size_t player) const {
  return player < players_ && ((bits_[player / 64] >> (player % 64)) & 1U) != 0;
}

// ---------------------------------------------------------------------------
// Shapley values

ShapleyReport exact_shapley(const ValueFunction& v, std::size_t n,
                            const ShapleyOptions& options) {
  if (n == 0) throw InvalidArgument("a game needs at least one player");
  const auto cap = std::min(options.max_exact_players, kHardExactCap);
  if (n > cap) {
    throw InvalidArgument("exact Shapley values are limited to " +
                          std::to_string(cap) + " players, got " +
                          std::to_string(n));
  }
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> value(subsets);
  parallel_for(subsets, options.threads, [&](std::size_t mask) {
    Coalition c(n);
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1U) c.add(i);
    }
    value[mask] = v(c);
  });
  if (value[0] != 0.0) {
    throw InvalidArgument("value function must return 0 for the empty coalition");
  }

  // weight[s] = s! (n-s-1)! / n! = 1 / (n * C(n-1, s))
  std::vector<double> weight(n);
  {
    double binom = 1.0;  // C(n-1, s)
    for (std::size_t s = 0; s < n; ++s) {
      weight[s] = 1.0 / (static_cast<double>(n) * binom);
      binom = binom * static_cast<double>(n - 1 - s) / static_cast<double>(s + 1);
    }
  }

  ShapleyReport report;
  report.values.assign(n, 0.0);
  report.std_errors.assign(n, 0.0);
  report.method = Exact{};
  report.value_of_grand_coalition = value[subsets - 1];
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double phi = 0.0;
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      phi += weight[size] * (value[mask | bit] - value[mask]);
    }
    report.values[i] = phi;
  }
  return report;
}

ShapleyReport mc_shapley(const ValueFunction& v, std::size_t n,
                         std::size_t samples, std::uint64_t seed,
                         const ShapleyOptions& options) {
  if (n == 0) throw InvalidArgument("a game needs at least one player");
  if (samples < 2) {
    throw InvalidArgument("Monte Carlo Shapley needs at least 2 samples, got " +
                          std::to_string(samples));
  }
  const double base = empty_value(v, n);
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::vector<Moments>> block_moments(blocks,
                                                  std::vector<Moments>(n));
  parallel_for(blocks, options.threads, [&](std::size_t b) {
    auto& moments = block_moments[b];
    std::vector<std::size_t> order(n);
    const auto end = std::min(samples, (b + 1) * kBlock);
    for (std::size_t p = b * kBlock; p < end; ++p) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng rng(derive_seed(seed, {p}));
      rng.shuffle(std::span(order));
      Coalition prefix(n);
      double previous = base;
      for (const auto player : order) {
        prefix.add(player);
        const double current = v(prefix);
        moments[player].add(current - previous);
        previous = current;
      }
    }
  });

  std::vector<Moments> total(n);
  for (const auto& block : block_moments) {
    for (std::size_t i = 0; i < n; ++i) total[i].merge(block[i]);
  }
  ShapleyReport report;
  report.method = MonteCarlo{samples, seed};
  report.values.resize(n);
  report.std_errors.resize(n);
  const double count = static_cast<double>(samples);
  for (std::size_t i = 0; i < n; ++i) {
    report.values[i] = total[i].mean;
    report.std_errors[i] = std::sqrt(total[i].m2 / (count - 1.0)) / std::sqrt(count);
  }
  std::vector<std::size_t> everyone(n);
  std::iota(everyone.begin(), everyone.end(), std::size_t{0});
  report.value_of_grand_coalition = v(Coalition::of(n, everyone));
  return report;
}

// ---------------------------------------------------------------------------
// Aggregate IQ game

struct AggregateIQGame::Cache {
  mutable std::shared_mutex mutex;
  std::unordered_map<std::vector<std::uint64_t>, double, BitsHash> values;
};

AggregateIQGame::AggregateIQGame(const ResponseMatrix& matrix,
                                 const AnswerKey& key, const ScoreTable& table,
                                 Aggregator aggregator, bool memoize)
    : matrix_(matrix),
      key_(key),
      table_(table),
      aggregator_(aggregator),
      memoize_(memoize),
      cache_(std::make_unique<Cache>()) {
  if (key.m() != matrix.m() || key.k() != matrix.k()) {
    throw InvalidArgument("answer key does not match the response matrix (m/k)");
  }
  if (table.m() != matrix.m()) {
    throw InvalidArgument("score table does not cover raw 0..m for m=" +
                          std::to_string(matrix.m()));
  }
}

AggregateIQGame::~AggregateIQGame() = default;

double AggregateIQGame::evaluate(const Coalition& coalition) const {
  const auto members = coalition.members();
  const Crowd crowd(std::vector<std::size_t>(members.begin(), members.end()),
                    matrix_.n());
  const auto output = aggregate(matrix_, crowd, aggregator_);
  return static_cast<double>(score(output.answers, key_, table_).iq);
}

double AggregateIQGame::operator()(const Coalition& coalition) const {
  if (coalition.players() != matrix_.n()) {
    throw InvalidArgument("coalition is over " +
                          std::to_string(coalition.players()) +
                          " players but the game has " +
                          std::to_string(matrix_.n()));
  }
  if (coalition.empty()) return 0.0;
  if (!memoize_) return evaluate(coalition);
  {
    std::shared_lock lock(cache_->mutex);
    const auto it = cache_->values.find(coalition.bits());
    if (it != cache_->values.end()) return it->second;
  }
  const double value = evaluate(coalition);
  std::unique_lock lock(cache_->mutex);
  cache_->values.emplace(coalition.bits(), value);
  return value;
}

std::size_t AggregateIQGame::cached_coalitions() const {
  std::shared_lock lock(cache_->mutex);
  return cache_->values.size();
}

ValueFunction AggregateIQGame::value_function() const {
  return [this](const Coalition& c) { return (*this)(c); };
}

ShapleyReport contextual_iq(const ResponseMatrix& matrix, const AnswerKey& key,
                            const ScoreTable& table, const Aggregator& aggregator,
                            const ShapleyMethod& method,
                            const ShapleyOptions& options) {
  const AggregateIQGame game(matrix, key, table, aggregator);
  const auto v = game.value_function();
  if (const auto* mc = std::get_if<MonteCarlo>(&method)) {
    return mc_shapley(v, matrix.n(), mc->samples, mc->seed, options);
  }
  return exact_shapley(v, matrix.n(), options);
}

std::string serialize_report(const ShapleyReport& report,
                             std::span<const std::string> participant_ids,
                             std::string_view extra_metadata) {
  if (participant_ids.size() != report.values.size()) {
    throw InvalidArgument("expected one participant id per Shapley value");
  }
  std::string out = "# method=";
  if (const auto* mc = std::get_if<MonteCarlo>(&report.method)) {
    out += "monte_carlo samples=" + std::to_string(mc->samples) +
           " seed=" + std::to_string(mc->seed);
  } else {
    out += "exact";
  }
  out += " value_of_grand_coalition=" + format_double(report.value_of_grand_coalition);
  if (!extra_metadata.empty()) {
    out += ' ';
    out += extra_metadata;
  }
  out += "\nparticipant_id,contextual_iq,std_error\n";
  for (std::size_t i = 0; i < report.values.size(); ++i) {
    out += participant_ids[i] + "," + format_double(report.values[i]) + "," +
           format_double(report.std_errors[i]) + "\n";
  }
  return out;
}

}  // namespace crowdiq::game
