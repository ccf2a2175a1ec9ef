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

// Shapley values of cooperative games, and the aggregate-IQ game whose value
// for a coalition C is the IQ of the questionnaire C's members produce
// together. A participant's Shapley value in that game is their contextual IQ:
// the expected gain in crowd IQ when they join the members preceding them in
// a uniformly random ordering.

#ifndef CROWDIQ_GAME_HPP_
#define CROWDIQ_GAME_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crowdiq/aggregate.hpp"
#include "crowdiq/core.hpp"

namespace crowdiq::game {

// A subset of players {0..n-1}. Members are kept sorted.
class Coalition {
 public:
  explicit Coalition(std::size_t players);
  static Coalition of(std::size_t players, std::span<const std::size_t> members);

  void add(std::size_t player);
  bool contains(std::size_t player) const;

  std::size_t players() const { return players_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::span<const std::size_t> members() const { return members_; }
  const std::vector<std::uint64_t>& bits() const { return bits_; }

  friend bool operator==(const Coalition& a, const Coalition& b) {
    return a.players_ == b.players_ && a.bits_ == b.bits_;
  }

 private:
  std::size_t players_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::size_t> members_;
};

// Must be deterministic and return 0 for the empty coalition.
using ValueFunction = std::function<double(const Coalition&)>;

struct Exact {};
struct MonteCarlo {
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
};
using ShapleyMethod = std::variant<Exact, MonteCarlo>;

inline constexpr std::size_t kDefaultExactCap = 12;

struct ShapleyOptions {
  std::size_t max_exact_players = kDefaultExactCap;
  unsigned threads = 1;
};

struct ShapleyReport {
  std::vector<double> values;      // contextual IQ points per player
  std::vector<double> std_errors;  // all zero for Exact
  ShapleyMethod method;
  double value_of_grand_coalition = 0.0;
};

// Subset-weighted form:
//   phi_i = sum_{S not containing i} |S|! (n-|S|-1)! / n! (v(S+i) - v(S)).
// Throws InvalidArgument when n exceeds options.max_exact_players.
ShapleyReport exact_shapley(const ValueFunction& v, std::size_t n,
                            const ShapleyOptions& options = {});

// Averages marginal contributions over `samples` uniformly random
// permutations. Each permutation walks its prefixes once and yields one
// marginal per player. Permutation p draws from a stream derived from
// (seed, p), so results do not depend on options.threads. Throws
// InvalidArgument if samples < 2.
ShapleyReport mc_shapley(const ValueFunction& v, std::size_t n,
                         std::size_t samples, std::uint64_t seed,
                         const ShapleyOptions& options = {});

// v(C) = IQ(aggregate of C's questionnaires), v({}) = 0. Coalition values
// are memoized; the cache is thread safe and never changes a value. The
// matrix, key and table are held by reference and must outlive the game.
class AggregateIQGame {
 public:
  AggregateIQGame(const ResponseMatrix& matrix, const AnswerKey& key,
                  const ScoreTable& table, Aggregator aggregator,
                  bool memoize = true);
  ~AggregateIQGame();
  AggregateIQGame(const AggregateIQGame&) = delete;
  AggregateIQGame& operator=(const AggregateIQGame&) = delete;

  double operator()(const Coalition& coalition) const;
  std::size_t players() const { return matrix_.n(); }
  std::size_t cached_coalitions() const;
  ValueFunction value_function() const;

 private:
  double evaluate(const Coalition& coalition) const;

  const ResponseMatrix& matrix_;
  const AnswerKey& key_;
  const ScoreTable& table_;
  Aggregator aggregator_;
  bool memoize_;
  struct Cache;
  std::unique_ptr<Cache> cache_;
};

ShapleyReport contextual_iq(const ResponseMatrix& matrix, const AnswerKey& key,
                            const ScoreTable& table, const Aggregator& aggregator,
                            const ShapleyMethod& method,
                            const ShapleyOptions& options = {});

// `# method=...` comment, then participant_id,contextual_iq,std_error rows.
// `extra_metadata` is appended verbatim to the comment line.
std::string serialize_report(const ShapleyReport& report,
                             std::span<const std::string> participant_ids,
                             std::string_view extra_metadata = {});

}  // namespace crowdiq::game

#endif  // CROWDIQ_GAME_HPP_
