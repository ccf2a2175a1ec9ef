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

#include "crowdiq/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "crowdiq/error.hpp"

namespace crowdiq {

namespace {

void require_members(const Crowd& crowd) {
  if (crowd.empty()) throw InvalidArgument("cannot aggregate an empty crowd");
}

void validate(const InferenceSettings& s) {
  if (!(s.prior_alpha > 0.0) || !(s.prior_beta > 0.0) ||
      !std::isfinite(s.prior_alpha) || !std::isfinite(s.prior_beta)) {
    throw InvalidArgument("aptitude prior parameters must be positive");
  }
  if (!(s.tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (s.max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
}

// First index of the maximum: the smallest code wins ties.
template <typename T>
int argmax_first(std::span<const T> values) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < values.size(); ++a) {
    if (values[a] > values[best]) best = a;
  }
  return static_cast<int>(best) + 1;
}

double log_prior(double g, const InferenceSettings& s) {
  return (s.prior_alpha - 1.0) * std::log(g) +
         (s.prior_beta - 1.0) * std::log1p(-g);
}

// Maximizer of (a) log g + (b) log(1-g) on the clamped interval. Interior
// stationary point when both weights are positive, otherwise an endpoint.
double map_aptitude(double a, double b) {
  constexpr double lo = kAptitudeFloor;
  constexpr double hi = 1.0 - kAptitudeFloor;
  if (a > 0.0 && b > 0.0) return std::clamp(a / (a + b), lo, hi);
  if (a <= 0.0 && b > 0.0) return lo;
  if (a > 0.0 && b <= 0.0) return hi;
  const auto objective = [&](double g) { return a * std::log(g) + b * std::log1p(-g); };
  return objective(lo) >= objective(hi) ? lo : hi;
}

class EmFit {
 public:
  EmFit(const ResponseMatrix& matrix, const Crowd& crowd,
        const InferenceSettings& settings)
      : matrix_(matrix),
        crowd_(crowd),
        settings_(settings),
        m_(static_cast<std::size_t>(matrix.m())),
        k_(static_cast<std::size_t>(matrix.k())),
        mu_(m_ * k_, 0.0),
        next_mu_(m_ * k_, 0.0),
        g_(crowd.size(), 0.5),
        by_item_(m_ * crowd.size()),
        scores_(k_) {
    const auto c = crowd.size();
    for (std::size_t j = 0; j < c; ++j) {
      const auto row = matrix.row(crowd[j]);
      for (std::size_t q = 0; q < m_; ++q) by_item_[q * c + j] = row[q] - 1;
    }
  }

  InferenceResult run() {
    InferenceResult result;
    result.k = static_cast<int>(k_);

    // Start from the empirical response frequencies and g = 0.5.
    const double share = 1.0 / static_cast<double>(crowd_.size());
    for (const auto i : crowd_.members()) {
      const auto row = matrix_.row(i);
      for (std::size_t q = 0; q < m_; ++q) mu_[q * k_ + row[q] - 1] += share;
    }
    maximize();

    for (int iter = 0; iter < settings_.max_iterations; ++iter) {
      const double ll = expect();
      result.log_likelihood_trace.push_back(ll);
      ++result.iterations;
      double delta = 0.0;
      for (std::size_t idx = 0; idx < mu_.size(); ++idx) {
        delta = std::max(delta, std::abs(next_mu_[idx] - mu_[idx]));
      }
      mu_.swap(next_mu_);
      if (delta < settings_.tolerance) {
        result.converged = true;
        break;
      }
      if (iter + 1 == settings_.max_iterations) break;
      maximize();
    }

    result.aptitudes = g_;
    result.aptitude_pseudo_posteriors.reserve(g_.size());
    for (std::size_t j = 0; j < g_.size(); ++j) {
      const double known = expected_known(j);
      result.aptitude_pseudo_posteriors.emplace_back(
          settings_.prior_alpha + known,
          settings_.prior_beta + static_cast<double>(m_) - known);
    }
    result.item_posteriors = mu_;
    return result;
  }

 private:
  // sum_q w_jq where w_jq = mu_q(r_jq) g_j / (g_j + (1-g_j)/k), the posterior
  // probability that member j knew item q.
  double expected_known(std::size_t j) const {
    const double g = g_[j];
    const double guess = (1.0 - g) / static_cast<double>(k_);
    const double share_known = g / (g + guess);
    const auto row = matrix_.row(crowd_[j]);
    double total = 0.0;
    for (std::size_t q = 0; q < m_; ++q) total += mu_[q * k_ + row[q] - 1];
    return share_known * total;
  }

  void maximize() {
    const double m = static_cast<double>(m_);
    for (std::size_t j = 0; j < g_.size(); ++j) {
      const double known = expected_known(j);
      g_[j] = map_aptitude(settings_.prior_alpha - 1.0 + known,
                           settings_.prior_beta - 1.0 + m - known);
    }
  }

  // Item posteriors into next_mu_ given g_; returns the penalized
  // log-likelihood of g_.
  double expect() {
    const double k = static_cast<double>(k_);
    double base = -static_cast<double>(m_) * std::log(k);  // uniform prior on y
    double penalty = 0.0;
    lift_.resize(g_.size());
    double guess_sum = 0.0;
    for (std::size_t j = 0; j < g_.size(); ++j) {
      const double g = g_[j];
      guess_sum += std::log1p(-g) - std::log(k);
      // log[(g + (1-g)/k) / ((1-g)/k)]
      lift_[j] = std::log1p(k * g / (1.0 - g));
      penalty += log_prior(g, settings_);
    }
    base += static_cast<double>(m_) * guess_sum;

    const auto c = g_.size();
    double total = 0.0;
    for (std::size_t q = 0; q < m_; ++q) {
      std::fill(scores_.begin(), scores_.end(), 0.0);
      const std::uint8_t* codes = by_item_.data() + q * c;
      for (std::size_t j = 0; j < c; ++j) scores_[codes[j]] += lift_[j];
      const double top = *std::max_element(scores_.begin(), scores_.end());
      // Codes nobody chose share one score of zero.
      const double unchosen = std::exp(-top);
      double* mu = next_mu_.data() + q * k_;
      double z = 0.0;
      for (std::size_t a = 0; a < k_; ++a) {
        const double e = scores_[a] == 0.0 ? unchosen : std::exp(scores_[a] - top);
        mu[a] = e;
        z += e;
      }
      const double inv = 1.0 / z;
      for (std::size_t a = 0; a < k_; ++a) mu[a] *= inv;
      total += top + std::log(z);
    }
    const double ll = base + total + penalty;
    if (!std::isfinite(ll)) {
      throw NumericalError("non-finite log-likelihood during inference");
    }
    return ll;
  }

  const ResponseMatrix& matrix_;
  const Crowd& crowd_;
  const InferenceSettings& settings_;
  std::size_t m_;
  std::size_t k_;
  std::vector<double> mu_;
  std::vector<double> next_mu_;
  std::vector<double> g_;
  std::vector<std::uint8_t> by_item_;  // [q * crowd + j], 0-based codes
  std::vector<double> lift_;
  std::vector<double> scores_;
};

}  // namespace

std::string_view method_name(Method method) {
  return method == Method::kMajority ? "MAJ" : "ML";
}

AggregationOutput aggregate_majority(const ResponseMatrix& matrix,
                                     const Crowd& crowd) {
  require_members(crowd);
  const auto m = static_cast<std::size_t>(matrix.m());
  const auto k = static_cast<std::size_t>(matrix.k());
  std::vector<int> counts(m * k, 0);
  for (const auto i : crowd.members()) {
    const auto row = matrix.row(i);
    for (std::size_t q = 0; q < m; ++q) ++counts[q * k + row[q] - 1];
  }
  std::vector<int> answers(m);
  for (std::size_t q = 0; q < m; ++q) {
    answers[q] = argmax_first(std::span<const int>(counts.data() + q * k, k));
  }
  return {FilledQuestionnaire(matrix.k(), answers), Method::kMajority,
          std::nullopt};
}

AggregationOutput aggregate_ml(const ResponseMatrix& matrix, const Crowd& crowd,
                               const InferenceSettings& settings) {
  require_members(crowd);
  validate(settings);
  auto inference = EmFit(matrix, crowd, settings).run();
  std::vector<int> answers(static_cast<std::size_t>(matrix.m()));
  for (int q = 0; q < matrix.m(); ++q) {
    answers[static_cast<std::size_t>(q)] = argmax_first(inference.posterior(q));
  }
  return {FilledQuestionnaire(matrix.k(), answers), Method::kModel,
          std::move(inference)};
}

AggregationOutput aggregate(const ResponseMatrix& matrix, const Crowd& crowd,
                            const Aggregator& aggregator) {
  return aggregator.method == Method::kMajority
             ? aggregate_majority(matrix, crowd)
             : aggregate_ml(matrix, crowd, aggregator.settings);
}

double penalized_log_likelihood(const ResponseMatrix& matrix, const Crowd& crowd,
                                std::span<const double> aptitudes,
                                const InferenceSettings& settings) {
  require_members(crowd);
  validate(settings);
  if (aptitudes.size() != crowd.size()) {
    throw InvalidArgument("expected one aptitude per crowd member");
  }
  const int k = matrix.k();
  double total = 0.0;
  std::vector<double> log_joint(static_cast<std::size_t>(k));
  for (int q = 0; q < matrix.m(); ++q) {
    for (int y = 1; y <= k; ++y) {
      double s = -std::log(static_cast<double>(k));
      for (std::size_t j = 0; j < crowd.size(); ++j) {
        const double g = aptitudes[j];
        const double p = (matrix.at(crowd[j], q) == y ? g : 0.0) + (1.0 - g) / k;
        s += std::log(p);
      }
      log_joint[static_cast<std::size_t>(y - 1)] = s;
    }
    const double top = *std::max_element(log_joint.begin(), log_joint.end());
    double z = 0.0;
    for (const double v : log_joint) z += std::exp(v - top);
    total += top + std::log(z);
  }
  for (const double g : aptitudes) total += log_prior(g, settings);
  return total;
}

}  // namespace crowdiq
