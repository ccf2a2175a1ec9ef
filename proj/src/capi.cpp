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

#include "crowdiq/crowdiq.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "crowdiq/aggregate.hpp"
#include "crowdiq/core.hpp"
#include "crowdiq/error.hpp"
#include "crowdiq/experiments.hpp"
#include "crowdiq/game.hpp"
#include "crowdiq/scoring.hpp"
#include "crowdiq/synth.hpp"

struct ciq_responses {
  crowdiq::ResponseMatrix matrix;
};

struct ciq_codes {
  crowdiq::AnswerKey codes;
};

struct ciq_score_table {
  crowdiq::ScoreTable table;
};

struct ciq_aggregation {
  crowdiq::AggregationOutput output;
};

struct ciq_shapley_report {
  crowdiq::game::ShapleyReport report;
};

namespace {

thread_local std::string last_error;
std::atomic<unsigned> thread_setting{0};

ciq_status fail(ciq_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
ciq_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return CIQ_OK;
  } catch (const crowdiq::ValidationError& e) {
    return fail(CIQ_ERR_VALIDATION, e.what());
  } catch (const crowdiq::InvalidArgument& e) {
    return fail(CIQ_ERR_INVALID_ARGUMENT, e.what());
  } catch (const crowdiq::NumericalError& e) {
    return fail(CIQ_ERR_NUMERICAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CIQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CIQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CIQ_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw crowdiq::InvalidArgument(std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

crowdiq::InferenceSettings to_settings(const ciq_ml_settings* ml) {
  crowdiq::InferenceSettings s;
  if (ml != nullptr) {
    s.prior_alpha = ml->prior_alpha;
    s.prior_beta = ml->prior_beta;
    s.tolerance = ml->tolerance;
    s.max_iterations = ml->max_iterations;
  }
  return s;
}

crowdiq::Method to_method(ciq_method method) {
  switch (method) {
    case CIQ_METHOD_MAJ:
      return crowdiq::Method::kMajority;
    case CIQ_METHOD_ML:
      return crowdiq::Method::kModel;
  }
  throw crowdiq::InvalidArgument("unknown aggregation method");
}

crowdiq::game::ShapleyMethod to_shapley_method(const ciq_shapley_settings& s) {
  if (s.monte_carlo) return crowdiq::game::MonteCarlo{s.samples, s.seed};
  return crowdiq::game::Exact{};
}

crowdiq::game::ShapleyOptions to_shapley_options(const ciq_shapley_settings& s) {
  return {s.max_exact_players, thread_setting.load()};
}

ciq_shapley_settings shapley_defaults() {
  ciq_shapley_settings s;
  ciq_shapley_settings_init(&s);
  return s;
}

std::string_view as_view(const char* text, size_t length) {
  return text == nullptr ? std::string_view() : std::string_view(text, length);
}

void check_inputs(const ciq_responses* r, const ciq_codes* key,
                  const ciq_score_table* table) {
  require(r, "responses");
  require(key, "key");
  require(table, "score table");
}

}  // namespace

extern "C" {

const char* ciq_version(void) { return "0.1.0"; }

const char* ciq_last_error(void) { return last_error.c_str(); }

void ciq_string_free(char* text) { std::free(text); }

void ciq_set_threads(unsigned threads) { thread_setting = threads; }

unsigned ciq_get_threads(void) { return thread_setting.load(); }

// ---- Responses -------------------------------------------------------------

ciq_status ciq_responses_parse(const char* text, size_t length,
                               ciq_responses** out) {
  return guarded([&] {
    require(out, "out");
    if (text == nullptr && length > 0) require(text, "text");
    auto matrix = crowdiq::parse_responses(as_view(text, length));
    *out = new ciq_responses{std::move(matrix)};
  });
}

ciq_status ciq_responses_create(size_t n, int m, int k, const char* const* ids,
                                const int* codes, ciq_responses** out) {
  return guarded([&] {
    require(out, "out");
    require(ids, "ids");
    require(codes, "codes");
    if (m < 1) throw crowdiq::InvalidArgument("m must be >= 1");
    std::vector<std::string> names;
    for (size_t i = 0; i < n; ++i) {
      require(ids[i], "participant id");
      names.emplace_back(ids[i]);
    }
    auto matrix = crowdiq::ResponseMatrix::create(
        std::move(names), m, k, std::span<const int>(codes, n * static_cast<size_t>(m)));
    *out = new ciq_responses{std::move(matrix)};
  });
}

ciq_status ciq_responses_serialize(const ciq_responses* responses,
                                   char** out_text) {
  return guarded([&] {
    require(responses, "responses");
    require(out_text, "out_text");
    *out_text = copy_string(crowdiq::serialize_responses(responses->matrix));
  });
}

void ciq_responses_free(ciq_responses* responses) { delete responses; }

size_t ciq_responses_n(const ciq_responses* r) { return r ? r->matrix.n() : 0; }
int ciq_responses_m(const ciq_responses* r) { return r ? r->matrix.m() : 0; }
int ciq_responses_k(const ciq_responses* r) { return r ? r->matrix.k() : 0; }

int ciq_responses_code(const ciq_responses* r, size_t participant, int item) {
  if (r == nullptr || participant >= r->matrix.n() || item < 0 ||
      item >= r->matrix.m()) {
    return 0;
  }
  return r->matrix.at(participant, item);
}

const char* ciq_responses_id(const ciq_responses* r, size_t participant) {
  if (r == nullptr || participant >= r->matrix.n()) return nullptr;
  return r->matrix.participant_id(participant).c_str();
}

// ---- Codes -----------------------------------------------------------------

ciq_status ciq_codes_parse(const char* text, size_t length, int k,
                           ciq_codes** out) {
  return guarded([&] {
    require(out, "out");
    if (text == nullptr && length > 0) require(text, "text");
    auto key = crowdiq::parse_answer_key(
        as_view(text, length), k > 0 ? std::optional<int>(k) : std::nullopt);
    *out = new ciq_codes{std::move(key)};
  });
}

ciq_status ciq_codes_create(int k, const int* codes, int m, ciq_codes** out) {
  return guarded([&] {
    require(out, "out");
    require(codes, "codes");
    if (m < 1) throw crowdiq::InvalidArgument("m must be >= 1");
    *out = new ciq_codes{crowdiq::AnswerKey(
        k, std::span<const int>(codes, static_cast<size_t>(m)))};
  });
}

ciq_status ciq_codes_serialize(const ciq_codes* codes, char** out_text) {
  return guarded([&] {
    require(codes, "codes");
    require(out_text, "out_text");
    *out_text = copy_string(crowdiq::serialize_answer_key(codes->codes));
  });
}

void ciq_codes_free(ciq_codes* codes) { delete codes; }
int ciq_codes_m(const ciq_codes* c) { return c ? c->codes.m() : 0; }
int ciq_codes_k(const ciq_codes* c) { return c ? c->codes.k() : 0; }

int ciq_codes_get(const ciq_codes* c, int item) {
  if (c == nullptr || item < 0 || item >= c->codes.m()) return 0;
  return c->codes[item];
}

// ---- Score tables ----------------------------------------------------------

ciq_status ciq_score_table_parse(const char* text, size_t length, int m,
                                 ciq_score_table** out) {
  return guarded([&] {
    require(out, "out");
    if (text == nullptr && length > 0) require(text, "text");
    auto table = crowdiq::parse_score_table(
        as_view(text, length), m > 0 ? std::optional<int>(m) : std::nullopt);
    *out = new ciq_score_table{std::move(table)};
  });
}

ciq_status ciq_score_table_default(int m, double mean_raw, double sd_raw, int low,
                                   int high, ciq_score_table** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ciq_score_table{
        crowdiq::default_score_table(m, mean_raw, sd_raw, low, high)};
  });
}

ciq_status ciq_score_table_serialize(const ciq_score_table* table,
                                     char** out_text) {
  return guarded([&] {
    require(table, "score table");
    require(out_text, "out_text");
    *out_text = copy_string(crowdiq::serialize_score_table(table->table));
  });
}

void ciq_score_table_free(ciq_score_table* table) { delete table; }
int ciq_score_table_m(const ciq_score_table* t) { return t ? t->table.m() : 0; }

int ciq_score_table_iq(const ciq_score_table* t, int raw) {
  if (t == nullptr || raw < 0 || raw > t->table.m()) return 0;
  return t->table.iq(raw);
}

// ---- Synthetic data --------------------------------------------------------

void ciq_synth_config_init(ciq_synth_config* config) {
  if (config == nullptr) return;
  config->n = 1;
  config->m = crowdiq::kDefaultItems;
  config->k = crowdiq::kDefaultChoices;
  config->aptitude = CIQ_APTITUDE_BETA;
  config->fixed_g = 0.5;
  config->alpha = 1.0;
  config->beta = 1.0;
  config->explicit_g = nullptr;
  config->seed = 0;
  config->key = nullptr;
}

ciq_status ciq_generate(const ciq_synth_config* config,
                        ciq_responses** out_responses, ciq_codes** out_key,
                        double* out_aptitudes) {
  return guarded([&] {
    require(config, "config");
    require(out_responses, "out_responses");
    require(out_key, "out_key");
    crowdiq::synth::SynthConfig c;
    c.n = config->n;
    c.m = config->m;
    c.k = config->k;
    c.seed = config->seed;
    c.threads = thread_setting.load();
    switch (config->aptitude) {
      case CIQ_APTITUDE_FIXED:
        c.aptitude = crowdiq::synth::FixedAptitude{config->fixed_g};
        break;
      case CIQ_APTITUDE_BETA:
        c.aptitude = crowdiq::synth::BetaAptitude{config->alpha, config->beta};
        break;
      case CIQ_APTITUDE_EXPLICIT: {
        require(config->explicit_g, "explicit_g");
        if (config->n < 1) throw crowdiq::InvalidArgument("n must be >= 1");
        c.aptitude = crowdiq::synth::ExplicitAptitudes{std::vector<double>(
            config->explicit_g, config->explicit_g + config->n)};
        break;
      }
      default:
        throw crowdiq::InvalidArgument("unknown aptitude kind");
    }
    if (config->key != nullptr) c.key = config->key->codes;
    auto data = crowdiq::synth::generate(c);
    auto responses = std::make_unique<ciq_responses>(ciq_responses{std::move(data.responses)});
    auto key = std::make_unique<ciq_codes>(ciq_codes{std::move(data.key)});
    if (out_aptitudes != nullptr) {
      std::copy(data.aptitudes.begin(), data.aptitudes.end(), out_aptitudes);
    }
    *out_responses = responses.release();
    *out_key = key.release();
  });
}

// ---- Aggregation -----------------------------------------------------------

void ciq_ml_settings_init(ciq_ml_settings* settings) {
  if (settings == nullptr) return;
  const crowdiq::InferenceSettings d;
  settings->prior_alpha = d.prior_alpha;
  settings->prior_beta = d.prior_beta;
  settings->tolerance = d.tolerance;
  settings->max_iterations = d.max_iterations;
}

ciq_status ciq_aggregate(const ciq_responses* responses, const size_t* crowd,
                         size_t crowd_size, ciq_method method,
                         const ciq_ml_settings* settings, ciq_aggregation** out) {
  return guarded([&] {
    require(responses, "responses");
    require(out, "out");
    const auto& matrix = responses->matrix;
    const auto members =
        crowd == nullptr ? crowdiq::Crowd::everyone(matrix.n())
                         : crowdiq::Crowd(std::vector<size_t>(crowd, crowd + crowd_size),
                                          matrix.n());
    const crowdiq::Aggregator aggregator{to_method(method), to_settings(settings)};
    *out = new ciq_aggregation{crowdiq::aggregate(matrix, members, aggregator)};
  });
}

void ciq_aggregation_free(ciq_aggregation* aggregation) { delete aggregation; }

ciq_status ciq_aggregation_answers(const ciq_aggregation* aggregation,
                                   ciq_codes** out) {
  return guarded([&] {
    require(aggregation, "aggregation");
    require(out, "out");
    const auto& answers = aggregation->output.answers;
    std::vector<int> codes(answers.codes().begin(), answers.codes().end());
    *out = new ciq_codes{crowdiq::AnswerKey(answers.k(), codes)};
  });
}

int ciq_aggregation_iterations(const ciq_aggregation* a) {
  return a && a->output.inference ? a->output.inference->iterations : 0;
}

int ciq_aggregation_converged(const ciq_aggregation* a) {
  return a && a->output.inference && a->output.inference->converged ? 1 : 0;
}

size_t ciq_aggregation_trace_length(const ciq_aggregation* a) {
  return a && a->output.inference ? a->output.inference->log_likelihood_trace.size()
                                  : 0;
}

double ciq_aggregation_trace(const ciq_aggregation* a, size_t iteration) {
  if (a == nullptr || !a->output.inference ||
      iteration >= a->output.inference->log_likelihood_trace.size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return a->output.inference->log_likelihood_trace[iteration];
}

double ciq_aggregation_posterior(const ciq_aggregation* a, int item, int code) {
  if (a == nullptr || !a->output.inference) return std::numeric_limits<double>::quiet_NaN();
  const auto& inf = *a->output.inference;
  if (item < 0 || item >= a->output.answers.m() || code < 1 || code > inf.k) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return inf.posterior(item)[static_cast<size_t>(code - 1)];
}

double ciq_aggregation_aptitude(const ciq_aggregation* a, size_t member) {
  if (a == nullptr || !a->output.inference ||
      member >= a->output.inference->aptitudes.size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return a->output.inference->aptitudes[member];
}

// ---- Scoring ---------------------------------------------------------------

ciq_status ciq_score(const ciq_codes* answers, const ciq_codes* key,
                     const ciq_score_table* table, int* out_raw, int* out_iq) {
  return guarded([&] {
    require(answers, "answers");
    require(key, "key");
    require(table, "score table");
    const auto result = crowdiq::score(answers->codes, key->codes, table->table);
    if (out_raw != nullptr) *out_raw = result.raw;
    if (out_iq != nullptr) *out_iq = result.iq;
  });
}

// ---- Contextual IQ ---------------------------------------------------------

void ciq_shapley_settings_init(ciq_shapley_settings* settings) {
  if (settings == nullptr) return;
  settings->monte_carlo = 1;
  settings->samples = crowdiq::game::MonteCarlo{}.samples;
  settings->seed = 0;
  settings->max_exact_players = crowdiq::game::kDefaultExactCap;
}

ciq_status ciq_contextual_iq(const ciq_responses* responses, const ciq_codes* key,
                             const ciq_score_table* table, ciq_method aggregator,
                             const ciq_ml_settings* ml,
                             const ciq_shapley_settings* settings,
                             ciq_shapley_report** out) {
  return guarded([&] {
    check_inputs(responses, key, table);
    require(out, "out");
    const auto s = settings ? *settings : shapley_defaults();
    auto report = crowdiq::game::contextual_iq(
        responses->matrix, key->codes, table->table,
        crowdiq::Aggregator{to_method(aggregator), to_settings(ml)},
        to_shapley_method(s), to_shapley_options(s));
    *out = new ciq_shapley_report{std::move(report)};
  });
}

void ciq_shapley_report_free(ciq_shapley_report* report) { delete report; }

size_t ciq_shapley_report_size(const ciq_shapley_report* r) {
  return r ? r->report.values.size() : 0;
}

double ciq_shapley_report_value(const ciq_shapley_report* r, size_t participant) {
  if (r == nullptr || participant >= r->report.values.size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return r->report.values[participant];
}

double ciq_shapley_report_std_error(const ciq_shapley_report* r,
                                    size_t participant) {
  if (r == nullptr || participant >= r->report.std_errors.size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return r->report.std_errors[participant];
}

double ciq_shapley_report_grand_value(const ciq_shapley_report* r) {
  return r ? r->report.value_of_grand_coalition
           : std::numeric_limits<double>::quiet_NaN();
}

ciq_status ciq_shapley_report_serialize(const ciq_shapley_report* report,
                                        const ciq_responses* responses,
                                        const char* extra_metadata,
                                        char** out_text) {
  return guarded([&] {
    require(report, "report");
    require(responses, "responses");
    require(out_text, "out_text");
    *out_text = copy_string(crowdiq::game::serialize_report(
        report->report, responses->matrix.participant_ids(),
        extra_metadata ? extra_metadata : ""));
  });
}

// ---- Experiments -----------------------------------------------------------

ciq_status ciq_experiment_crowd_size(const ciq_responses* responses,
                                     const ciq_codes* key,
                                     const ciq_score_table* table,
                                     const ciq_sweep_config* config,
                                     const ciq_ml_settings* ml, char** out_csv) {
  return guarded([&] {
    check_inputs(responses, key, table);
    require(config, "config");
    require(out_csv, "out_csv");
    if (config->size_count > 0) require(config->sizes, "sizes");
    crowdiq::experiments::SweepConfig c;
    c.sizes.assign(config->sizes, config->sizes + config->size_count);
    c.crowds_per_size = config->crowds_per_size;
    c.seed = config->seed;
    c.threads = thread_setting.load();
    c.aggregators.clear();
    if (config->use_maj) c.aggregators.push_back({crowdiq::Method::kMajority, to_settings(ml)});
    if (config->use_ml) c.aggregators.push_back({crowdiq::Method::kModel, to_settings(ml)});
    const auto rows = crowdiq::experiments::crowd_size_sweep(
        responses->matrix, key->codes, table->table, c);
    *out_csv = copy_string(crowdiq::experiments::sweep_to_csv(rows, c));
  });
}

ciq_status ciq_experiment_band(const ciq_responses* responses, const ciq_codes* key,
                               const ciq_score_table* table, int low, int high,
                               char** out_text, size_t* out_retained) {
  return guarded([&] {
    check_inputs(responses, key, table);
    require(out_text, "out_text");
    const auto& matrix = responses->matrix;
    const auto band = crowdiq::experiments::band_subsample(
        matrix, key->codes, table->table, {low, high});
    const auto text = band.matrix
                          ? crowdiq::serialize_responses(*band.matrix)
                          : crowdiq::serialize_response_header(matrix.m(), matrix.k());
    *out_text = copy_string(text);
    if (out_retained != nullptr) *out_retained = band.retained.size();
  });
}

ciq_status ciq_experiment_contextual(const ciq_responses* responses,
                                     const ciq_codes* key,
                                     const ciq_score_table* table,
                                     const ciq_shapley_settings* settings,
                                     const ciq_ml_settings* ml, char** out_csv) {
  return guarded([&] {
    check_inputs(responses, key, table);
    require(out_csv, "out_csv");
    const auto s = settings ? *settings : shapley_defaults();
    crowdiq::experiments::ContextualSettings c;
    c.method = to_shapley_method(s);
    c.ml = to_settings(ml);
    c.options = to_shapley_options(s);
    const auto comparison = crowdiq::experiments::contextual_comparison(
        responses->matrix, key->codes, table->table, c);
    *out_csv = copy_string(crowdiq::experiments::contextual_to_csv(comparison, c));
  });
}

}  // extern "C"
