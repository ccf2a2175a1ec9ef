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

/*
 * C interface to libcrowdiq.
 *
 * Objects are opaque handles created by *_parse / *_create / computation
 * functions and released with the matching *_free. Every fallible function
 * returns a ciq_status; on failure the out-parameters are left untouched and
 * ciq_last_error() describes the problem (for validation errors the message
 * starts with the location, e.g. "line 4, column q2: code out of range").
 * Strings returned through char** are heap allocated; release them with
 * ciq_string_free.
 *
 * Response codes are 1-based. Participant and item indices are 0-based.
 */

#ifndef CROWDIQ_CROWDIQ_H_
#define CROWDIQ_CROWDIQ_H_

#include <stddef.h>
#include <stdint.h>

#if defined(CROWDIQ_BUILDING_LIBRARY)
#define CROWDIQ_API __attribute__((visibility("default")))
#else
#define CROWDIQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ciq_status {
  CIQ_OK = 0,
  CIQ_ERR_INVALID_ARGUMENT = 1, /* bad parameters or null handles */
  CIQ_ERR_VALIDATION = 2,       /* malformed or inconsistent data */
  CIQ_ERR_NUMERICAL = 3,        /* numerical breakdown (a bug) */
  CIQ_ERR_INTERNAL = 4
} ciq_status;

typedef enum ciq_method { CIQ_METHOD_MAJ = 0, CIQ_METHOD_ML = 1 } ciq_method;

typedef struct ciq_responses ciq_responses;
typedef struct ciq_codes ciq_codes; /* answer key or filled questionnaire */
typedef struct ciq_score_table ciq_score_table;
typedef struct ciq_aggregation ciq_aggregation;
typedef struct ciq_shapley_report ciq_shapley_report;

CROWDIQ_API const char* ciq_version(void);
/* Message for the last failure on the calling thread. */
CROWDIQ_API const char* ciq_last_error(void);
CROWDIQ_API void ciq_string_free(char* text);

/* Worker threads used by every call; 0 = all hardware threads (default).
 * Results never depend on this setting. */
CROWDIQ_API void ciq_set_threads(unsigned threads);
CROWDIQ_API unsigned ciq_get_threads(void);

/* ---- Response matrices ------------------------------------------------- */

CROWDIQ_API ciq_status ciq_responses_parse(const char* text, size_t length,
                                           ciq_responses** out);
/* codes: row-major n*m; ids: n strings. */
CROWDIQ_API ciq_status ciq_responses_create(size_t n, int m, int k,
                                            const char* const* ids,
                                            const int* codes,
                                            ciq_responses** out);
CROWDIQ_API ciq_status ciq_responses_serialize(const ciq_responses* responses,
                                               char** out_text);
CROWDIQ_API void ciq_responses_free(ciq_responses* responses);
CROWDIQ_API size_t ciq_responses_n(const ciq_responses* responses);
CROWDIQ_API int ciq_responses_m(const ciq_responses* responses);
CROWDIQ_API int ciq_responses_k(const ciq_responses* responses);
/* 0 when out of range. */
CROWDIQ_API int ciq_responses_code(const ciq_responses* responses,
                                   size_t participant, int item);
/* NULL when out of range; owned by the handle. */
CROWDIQ_API const char* ciq_responses_id(const ciq_responses* responses,
                                         size_t participant);

/* ---- Answer keys and questionnaires ------------------------------------ */

/* k = 0 takes k from the text's #k= directive. */
CROWDIQ_API ciq_status ciq_codes_parse(const char* text, size_t length, int k,
                                       ciq_codes** out);
CROWDIQ_API ciq_status ciq_codes_create(int k, const int* codes, int m,
                                        ciq_codes** out);
CROWDIQ_API ciq_status ciq_codes_serialize(const ciq_codes* codes,
                                           char** out_text);
CROWDIQ_API void ciq_codes_free(ciq_codes* codes);
CROWDIQ_API int ciq_codes_m(const ciq_codes* codes);
CROWDIQ_API int ciq_codes_k(const ciq_codes* codes);
CROWDIQ_API int ciq_codes_get(const ciq_codes* codes, int item);

/* ---- Score tables ------------------------------------------------------ */

/* m = 0 infers m from the highest raw score present. */
CROWDIQ_API ciq_status ciq_score_table_parse(const char* text, size_t length,
                                             int m, ciq_score_table** out);
CROWDIQ_API ciq_status ciq_score_table_default(int m, double mean_raw,
                                               double sd_raw, int low, int high,
                                               ciq_score_table** out);
CROWDIQ_API ciq_status ciq_score_table_serialize(const ciq_score_table* table,
                                                 char** out_text);
CROWDIQ_API void ciq_score_table_free(ciq_score_table* table);
CROWDIQ_API int ciq_score_table_m(const ciq_score_table* table);
CROWDIQ_API int ciq_score_table_iq(const ciq_score_table* table, int raw);

/* ---- Synthetic data ---------------------------------------------------- */

typedef enum ciq_aptitude_kind {
  CIQ_APTITUDE_FIXED = 0,
  CIQ_APTITUDE_BETA = 1,
  CIQ_APTITUDE_EXPLICIT = 2
} ciq_aptitude_kind;

typedef struct ciq_synth_config {
  int n;
  int m;
  int k;
  ciq_aptitude_kind aptitude;
  double fixed_g;            /* CIQ_APTITUDE_FIXED */
  double alpha;              /* CIQ_APTITUDE_BETA */
  double beta;
  const double* explicit_g;  /* CIQ_APTITUDE_EXPLICIT, n values */
  uint64_t seed;
  const ciq_codes* key;      /* NULL: uniformly random key */
} ciq_synth_config;

/* n=1, m=60, k=8, Beta(1,1) aptitudes, seed 0, random key. */
CROWDIQ_API void ciq_synth_config_init(ciq_synth_config* config);
/* out_aptitudes may be NULL; otherwise it receives n values. */
CROWDIQ_API ciq_status ciq_generate(const ciq_synth_config* config,
                                    ciq_responses** out_responses,
                                    ciq_codes** out_key, double* out_aptitudes);

/* ---- Aggregation ------------------------------------------------------- */

typedef struct ciq_ml_settings {
  double prior_alpha;
  double prior_beta;
  double tolerance;
  int max_iterations;
} ciq_ml_settings;

/* Beta(1,1), tolerance 1e-8, 500 iterations. */
CROWDIQ_API void ciq_ml_settings_init(ciq_ml_settings* settings);

/* crowd = NULL aggregates every participant. settings may be NULL. */
CROWDIQ_API ciq_status ciq_aggregate(const ciq_responses* responses,
                                     const size_t* crowd, size_t crowd_size,
                                     ciq_method method,
                                     const ciq_ml_settings* settings,
                                     ciq_aggregation** out);
CROWDIQ_API void ciq_aggregation_free(ciq_aggregation* aggregation);
CROWDIQ_API ciq_status ciq_aggregation_answers(const ciq_aggregation* aggregation,
                                               ciq_codes** out);
/* Inference details; zero / NaN for MAJ results. */
CROWDIQ_API int ciq_aggregation_iterations(const ciq_aggregation* aggregation);
CROWDIQ_API int ciq_aggregation_converged(const ciq_aggregation* aggregation);
CROWDIQ_API size_t ciq_aggregation_trace_length(const ciq_aggregation* aggregation);
CROWDIQ_API double ciq_aggregation_trace(const ciq_aggregation* aggregation,
                                         size_t iteration);
CROWDIQ_API double ciq_aggregation_posterior(const ciq_aggregation* aggregation,
                                             int item, int code);
CROWDIQ_API double ciq_aggregation_aptitude(const ciq_aggregation* aggregation,
                                            size_t member);

/* ---- Scoring ----------------------------------------------------------- */

CROWDIQ_API ciq_status ciq_score(const ciq_codes* answers, const ciq_codes* key,
                                 const ciq_score_table* table, int* out_raw,
                                 int* out_iq);

/* ---- Contextual IQ ----------------------------------------------------- */

typedef struct ciq_shapley_settings {
  int monte_carlo;          /* 0: exact enumeration */
  size_t samples;           /* permutations, monte_carlo only */
  uint64_t seed;
  size_t max_exact_players; /* exact enumeration cap */
} ciq_shapley_settings;

/* Monte Carlo, 10000 samples, seed 0, exact cap 12. */
CROWDIQ_API void ciq_shapley_settings_init(ciq_shapley_settings* settings);

CROWDIQ_API ciq_status ciq_contextual_iq(const ciq_responses* responses,
                                         const ciq_codes* key,
                                         const ciq_score_table* table,
                                         ciq_method aggregator,
                                         const ciq_ml_settings* ml,
                                         const ciq_shapley_settings* settings,
                                         ciq_shapley_report** out);
CROWDIQ_API void ciq_shapley_report_free(ciq_shapley_report* report);
CROWDIQ_API size_t ciq_shapley_report_size(const ciq_shapley_report* report);
CROWDIQ_API double ciq_shapley_report_value(const ciq_shapley_report* report,
                                            size_t participant);
CROWDIQ_API double ciq_shapley_report_std_error(const ciq_shapley_report* report,
                                                size_t participant);
CROWDIQ_API double ciq_shapley_report_grand_value(const ciq_shapley_report* report);
/* extra_metadata (nullable) is appended to the leading comment line. */
CROWDIQ_API ciq_status ciq_shapley_report_serialize(
    const ciq_shapley_report* report, const ciq_responses* responses,
    const char* extra_metadata, char** out_text);

/* ---- Experiments (CSV output) ------------------------------------------ */

typedef struct ciq_sweep_config {
  const int* sizes;
  size_t size_count;
  int crowds_per_size;
  uint64_t seed;
  int use_maj;
  int use_ml;
} ciq_sweep_config;

CROWDIQ_API ciq_status ciq_experiment_crowd_size(const ciq_responses* responses,
                                                 const ciq_codes* key,
                                                 const ciq_score_table* table,
                                                 const ciq_sweep_config* config,
                                                 const ciq_ml_settings* ml,
                                                 char** out_csv);
/* Writes the retained participants in the responses format (header only when
 * nobody qualifies). out_retained may be NULL. */
CROWDIQ_API ciq_status ciq_experiment_band(const ciq_responses* responses,
                                           const ciq_codes* key,
                                           const ciq_score_table* table, int low,
                                           int high, char** out_text,
                                           size_t* out_retained);
CROWDIQ_API ciq_status ciq_experiment_contextual(
    const ciq_responses* responses, const ciq_codes* key,
    const ciq_score_table* table, const ciq_shapley_settings* settings,
    const ciq_ml_settings* ml, char** out_csv);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* CROWDIQ_CROWDIQ_H_ */
