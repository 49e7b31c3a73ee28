// Copyright 2026 The qoracle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface to qoracle. Every call returns a qo_status; on failure the
 * message is available from qo_last_error() on the same thread until the
 * next failing call. Strings returned through char** are owned by the
 * caller and released with qo_free_string. */

#ifndef QORACLE_H
#define QORACLE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QO_API __declspec(dllexport)
#else
#define QO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qo_status {
  QO_OK = 0,
  QO_ERR_INVALID_ARGUMENT = 1,
  QO_ERR_DIMENSION = 2,
  QO_ERR_RESOURCE = 3, /* dimension cap exceeded */
  QO_ERR_CONTRACT = 4,
  QO_ERR_NUMERIC = 5,
  QO_ERR_ADVERSARY_FAULT = 6,
  QO_ERR_REFUSED = 7,
  QO_ERR_RETRY_EXHAUSTED = 8,
  QO_ERR_NULL_ARGUMENT = 9,
  QO_ERR_INTERNAL = 10
} qo_status;

QO_API const char* qo_version(void);
QO_API const char* qo_status_name(qo_status status);
QO_API const char* qo_last_error(void);
QO_API void qo_free_string(char* s);

QO_API size_t qo_dimension_cap(void);
QO_API qo_status qo_set_dimension_cap(size_t cap);

/* ---- experiments ---- */

/* Called once per event with one JSON object (no trailing newline). */
typedef void (*qo_event_fn)(const char* json, void* user);

QO_API qo_status qo_run_experiment(const char* config_json, qo_event_fn events, void* user, char** report_json);
QO_API qo_status qo_replay_report(const char* report_json, qo_event_fn events, void* user, char** new_report_json);
/* *ok = 1 when the report has no violations (lemma verdicts are recomputed). */
QO_API qo_status qo_report_ok(const char* report_json, int* ok);
/* format: "json", "csv" or "pretty". */
QO_API qo_status qo_render_report(const char* report_json, const char* format, char** out);

/* ---- handles ---- */

typedef struct qo_rng qo_rng;
typedef struct qo_state qo_state;
typedef struct qo_world qo_world;

QO_API qo_status qo_rng_create(uint64_t seed, qo_rng** out);
QO_API void qo_rng_destroy(qo_rng* rng);
QO_API qo_status qo_rng_uniform(qo_rng* rng, uint64_t bound, uint64_t* out);

/* Amplitudes are interleaved (re, im) pairs, 2*dim doubles. */
QO_API qo_status qo_state_from_amplitudes(const double* re_im, size_t dim, qo_state** out);
QO_API qo_status qo_state_haar(size_t dim, qo_rng* rng, qo_state** out);
QO_API void qo_state_destroy(qo_state* state);
QO_API size_t qo_state_dimension(const qo_state* state);
QO_API qo_status qo_state_amplitudes(const qo_state* state, double* re_im, size_t dim);
QO_API qo_status qo_state_overlap(const qo_state* a, const qo_state* b, double* out); /* |<a|b>|^2 */
QO_API qo_status qo_state_trace_distance(const qo_state* a, const qo_state* b, double* out);

/* KE worlds (SG, Mix). descriptor_json: {"seed": .., "levels": [..], "canonical_order": ..}. */
QO_API qo_status qo_world_create(const char* descriptor_json, qo_world** out);
QO_API void qo_world_destroy(qo_world* world);
QO_API qo_status qo_world_descriptor(const qo_world* world, char** json);
QO_API qo_status qo_world_sg(qo_world* world, unsigned n, qo_rng* rng, uint64_t* key, qo_state** state);
/* *accepted = 0 means Mix returned BOT and *key is untouched. */
QO_API qo_status qo_world_mix(qo_world* world, unsigned n, uint64_t a, uint64_t b, const qo_state* c, qo_rng* rng,
                              int* accepted, uint64_t* key);
QO_API qo_status qo_world_key_for(const qo_world* world, unsigned n, uint64_t a, uint64_t b, uint64_t* key);
QO_API qo_status qo_world_counters(const qo_world* world, char** json);

#ifdef __cplusplus
}
#endif

#endif /* QORACLE_H */
