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


/* Exercises the C API from C. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "qoracle/qoracle.h"

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: CHECK failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static void count_event(const char* json, void* user) {
  if (strstr(json, "\"ke-trial\"") != NULL) ++*(int*)user;
}

static void experiments(void) {
  const char* cfg = "{\"subcommand\":\"demo-ke\",\"n\":2,\"trials\":50,\"seed\":7}";
  char* report = NULL;
  int events = 0;
  CHECK(qo_run_experiment(cfg, count_event, &events, &report) == QO_OK);
  CHECK(events == 50);
  CHECK(report != NULL && strstr(report, "\"agreement_rate\":1.0") != NULL);
  CHECK(strstr(report, "\"schema_version\":1") != NULL);
  int ok = 0;
  CHECK(qo_report_ok(report, &ok) == QO_OK && ok == 1);

  char* again = NULL;
  CHECK(qo_replay_report(report, NULL, NULL, &again) == QO_OK);
  CHECK(again != NULL && strcmp(report, again) == 0);

  char* text = NULL;
  CHECK(qo_render_report(report, "pretty", &text) == QO_OK && strstr(text, "verdict: ok") != NULL);
  qo_free_string(text);
  CHECK(qo_render_report(report, "csv", &text) == QO_OK && strstr(text, "agreement_rate") != NULL);
  qo_free_string(text);
  text = NULL;
  CHECK(qo_render_report(report, "xml", &text) == QO_ERR_INVALID_ARGUMENT && text == NULL);
  CHECK(strstr(qo_last_error(), "xml") != NULL);
  qo_free_string(again);
  qo_free_string(report);

  report = NULL;
  CHECK(qo_run_experiment("{not json", NULL, NULL, &report) == QO_ERR_INVALID_ARGUMENT);
  CHECK(report == NULL);
  CHECK(strlen(qo_last_error()) > 0);
  CHECK(qo_run_experiment("{\"subcommand\":\"demo-ke\",\"n\":20}", NULL, NULL, &report) == QO_ERR_RESOURCE);
  CHECK(strstr(qo_last_error(), "40 qubits") != NULL);
  CHECK(qo_run_experiment("{\"subcommand\":\"nope\"}", NULL, NULL, &report) == QO_ERR_INVALID_ARGUMENT);
  CHECK(qo_run_experiment(NULL, NULL, NULL, &report) == QO_ERR_NULL_ARGUMENT);
}

static void handles(void) {
  qo_rng* rng = NULL;
  CHECK(qo_rng_create(5, &rng) == QO_OK);
  uint64_t u = 99;
  CHECK(qo_rng_uniform(rng, 4, &u) == QO_OK && u < 4);
  CHECK(qo_rng_uniform(rng, 0, &u) == QO_ERR_INVALID_ARGUMENT);

  qo_world* w = NULL;
  CHECK(qo_world_create("{\"seed\":3,\"levels\":[2]}", &w) == QO_OK);
  uint64_t x = 0, y = 0;
  qo_state *phi_x = NULL, *phi_y = NULL;
  CHECK(qo_world_sg(w, 2, rng, &x, &phi_x) == QO_OK);
  CHECK(qo_world_sg(w, 2, rng, &y, &phi_y) == QO_OK);
  CHECK(qo_state_dimension(phi_x) == 16);

  int accepted = 0;
  uint64_t ka = 0, kb = 0, want = 0;
  CHECK(qo_world_mix(w, 2, x, y, phi_x, rng, &accepted, &ka) == QO_OK && accepted == 1);
  CHECK(qo_world_mix(w, 2, y, x, phi_y, rng, &accepted, &kb) == QO_OK && accepted == 1);
  CHECK(qo_world_key_for(w, 2, x, y, &want) == QO_OK);
  CHECK(ka == want && kb == want);
  CHECK(qo_world_sg(w, 3, rng, &x, &phi_x) != QO_OK);

  char* json = NULL;
  CHECK(qo_world_counters(w, &json) == QO_OK && strstr(json, "sg") != NULL);
  qo_free_string(json);
  CHECK(qo_world_descriptor(w, &json) == QO_OK && strstr(json, "\"seed\":3") != NULL);
  qo_free_string(json);

  double o = 0.0, td = 1.0;
  CHECK(qo_state_overlap(phi_x, phi_x, &o) == QO_OK && fabs(o - 1.0) < 1e-12);
  CHECK(qo_state_trace_distance(phi_x, phi_x, &td) == QO_OK && td < 1e-6);
  if (x != y) CHECK(qo_state_overlap(phi_x, phi_y, &o) == QO_OK && o < 1e-12);

  double amps[32];
  CHECK(qo_state_amplitudes(phi_x, amps, 16) == QO_OK);
  CHECK(qo_state_amplitudes(phi_x, amps, 8) == QO_ERR_DIMENSION);
  qo_state* copy = NULL;
  CHECK(qo_state_from_amplitudes(amps, 16, &copy) == QO_OK);
  CHECK(qo_state_overlap(copy, phi_x, &o) == QO_OK && fabs(o - 1.0) < 1e-12);
  double bad[4] = {1.0, 0.0, 1.0, 0.0};
  qo_state* nope = NULL;
  CHECK(qo_state_from_amplitudes(bad, 2, &nope) != QO_OK && nope == NULL);

  qo_state* h = NULL;
  CHECK(qo_state_haar(3, rng, &h) != QO_OK);
  CHECK(qo_state_haar(8, rng, &h) == QO_OK && qo_state_dimension(h) == 8);

  qo_state_destroy(h);
  qo_state_destroy(copy);
  qo_state_destroy(phi_x);
  qo_state_destroy(phi_y);
  qo_world_destroy(w);
  qo_rng_destroy(rng);
  qo_world_destroy(NULL);
  qo_state_destroy(NULL);
}

static void dimension_cap(void) {
  const size_t old = qo_dimension_cap();
  CHECK(old >= 1);
  CHECK(qo_set_dimension_cap(0) == QO_ERR_INVALID_ARGUMENT);
  CHECK(qo_set_dimension_cap(8) == QO_OK);
  char* report = NULL;
  CHECK(qo_run_experiment("{\"subcommand\":\"demo-ke\",\"n\":2,\"trials\":1}", NULL, NULL, &report) ==
        QO_ERR_RESOURCE);
  CHECK(qo_set_dimension_cap(old) == QO_OK);
  CHECK(qo_run_experiment("{\"subcommand\":\"demo-ke\",\"n\":2,\"trials\":1}", NULL, NULL, &report) == QO_OK);
  qo_free_string(report);
}

int main(void) {
  CHECK(qo_version() != NULL);
  CHECK(strcmp(qo_status_name(QO_ERR_RESOURCE), "resource") == 0);
  experiments();
  handles();
  dimension_cap();
  if (failures == 0) printf("capi: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
