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


#include "qoracle/qoracle.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "qoracle/error.hpp"
#include "qoracle/experiment.hpp"
#include "qoracle/numerics.hpp"
#include "qoracle/oracle_worlds.hpp"
#include "qoracle/rng.hpp"

struct qo_rng {
  qoracle::RngStream rng;
};
struct qo_state {
  qoracle::PureState state;
};
struct qo_world {
  qoracle::KEWorld world;
};

namespace {

thread_local std::string g_last_error;

qo_status from_code(qoracle::ErrorCode c) {
  using qoracle::ErrorCode;
  switch (c) {
    case ErrorCode::invalid_argument: return QO_ERR_INVALID_ARGUMENT;
    case ErrorCode::dimension: return QO_ERR_DIMENSION;
    case ErrorCode::resource: return QO_ERR_RESOURCE;
    case ErrorCode::contract: return QO_ERR_CONTRACT;
    case ErrorCode::numeric: return QO_ERR_NUMERIC;
    case ErrorCode::adversary_fault: return QO_ERR_ADVERSARY_FAULT;
    case ErrorCode::refused: return QO_ERR_REFUSED;
    case ErrorCode::retry_exhausted: return QO_ERR_RETRY_EXHAUSTED;
  }
  return QO_ERR_INTERNAL;
}

qo_status set_error(qo_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <typename F>
qo_status guarded(F&& f) {
  try {
    f();
    return QO_OK;
  } catch (const qoracle::Error& e) {
    return set_error(from_code(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(QO_ERR_INVALID_ARGUMENT, std::string("bad JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return set_error(QO_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return set_error(QO_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(QO_ERR_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define QO_REQUIRE_NONNULL(p) \
  if ((p) == nullptr) return set_error(QO_ERR_NULL_ARGUMENT, #p " is null")

qoracle::EventSink sink(qo_event_fn fn, void* user) {
  if (fn == nullptr) return {};
  return [fn, user](const nlohmann::json& e) { fn(e.dump().c_str(), user); };
}

}  // namespace

extern "C" {

const char* qo_version(void) { return "0.1.0"; }

const char* qo_status_name(qo_status status) {
  switch (status) {
    case QO_OK: return "ok";
    case QO_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case QO_ERR_DIMENSION: return "dimension";
    case QO_ERR_RESOURCE: return "resource";
    case QO_ERR_CONTRACT: return "contract";
    case QO_ERR_NUMERIC: return "numeric";
    case QO_ERR_ADVERSARY_FAULT: return "adversary_fault";
    case QO_ERR_REFUSED: return "refused";
    case QO_ERR_RETRY_EXHAUSTED: return "retry_exhausted";
    case QO_ERR_NULL_ARGUMENT: return "null_argument";
    case QO_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* qo_last_error(void) { return g_last_error.c_str(); }

void qo_free_string(char* s) { std::free(s); }

size_t qo_dimension_cap(void) { return qoracle::dimension_cap(); }

qo_status qo_set_dimension_cap(size_t cap) {
  return guarded([&] { qoracle::set_dimension_cap(cap); });
}

qo_status qo_run_experiment(const char* config_json, qo_event_fn events, void* user, char** report_json) {
  QO_REQUIRE_NONNULL(config_json);
  QO_REQUIRE_NONNULL(report_json);
  return guarded([&] {
    const auto cfg = qoracle::ExperimentConfig::from_json(nlohmann::json::parse(config_json));
    *report_json = dup_string(qoracle::run_experiment(cfg, sink(events, user)).dump());
  });
}

qo_status qo_replay_report(const char* report_json, qo_event_fn events, void* user, char** new_report_json) {
  QO_REQUIRE_NONNULL(report_json);
  QO_REQUIRE_NONNULL(new_report_json);
  return guarded([&] {
    *new_report_json = dup_string(qoracle::replay_report(nlohmann::json::parse(report_json), sink(events, user)).dump());
  });
}

qo_status qo_report_ok(const char* report_json, int* ok) {
  QO_REQUIRE_NONNULL(report_json);
  QO_REQUIRE_NONNULL(ok);
  return guarded([&] { *ok = qoracle::report_ok(nlohmann::json::parse(report_json)) ? 1 : 0; });
}

qo_status qo_render_report(const char* report_json, const char* format, char** out) {
  QO_REQUIRE_NONNULL(report_json);
  QO_REQUIRE_NONNULL(format);
  QO_REQUIRE_NONNULL(out);
  return guarded([&] {
    const auto j = nlohmann::json::parse(report_json);
    const std::string f = format;
    if (f == "json") {
      *out = dup_string(j.dump(2) + "\n");
    } else if (f == "csv") {
      *out = dup_string(qoracle::report_to_csv(j));
    } else if (f == "pretty") {
      *out = dup_string(qoracle::report_to_pretty(j));
    } else {
      qoracle::fail(qoracle::ErrorCode::invalid_argument, "unknown format '" + f + "' (json, csv, pretty)");
    }
  });
}

qo_status qo_rng_create(uint64_t seed, qo_rng** out) {
  QO_REQUIRE_NONNULL(out);
  return guarded([&] { *out = new qo_rng{qoracle::RngStream(seed)}; });
}

void qo_rng_destroy(qo_rng* rng) { delete rng; }

qo_status qo_rng_uniform(qo_rng* rng, uint64_t bound, uint64_t* out) {
  QO_REQUIRE_NONNULL(rng);
  QO_REQUIRE_NONNULL(out);
  return guarded([&] { *out = rng->rng.uniform(bound); });
}

qo_status qo_state_from_amplitudes(const double* re_im, size_t dim, qo_state** out) {
  QO_REQUIRE_NONNULL(re_im);
  QO_REQUIRE_NONNULL(out);
  return guarded([&] {
    qoracle::CVector v(static_cast<Eigen::Index>(dim));
    for (size_t i = 0; i < dim; ++i) v(static_cast<Eigen::Index>(i)) = qoracle::Complex(re_im[2 * i], re_im[2 * i + 1]);
    *out = new qo_state{qoracle::PureState(std::move(v))};
  });
}

qo_status qo_state_haar(size_t dim, qo_rng* rng, qo_state** out) {
  QO_REQUIRE_NONNULL(rng);
  QO_REQUIRE_NONNULL(out);
  return guarded([&] { *out = new qo_state{qoracle::haar_state(dim, rng->rng)}; });
}

void qo_state_destroy(qo_state* state) { delete state; }

size_t qo_state_dimension(const qo_state* state) { return state == nullptr ? 0 : state->state.dimension(); }

qo_status qo_state_amplitudes(const qo_state* state, double* re_im, size_t dim) {
  QO_REQUIRE_NONNULL(state);
  QO_REQUIRE_NONNULL(re_im);
  if (dim != state->state.dimension()) {
    return set_error(QO_ERR_DIMENSION, "buffer holds " + std::to_string(dim) + " amplitudes, state has " +
                                           std::to_string(state->state.dimension()));
  }
  const auto& a = state->state.amplitudes();
  for (size_t i = 0; i < dim; ++i) {
    re_im[2 * i] = a(static_cast<Eigen::Index>(i)).real();
    re_im[2 * i + 1] = a(static_cast<Eigen::Index>(i)).imag();
  }
  return QO_OK;
}

qo_status qo_state_overlap(const qo_state* a, const qo_state* b, double* out) {
  QO_REQUIRE_NONNULL(a);
  QO_REQUIRE_NONNULL(b);
  QO_REQUIRE_NONNULL(out);
  return guarded([&] { *out = qoracle::overlap_squared(a->state, b->state); });
}

qo_status qo_state_trace_distance(const qo_state* a, const qo_state* b, double* out) {
  QO_REQUIRE_NONNULL(a);
  QO_REQUIRE_NONNULL(b);
  QO_REQUIRE_NONNULL(out);
  return guarded([&] { *out = qoracle::td_from_overlap(a->state, b->state); });
}

qo_status qo_world_create(const char* descriptor_json, qo_world** out) {
  QO_REQUIRE_NONNULL(descriptor_json);
  QO_REQUIRE_NONNULL(out);
  return guarded([&] {
    auto j = nlohmann::json::parse(descriptor_json);
    if (!j.contains("kind")) j["kind"] = "ke";
    const auto d = qoracle::WorldDescriptor::from_json(j);
    qoracle::require(d.kind == "ke", qoracle::ErrorCode::invalid_argument, "world handles support kind \"ke\" only");
    *out = new qo_world{qoracle::KEWorld::sample(d)};
  });
}

void qo_world_destroy(qo_world* world) { delete world; }

qo_status qo_world_descriptor(const qo_world* world, char** json) {
  QO_REQUIRE_NONNULL(world);
  QO_REQUIRE_NONNULL(json);
  return guarded([&] { *json = dup_string(world->world.descriptor().to_json().dump()); });
}

qo_status qo_world_sg(qo_world* world, unsigned n, qo_rng* rng, uint64_t* key, qo_state** state) {
  QO_REQUIRE_NONNULL(world);
  QO_REQUIRE_NONNULL(rng);
  QO_REQUIRE_NONNULL(key);
  QO_REQUIRE_NONNULL(state);
  return guarded([&] {
    auto out = world->world.sg(n, rng->rng);
    qoracle::require(out.has_value(), qoracle::ErrorCode::contract, "SG returned BOT");
    *key = out->key.value();
    *state = new qo_state{std::move(out->state)};
  });
}

qo_status qo_world_mix(qo_world* world, unsigned n, uint64_t a, uint64_t b, const qo_state* c, qo_rng* rng,
                       int* accepted, uint64_t* key) {
  QO_REQUIRE_NONNULL(world);
  QO_REQUIRE_NONNULL(c);
  QO_REQUIRE_NONNULL(rng);
  QO_REQUIRE_NONNULL(accepted);
  QO_REQUIRE_NONNULL(key);
  return guarded([&] {
    const auto out = world->world.mix(n, qoracle::BitString(a, n), qoracle::BitString(b, n), c->state, rng->rng);
    *accepted = out.has_value() ? 1 : 0;
    if (out) *key = out->value();
  });
}

qo_status qo_world_key_for(const qo_world* world, unsigned n, uint64_t a, uint64_t b, uint64_t* key) {
  QO_REQUIRE_NONNULL(world);
  QO_REQUIRE_NONNULL(key);
  return guarded(
      [&] { *key = world->world.key_for(n, qoracle::BitString(a, n), qoracle::BitString(b, n)).value(); });
}

qo_status qo_world_counters(const qo_world* world, char** json) {
  QO_REQUIRE_NONNULL(world);
  QO_REQUIRE_NONNULL(json);
  return guarded([&] { *json = dup_string(world->world.counters().to_json().dump()); });
}

}  // extern "C"
