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


#ifndef QORACLE_EXPERIMENT_HPP
#define QORACLE_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "qoracle/games.hpp"

namespace qoracle {

inline constexpr int kSchemaVersion = 1;

// Everything a report depends on. Output path and format are not part of
// it; they only choose how the report is written.
struct ExperimentConfig {
  std::string subcommand;  // demo-ke | demo-commit | demo-lightning | game | hybrid | lemma | puzzle | simulate-world
  std::string target;      // game, lemma or puzzle name
  std::string adversary;   // empty: whole battery
  unsigned n = 2;
  unsigned padding = 9;
  std::uint64_t trials = 1000;
  unsigned budget = 4;
  std::uint64_t seed = 0;
  unsigned cutoff = 2;
  std::vector<std::string> steps;  // hybrid chain
  // lemma parameters
  unsigned N = 2;
  unsigned M = 4;
  std::uint64_t samples = 10000;
  double epsilon = 0.1;
  unsigned t = 2;
  unsigned depth = 4;
  std::string sampler = "brickwork";  // tdesign: brickwork | haar
  unsigned dim = 4;
  double delta = 0.3;
  unsigned T = 3;
  bool canonical = true;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

// Runs the experiment and returns the report. The report carries
// schema_version, the config, the world descriptor(s), the result and a
// verdict {ok, violations}. No wall-clock data goes in, so equal configs give
// byte-equal dumps.
nlohmann::json run_experiment(const ExperimentConfig& cfg, const EventSink& events = {});

// Re-runs the config embedded in a report.
nlohmann::json replay_report(const nlohmann::json& report, const EventSink& events = {});

bool report_ok(const nlohmann::json& report);

// Flat rows for CSV output: one per game/lemma/arm entry, columns sorted.
std::string report_to_csv(const nlohmann::json& report);
// Human-readable rendering of the same JSON.
std::string report_to_pretty(const nlohmann::json& report);

}  // namespace qoracle

#endif  // QORACLE_EXPERIMENT_HPP
