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


// qoracle command-line driver. Talks to the library only through the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qoracle/qoracle.h"

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kInternal = 3 };

int exit_for(qo_status s) {
  switch (s) {
    case QO_OK: return kOk;
    case QO_ERR_INVALID_ARGUMENT:
    case QO_ERR_DIMENSION:
    case QO_ERR_RESOURCE:
    case QO_ERR_REFUSED:
    case QO_ERR_NULL_ARGUMENT: return kUsage;
    default: return kInternal;
  }
}

int report_error(qo_status s) {
  std::cerr << "qoracle: " << qo_status_name(s) << ": " << qo_last_error() << "\n";
  return exit_for(s);
}

void write_event(const char* json, void* user) { *static_cast<std::ofstream*>(user) << json << "\n"; }

struct Output {
  std::string path;
  std::string format = "json";
  std::string events;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs (or replays) and writes the report; returns the process exit code.
int emit(const std::string& input, bool replay, const Output& out, const std::string* compare_with = nullptr) {
  std::ofstream events;
  if (!out.events.empty()) {
    events.open(out.events);
    if (!events) {
      std::cerr << "qoracle: cannot open event log " << out.events << "\n";
      return kUsage;
    }
  }
  qo_event_fn fn = out.events.empty() ? nullptr : write_event;
  char* report = nullptr;
  qo_status s = replay ? qo_replay_report(input.c_str(), fn, &events, &report)
                       : qo_run_experiment(input.c_str(), fn, &events, &report);
  if (s != QO_OK) return report_error(s);
  const std::string dump = report;

  char* rendered = nullptr;
  s = qo_render_report(report, out.format.c_str(), &rendered);
  int ok = 0;
  if (s == QO_OK) s = qo_report_ok(report, &ok);
  qo_free_string(report);
  if (s != QO_OK) {
    qo_free_string(rendered);
    return report_error(s);
  }
  if (out.path.empty() || out.path == "-") {
    std::cout << rendered;
  } else {
    std::ofstream f(out.path);
    if (!f) {
      qo_free_string(rendered);
      std::cerr << "qoracle: cannot write " << out.path << "\n";
      return kUsage;
    }
    f << rendered;
  }
  qo_free_string(rendered);

  if (compare_with != nullptr) {
    const std::string original = nlohmann::json::parse(*compare_with).dump();
    if (original != dump) {
      std::cerr << "qoracle: replayed report differs from the original\n";
      return kViolation;
    }
    std::cerr << "qoracle: replay is byte-identical\n";
  }
  return ok ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* cap = std::getenv("QORACLE_DIM_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(cap, &end, 10);
    if (end == cap || *end != '\0' || v == 0) {
      std::cerr << "qoracle: QORACLE_DIM_CAP must be a positive integer, got '" << cap << "'\n";
      return kUsage;
    }
    qo_set_dimension_cap(static_cast<size_t>(v));
  }

  CLI::App app{"qoracle: oracle-world protocol and lemma experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qo_version()));

  nlohmann::json cfg;
  Output out;
  // fields shared by every experiment
  unsigned n = 2, padding = 9, budget = 4, cutoff = 2, N = 2, M = 4, t = 2, depth = 4, dim = 4, T = 3;
  std::uint64_t trials = 1000, seed = 0, samples = 10000;
  double epsilon = 0.1, delta = 0.3;
  std::string target, adversary, sampler = "brickwork";
  std::vector<std::string> steps;
  bool non_canonical = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "master seed")->capture_default_str();
    sub->add_option("--trials", trials, "trials / runs")->capture_default_str();
    sub->add_option("-o,--out", out.path, "write the report here (default stdout)");
    sub->add_option("--format", out.format, "json | csv | pretty")
        ->check(CLI::IsMember({"json", "csv", "pretty"}))
        ->capture_default_str();
    sub->add_option("--events", out.events, "JSON-lines event log");
  };
  auto level = [&](CLI::App* sub) { sub->add_option("-n,--n", n, "security parameter")->capture_default_str(); };
  auto world_order = [&](CLI::App* sub) {
    sub->add_flag("--non-canonical", non_canonical, "Mix uses f(a, b) without sorting the pair");
  };

  auto* demo_ke = app.add_subcommand("demo-ke", "honest key exchange runs");
  common(demo_ke);
  level(demo_ke);
  world_order(demo_ke);

  auto* demo_commit = app.add_subcommand("demo-commit", "honest commit/open cycles and exact hiding");
  common(demo_commit);
  level(demo_commit);

  auto* demo_lightning = app.add_subcommand("demo-lightning", "mint/verify and random-state forgery");
  common(demo_lightning);
  level(demo_lightning);
  demo_lightning->add_option("-p,--padding", padding, "extra qubits per key bit")->capture_default_str();

  auto* game = app.add_subcommand("game", "security game against the adversary battery");
  common(game);
  level(game);
  world_order(game);
  game->add_option("game", target, "eavesdrop | binding | clone | keylemma")
      ->required()
      ->check(CLI::IsMember({"eavesdrop", "binding", "clone", "keylemma"}));
  game->add_option("--adversary", adversary, "run one adversary instead of the battery");
  game->add_option("--budget", budget, "adversary query budget T")->capture_default_str();
  game->add_option("-p,--padding", padding, "lightning padding")->capture_default_str();

  auto* hybrid = app.add_subcommand("hybrid", "hybrid chain of world modifications");
  common(hybrid);
  level(hybrid);
  world_order(hybrid);
  hybrid->add_option("game", target, "eavesdrop | binding")->required()->check(CLI::IsMember({"eavesdrop", "binding"}));
  hybrid->add_option("--steps", steps, "identity, swap_unitary, swap_function, forbid_set, suffix_dedup, own_keys_only")
      ->delimiter(',');
  hybrid->add_option("--adversary", adversary, "adversary id");
  hybrid->add_option("--budget", budget, "adversary query budget T")->capture_default_str();

  auto* lemma = app.add_subcommand("lemma", "numerical lemma check");
  common(lemma);
  level(lemma);
  lemma->add_option("lemma", target, "randomortho | simref | tdesign | learn | birthday | bitfix | concentration")
      ->required()
      ->check(CLI::IsMember({"randomortho", "simref", "tdesign", "learn", "birthday", "bitfix", "concentration"}));
  lemma->add_option("--N", N, "randomortho: number of columns")->capture_default_str();
  lemma->add_option("--M", M, "randomortho: dimension")->capture_default_str();
  lemma->add_option("--samples", samples, "Monte Carlo samples / shots")->capture_default_str();
  lemma->add_option("--epsilon", epsilon, "simref / tdesign accuracy")->capture_default_str();
  lemma->add_option("--dim", dim, "simref / tdesign / concentration dimension")->capture_default_str();
  lemma->add_option("--t", t, "tdesign moment order")->capture_default_str();
  lemma->add_option("--depth", depth, "brickwork depth")->capture_default_str();
  lemma->add_option("--sampler", sampler, "tdesign sampler")
      ->check(CLI::IsMember({"brickwork", "haar"}))
      ->capture_default_str();
  lemma->add_option("--budget", budget, "birthday: number of SG draws")->capture_default_str();
  lemma->add_option("--cutoff", cutoff, "learn: levels learned exactly")->capture_default_str();
  lemma->add_option("--delta", delta, "learn: total error")->capture_default_str();
  lemma->add_option("--T", T, "learn: tester query count")->capture_default_str();

  auto* puzzle = app.add_subcommand("puzzle", "one-way puzzle reductions and inverters");
  common(puzzle);
  level(puzzle);
  puzzle->add_option("kind", target, "ke | commitment | state")
      ->required()
      ->check(CLI::IsMember({"ke", "commitment", "state"}));

  auto* simulate = app.add_subcommand("simulate-world", "learn levels <= cutoff, substitute the rest");
  common(simulate);
  level(simulate);
  simulate->add_option("--cutoff", cutoff, "levels learned exactly")->capture_default_str();
  simulate->add_option("--delta", delta, "total error")->capture_default_str();
  simulate->add_option("--T", T, "tester query count")->capture_default_str();
  simulate->add_option("--depth", depth, "brickwork depth for substituted levels")->capture_default_str();

  std::string replay_path;
  bool check = false;
  auto* replay = app.add_subcommand("replay", "re-run the config embedded in a report");
  replay->add_option("report", replay_path, "report JSON")->required();
  replay->add_flag("--check", check, "exit 1 unless the new report is byte-identical");
  replay->add_option("-o,--out", out.path, "write the report here (default stdout)");
  replay->add_option("--format", out.format, "json | csv | pretty")->check(CLI::IsMember({"json", "csv", "pretty"}));
  replay->add_option("--events", out.events, "JSON-lines event log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (replay->parsed()) {
      const std::string original = slurp(replay_path);
      return emit(original, true, out, check ? &original : nullptr);
    }
    const CLI::App* sub = app.get_subcommands().front();
    cfg = {{"subcommand", sub->get_name()}, {"target", target}, {"adversary", adversary}, {"n", n},
           {"padding", padding},             {"trials", trials}, {"budget", budget},       {"seed", seed},
           {"cutoff", cutoff},               {"steps", steps},   {"N", N},                 {"M", M},
           {"samples", samples},             {"epsilon", epsilon}, {"t", t},               {"depth", depth},
           {"sampler", sampler},             {"dim", dim},       {"delta", delta},         {"T", T},
           {"canonical", !non_canonical}};
    return emit(cfg.dump(), false, out);
  } catch (const CLI::Error& e) {
    std::cerr << "qoracle: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "qoracle: " << e.what() << "\n";
    return kInternal;
  }
}
