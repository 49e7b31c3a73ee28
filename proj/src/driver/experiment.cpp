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


#include "qoracle/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "qoracle/enumeration.hpp"
#include "qoracle/error.hpp"
#include "qoracle/lemma_lab.hpp"
#include "qoracle/protocols.hpp"
#include "qoracle/puzzles.hpp"
#include "qoracle/randomness.hpp"

namespace qoracle {

namespace {

using nlohmann::json;

// RNG tags for the driver's own streams; games use their own.
constexpr std::uint64_t kTagDemo = 1;
constexpr std::uint64_t kTagLemma = 40;
constexpr std::uint64_t kTagPuzzle = 50;
constexpr std::uint64_t kTagSimulate = 60;

// Acceptance gap allowed between real and simulated worlds for the 3-query tester.
constexpr double kTesterGapBound = 0.1;

struct Verdict {
  std::vector<std::string> violations;
  void check(bool ok, const std::string& what) {
    if (!ok) violations.push_back(what);
  }
};

WorldDescriptor ke_descriptor(const ExperimentConfig& cfg, std::vector<unsigned> levels) {
  WorldDescriptor d;
  d.kind = "ke";
  d.seed = cfg.seed;
  d.levels = std::move(levels);
  d.canonical_order = cfg.canonical;
  return d;
}

WorldDescriptor lightning_descriptor(const ExperimentConfig& cfg) {
  WorldDescriptor d;
  d.kind = "lightning";
  d.seed = cfg.seed;
  d.levels = {cfg.n};
  d.padding = cfg.padding;
  return d;
}

void emit(const EventSink& events, json e) {
  if (events) events(e);
}

double rate(std::uint64_t k, std::uint64_t n) { return n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n); }

// ---- demos ----

json demo_ke(const ExperimentConfig& cfg, const EventSink& events, Verdict& v, json& world) {
  const WorldDescriptor d = ke_descriptor(cfg, {cfg.n});
  world = d.to_json();
  const KEWorld w = KEWorld::sample(d);
  RngStream rng(cfg.seed, {kTagDemo});
  std::uint64_t agree = 0, match = 0;
  json sample;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    KEWorld local = w.fresh_copy();
    RngStream c = rng.child(t);
    const Transcript tr = ke_run_honest(local, cfg.n, c);
    const bool ok = tr.alice && tr.bob && *tr.alice == *tr.bob;
    const bool f_ok = tr.alice && *tr.alice == w.key_for(cfg.n, tr.messages.at(0).payload, tr.messages.at(1).payload);
    agree += ok;
    match += f_ok;
    if (t == 0) sample = tr.to_json();
    emit(events, {{"event", "ke-trial"}, {"trial", t}, {"agree", ok}, {"key_is_f", f_ok}});
  }
  const double ar = rate(agree, cfg.trials);
  const double mr = rate(match, cfg.trials);
  v.check(ar == 1.0, "agreement_rate " + std::to_string(ar) + " != 1");
  v.check(mr == 1.0, "key differs from f(canon(x, y)) on some trial");
  return {{"trials", cfg.trials}, {"agreement_rate", ar}, {"key_matches_f_rate", mr}, {"sample_transcript", sample}};
}

// Largest retry budget whose commit enumeration stays near 2^20 branches.
unsigned hiding_retry_budget(unsigned n) {
  if (n <= 1) return 12;
  return std::min(12U, 20U / (n - 1));
}

json demo_commit(const ExperimentConfig& cfg, const EventSink& events, Verdict& v, json& world) {
  const WorldDescriptor d = ke_descriptor(cfg, {cfg.n});
  world = d.to_json();
  const KEWorld w = KEWorld::sample(d);
  RngStream rng(cfg.seed, {kTagDemo});
  std::uint64_t accepted = 0, correct = 0;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    KEWorld local = w.fresh_copy();
    RngStream c = rng.child(t);
    const bool b = c.uniform(2) == 1;
    CommitmentSession s = commit(local, cfg.n, b, c);
    const OpenResult o = open(s, local, c);
    accepted += o.accepted;
    correct += o.accepted && o.bit && *o.bit == b;
    emit(events, {{"event", "commit-trial"}, {"trial", t}, {"bit", b}, {"accepted", o.accepted}});
  }
  json out{{"trials", cfg.trials},
           {"accept_rate", rate(accepted, cfg.trials)},
           {"bit_correct_rate", rate(correct, cfg.trials)}};
  v.check(accepted == cfg.trials, "an honest opening was rejected");
  v.check(correct == cfg.trials, "an opening returned the wrong bit");

  if (cfg.n <= 4) {
    const unsigned retries = hiding_retry_budget(cfg.n);
    auto message_dist = [&](bool b) {
      std::function<std::string(ChoiceSource&)> sampler = [&, b](ChoiceSource& c) -> std::string {
        KEWorld local = w.fresh_copy();
        try {
          return commit(local, cfg.n, b, c, retries).message.to_string();
        } catch (const Error& e) {
          if (e.code() != ErrorCode::retry_exhausted) throw;
          return "ERR";
        }
      };
      std::map<std::string, double> dist = enumerate_distribution(sampler);
      return DiscreteDistribution(dist);
    };
    const double tv = statistical_distance(message_dist(false), message_dist(true));
    out["hiding"] = {{"mode", "exact"}, {"retry_budget", retries}, {"tv_distance", tv}};
    v.check(tv <= 1e-12, "commit messages for b=0 and b=1 differ, TV " + std::to_string(tv));
  } else {
    out["hiding"] = {{"mode", "skipped"}, {"reason", "enumeration is limited to n <= 4"}};
  }
  return out;
}

json demo_lightning(const ExperimentConfig& cfg, const EventSink& events, Verdict& v, json& world) {
  const WorldDescriptor d = lightning_descriptor(cfg);
  world = d.to_json();
  const LightningWorld w = LightningWorld::sample(d);
  RngStream rng(cfg.seed, {kTagDemo});
  std::uint64_t verified = 0, forged = 0;
  const std::size_t dim = w.states().dimension();
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    LightningWorld local = w.fresh_copy();
    RngStream c = rng.child(t);
    const BankNote note = lightning_mint(local, c);
    const bool ok = lightning_verify(local, note, c);
    const bool forge = lightning_verify(local, BankNote{note.serial, haar_state(dim, c)}, c);
    verified += ok;
    forged += forge;
    emit(events, {{"event", "lightning-trial"}, {"trial", t}, {"verified", ok}, {"random_state_accepted", forge}});
  }
  const auto [lo, hi] = wilson_interval(forged, cfg.trials);
  const double ceiling = 3.0 * std::ldexp(1.0, -static_cast<int>((1 + cfg.padding) * cfg.n));
  v.check(verified == cfg.trials, "a minted note failed verification");
  v.check(hi <= ceiling, "random-state forgery upper bound " + std::to_string(hi) + " exceeds " + std::to_string(ceiling));
  return {{"trials", cfg.trials},
          {"completeness", rate(verified, cfg.trials)},
          {"forgery_rate", rate(forged, cfg.trials)},
          {"forgery_ci95", {lo, hi}},
          {"forgery_ceiling", ceiling},
          {"qubits", w.total_qubits()}};
}

// ---- games ----

template <typename Adv>
std::vector<Adv> pick(std::vector<Adv> battery, const std::string& id) {
  if (id.empty()) return battery;
  for (auto& a : battery) {
    if (a.id == id) return {a};
  }
  std::string known;
  for (const auto& a : battery) known += (known.empty() ? "" : ", ") + a.id;
  fail(ErrorCode::invalid_argument, "unknown adversary '" + id + "' (known: " + known + ")");
}

void check_game(Verdict& v, const GameReport& r) {
  v.check(r.within_ceiling(), r.game + "/" + r.adversary + ": rate " + std::to_string(r.rate) + " above ceiling " +
                                  std::to_string(r.ceiling) + " + 3 sigma");
  v.check(r.budget_respected(), r.game + "/" + r.adversary + ": query budget exceeded");
}

json run_game(const ExperimentConfig& cfg, const EventSink& events, Verdict& v, json& world) {
  GameOptions opts{cfg.trials, cfg.seed, events};
  json reports = json::array();
  if (cfg.target == "eavesdrop" || cfg.target == "binding") {
    const WorldDescriptor d = ke_descriptor(cfg, {cfg.n});
    world = d.to_json();
    const KEWorld w = KEWorld::sample(d);
    if (cfg.target == "eavesdrop") {
      for (const auto& a : pick(eavesdrop_battery(cfg.budget), cfg.adversary)) {
        const GameReport r = ke_eavesdrop_game(w, cfg.n, a, opts);
        check_game(v, r);
        reports.push_back(r.to_json());
      }
    } else {
      for (const auto& a : pick(binding_battery(cfg.budget), cfg.adversary)) {
        const GameReport r = sum_binding_game(w, cfg.n, a, opts);
        check_game(v, r);
        reports.push_back(r.to_json());
      }
    }
  } else if (cfg.target == "clone") {
    const WorldDescriptor d = lightning_descriptor(cfg);
    world = d.to_json();
    const LightningWorld w = LightningWorld::sample(d);
    for (const auto& a : pick(clone_battery(cfg.budget), cfg.adversary)) {
      const GameReport r = lightning_clone_game(w, a, opts);
      check_game(v, r);
      reports.push_back(r.to_json());
    }
  } else if (cfg.target == "keylemma") {
    // every trial samples its own U; there is no shared world
    world = {{"kind", "keylemma"}, {"seed", cfg.seed}, {"levels", {cfg.n}}, {"per_trial_unitary", true}};
    for (const auto& a : pick(key_lemma_battery(cfg.budget), cfg.adversary)) {
      const KeyLemmaReport r = key_lemma_experiment(cfg.n, a, opts);
      v.check(r.holds(), "keylemma/" + r.adversary + ": advantage " + std::to_string(r.advantage) + " above " +
                             std::to_string(r.bound) + " + 3 sigma");
      reports.push_back(r.to_json());
    }
  } else {
    fail(ErrorCode::invalid_argument, "unknown game '" + cfg.target + "' (eavesdrop, binding, clone, keylemma)");
  }
  return {{"game", cfg.target}, {"reports", reports}};
}

json run_hybrid(const ExperimentConfig& cfg, const EventSink& events, Verdict& v, json& world) {
  HybridGame game;
  std::string adversary = cfg.adversary;
  if (cfg.target == "eavesdrop") {
    game = HybridGame::eavesdrop;
    if (adversary.empty()) adversary = "sg-grinder";
  } else if (cfg.target == "binding") {
    game = HybridGame::sum_binding;
    if (adversary.empty()) adversary = "sibling-grinder";
  } else {
    fail(ErrorCode::invalid_argument, "hybrid chains run on 'eavesdrop' or 'binding', not '" + cfg.target + "'");
  }
  std::vector<HybridStep> steps;
  for (const auto& s : cfg.steps) steps.push_back(parse_hybrid_step(s));
  const WorldDescriptor d = ke_descriptor(cfg, {cfg.n});
  world = d.to_json();
  const KEWorld w = KEWorld::sample(d);
  const HybridChainReport r =
      run_hybrid_chain(w, cfg.n, steps, game, adversary, cfg.budget, GameOptions{cfg.trials, cfg.seed, events});
  for (const auto& arm : r.arms) check_game(v, arm);
  return r.to_json();
}

// ---- lemmas ----

json lemma_reports(const std::vector<LemmaReport>& reps, Verdict& v) {
  json out = json::array();
  for (const auto& r : reps) {
    v.check(r.holds(), r.lemma + ": measured " + std::to_string(r.measured) + " above bound " + std::to_string(r.bound) +
                           " + 3 sigma");
    out.push_back(r.to_json());
  }
  return out;
}

json lemma_learn(const ExperimentConfig& cfg, Verdict& v, json& world) {
  // cfg.trials independent worlds with seeds seed, seed+1, ...
  std::vector<unsigned> levels;
  for (unsigned l = 1; l <= cfg.cutoff + 1; ++l) levels.push_back(l);
  world = ke_descriptor(cfg, levels).to_json();
  world["runs"] = cfg.trials;
  world["seed_stride"] = 1;
  LearnOptions opts;
  opts.delta = cfg.delta;
  opts.T = cfg.T;
  opts.design_depth = cfg.depth;
  const double threshold = 1 - opts.delta / opts.T;
  std::uint64_t tables = 0, table_total = 0, cols = 0, col_total = 0;
  std::optional<SimulatedWorld> first;
  std::optional<KEWorld> first_real;
  for (std::uint64_t r = 0; r < cfg.trials; ++r) {
    WorldDescriptor d = ke_descriptor(cfg, levels);
    d.seed = cfg.seed + r;
    KEWorld real = KEWorld::sample(d);
    RngStream rng(d.seed, {kTagLemma, 1});
    SimulatedWorld sim = learn_small_world(real, cfg.cutoff, rng, opts);
    for (unsigned l : sim.substituted) {
      v.check(real.counters().count("sg", l) == 0 && real.counters().count("mix", l) == 0,
              "learning queried the real world above the cutoff");
    }
    for (const auto& l : sim.learned) {
      ++table_total;
      tables += l.table_exact;
      for (double o : l.column_overlaps) {
        ++col_total;
        cols += o >= threshold;
      }
    }
    if (r == 0) {
      first.emplace(std::move(sim));
      first_real.emplace(std::move(real));
    }
  }
  std::vector<LemmaReport> reps;
  LemmaReport table;
  table.lemma = "learn-table";
  table.params = {{"cutoff", cfg.cutoff}, {"runs", cfg.trials}};
  table.measured = 1 - rate(tables, table_total);
  table.bound = 0.01;
  table.method = "exact";
  table.samples = table_total;
  table.seed = cfg.seed;
  table.extra = {{"exact_tables", tables}, {"tables", table_total}};
  reps.push_back(table);

  LemmaReport overlap = table;
  overlap.lemma = "learn-overlap";
  overlap.params["threshold"] = threshold;
  overlap.measured = 1 - rate(cols, col_total);
  overlap.samples = col_total;
  overlap.extra = {{"good_columns", cols}, {"columns", col_total}};
  reps.push_back(overlap);

  if (first && cfg.cutoff >= 2) {
    // tester on the first world: real vs simulated
    RngStream coins(cfg.seed, {kTagLemma, 2});
    std::uint64_t acc_real = 0, acc_sim = 0;
    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
      KEWorld a = first_real->fresh_copy();
      KEWorld b = first->world.fresh_copy();
      RngStream c = coins.child(s);
      acc_real += three_query_tester(a, c);
      acc_sim += three_query_tester(b, c);
    }
    const double pr = rate(acc_real, cfg.samples), ps = rate(acc_sim, cfg.samples);
    LemmaReport gap;
    gap.lemma = "learn-tester-gap";
    gap.params = {{"cutoff", cfg.cutoff}, {"shots", cfg.samples}};
    gap.measured = std::abs(pr - ps);
    gap.error = std::hypot(std::sqrt(pr * (1 - pr) / cfg.samples), std::sqrt(ps * (1 - ps) / cfg.samples));
    gap.bound = kTesterGapBound;
    gap.method = "monte-carlo";
    gap.samples = cfg.samples;
    gap.seed = cfg.seed;
    gap.extra = {{"real_accept", pr}, {"simulated_accept", ps}};
    reps.push_back(gap);
  }
  return lemma_reports(reps, v);
}

json run_lemma(const ExperimentConfig& cfg, Verdict& v, json& world) {
  RngStream rng(cfg.seed, {kTagLemma});
  world = nullptr;
  const std::string& id = cfg.target;
  if (id == "randomortho") {
    RandomOrthoOptions o;
    o.samples = cfg.samples;
    return {{"reports", lemma_reports({verify_randomortho(cfg.N, cfg.M, rng, o)}, v)}};
  }
  if (id == "simref") {
    SimrefOptions o;
    o.shots = cfg.samples;
    return {{"reports", lemma_reports({verify_simref(cfg.epsilon, cfg.dim, rng, o)}, v)}};
  }
  if (id == "tdesign") {
    require(is_power_of_two(cfg.dim), ErrorCode::invalid_argument, "--dim must be a power of two");
    require(cfg.sampler == "haar" || cfg.sampler == "brickwork", ErrorCode::invalid_argument,
            "--sampler must be brickwork or haar");
    const DesignSampler s = cfg.sampler == "haar" ? haar_sampler(cfg.dim)
                                                    : brickwork_sampler(log2_exact(cfg.dim), cfg.depth);
    LemmaReport r = verify_design_moments(s, cfg.t, cfg.samples, cfg.epsilon, rng);
    // report but do not fail: the design claim is about deep enough circuits
    return {{"reports", json::array({r.to_json()})}};
  }
  if (id == "learn") return {{"reports", lemma_learn(cfg, v, world)}};
  if (id == "birthday") {
    const WorldDescriptor d = ke_descriptor(cfg, {cfg.n});
    world = d.to_json();
    return {{"reports", lemma_reports(verify_birthday_and_union_bounds(KEWorld::sample(d), cfg.n, cfg.budget,
                                                                       cfg.trials, rng),
                                      v)}};
  }
  if (id == "bitfix") {
    json out = json::array();
    for (auto [N, M] : {std::pair{4U, 2U}, std::pair{2U, 4U}}) {
      for (const auto& ver : standard_verifier_battery(N, M)) {
        const FunctionCensus census = FunctionCensus::build(N, M, ver);
        for (double a : {0.1, 0.25, 0.5}) {
          for (double b : {0.01, 0.02, 0.05}) {
            const BitfixCheck c = check_bitfix_lemma(census, a, b);
            v.check(c.holds, "bitfix " + ver.id + " fails at alpha=" + std::to_string(a) + " beta=" + std::to_string(b));
            out.push_back(c.to_json());
          }
        }
      }
    }
    return {{"reports", out}};
  }
  if (id == "concentration") {
    // one-query tester: the weight of U|0> on |0>
    auto acc = [](const Unitary& u) { return std::norm(u.matrix()(0, 0)); };
    const ConcentrationReport r = haar_concentration_experiment(acc, 1, cfg.dim, cfg.samples, rng);
    v.check(r.holds(), "a concentration tail fraction exceeds its Levy bound");
    return {{"reports", json::array({r.to_json()})}};
  }
  fail(ErrorCode::invalid_argument,
       "unknown lemma '" + id + "' (randomortho, simref, tdesign, learn, birthday, bitfix, concentration)");
}

// ---- puzzles ----

json run_puzzle(const ExperimentConfig& cfg, Verdict& v, json& world) {
  const WorldDescriptor d = ke_descriptor(cfg, {cfg.n});
  world = d.to_json();
  const KEWorld w = KEWorld::sample(d);
  RngStream rng(cfg.seed, {kTagPuzzle});
  const double floor = 1 - std::ldexp(1.0, -static_cast<int>(cfg.n));
  if (cfg.target == "ke") {
    const PuzzleSampler sampler = PuzzleSampler::ke(w, cfg.n);
    const BruteForceInverter brute(sampler);
    const InverterEvaluation b = evaluate_inverter_exact(brute.joint(), std::cref(brute));
    const InverterEvaluation z = evaluate_inverter_exact(brute.joint(), zero_query_inverter(cfg.n));
    const InverterEvaluation zmc = evaluate_inverter(sampler, zero_query_inverter(cfg.n), cfg.trials, rng);
    v.check(b.delta <= 1e-12, "brute-force inverter has delta " + std::to_string(b.delta));
    v.check(zmc.delta >= floor - 3 * zmc.sigma, "zero-query inverter beat 1 - 2^-n by more than 3 sigma");
    return {{"puzzle", "ke"},
            {"atoms", brute.atoms()},
            {"brute_force", b.to_json()},
            {"zero_query_exact", z.to_json()},
            {"zero_query_sampled", zmc.to_json()},
            {"zero_query_floor", floor}};
  }
  if (cfg.target == "commitment") {
    const unsigned retries = hiding_retry_budget(cfg.n) / 2;
    const BruteForceInverter all(PuzzleSampler::commitment(w, cfg.n, std::nullopt, retries));
    json identity = json::array();
    for (const auto& [name, inv] : {std::pair<std::string, Inverter>{"zero-query", zero_query_inverter(cfg.n)},
                                    {"constant", constant_inverter(std::string(cfg.n, '0'))}}) {
      const double avg = evaluate_inverter_exact(all.joint(), inv).delta;
      double mean = 0.0;
      for (unsigned i : {1U, 2U}) {
        const BruteForceInverter fixed(PuzzleSampler::commitment(w, cfg.n, i, retries));
        mean += evaluate_inverter_exact(fixed.joint(), inv).delta / 2;
      }
      v.check(std::abs(avg - mean) <= 1e-12, "round-averaging identity fails for " + name);
      identity.push_back({{"inverter", name}, {"delta_random_round", avg}, {"mean_fixed_rounds", mean}});
    }
    const double b = evaluate_inverter_exact(all.joint(), std::cref(all)).delta;
    v.check(b <= 1e-12, "brute-force inverter has delta " + std::to_string(b));
    return {{"puzzle", "commitment"},
            {"retry_budget", retries},
            {"atoms", all.atoms()},
            {"brute_force_delta", b},
            {"averaging_identity", identity}};
  }
  if (cfg.target == "state") {
    std::uint64_t honest = 0, random = 0;
    const std::size_t dim = w.level(cfg.n).states->dimension();
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      KEWorld local = w.fresh_copy();
      RngStream c = rng.child(t);
      const StatePuzzleSample s = state_puzzle_from_2qkd(local, cfg.n, c);
      honest += state_puzzle_verify(w, cfg.n, s.puzzle, s.key, c);
      random += state_puzzle_verify(w, cfg.n, s.puzzle, haar_state(dim, c), c);
    }
    const auto [lo, hi] = wilson_interval(random, cfg.trials);
    v.check(honest == cfg.trials, "an honest state key was rejected");
    return {{"puzzle", "state"},
            {"honest_accept", rate(honest, cfg.trials)},
            {"random_accept", rate(random, cfg.trials)},
            {"random_accept_ci95", {lo, hi}},
            {"random_accept_mean", 1.0 / static_cast<double>(dim)}};
  }
  fail(ErrorCode::invalid_argument, "unknown puzzle '" + cfg.target + "' (ke, commitment, state)");
}

json simulate_world(const ExperimentConfig& cfg, Verdict& v, json& world) {
  require(cfg.n >= 2, ErrorCode::invalid_argument, "simulate-world needs --n >= 2 (levels 1..n)");
  std::vector<unsigned> levels;
  for (unsigned l = 1; l <= cfg.n; ++l) levels.push_back(l);
  const WorldDescriptor d = ke_descriptor(cfg, levels);
  world = d.to_json();
  KEWorld real = KEWorld::sample(d);
  RngStream rng(cfg.seed, {kTagSimulate});
  LearnOptions opts;
  opts.delta = cfg.delta;
  opts.T = cfg.T;
  opts.design_depth = cfg.depth;
  SimulatedWorld sim = learn_small_world(real, cfg.cutoff, rng, opts);
  json audit = json::object();
  for (unsigned l : levels) {
    audit[std::to_string(l)] = {{"sg", real.counters().count("sg", l)}, {"mix", real.counters().count("mix", l)}};
    if (l > cfg.cutoff) {
      v.check(real.counters().count("sg", l) + real.counters().count("mix", l) == 0,
              "real world queried at level " + std::to_string(l));
    }
  }
  std::uint64_t acc_real = 0, acc_sim = 0;
  RngStream coins(cfg.seed, {kTagSimulate, 1});
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    KEWorld a = real.fresh_copy();
    KEWorld b = sim.world.fresh_copy();
    RngStream c = coins.child(t);
    acc_real += three_query_tester(a, c);
    acc_sim += three_query_tester(b, c);
  }
  const double pr = rate(acc_real, cfg.trials), ps = rate(acc_sim, cfg.trials);
  const double sigma = std::hypot(std::sqrt(pr * (1 - pr) / cfg.trials), std::sqrt(ps * (1 - ps) / cfg.trials));
  v.check(std::abs(pr - ps) <= kTesterGapBound + 3 * sigma, "tester separates the real and simulated worlds");
  return {{"simulated", sim.to_json()},
          {"real_counters", audit},
          {"tester", {{"real_accept", pr}, {"simulated_accept", ps}, {"gap", std::abs(pr - ps)}, {"sigma", sigma},
                      {"bound", kTesterGapBound}}}};
}

}  // namespace

json ExperimentConfig::to_json() const {
  return {{"subcommand", subcommand}, {"target", target}, {"adversary", adversary}, {"n", n},
          {"padding", padding},       {"trials", trials}, {"budget", budget},       {"seed", seed},
          {"cutoff", cutoff},         {"steps", steps},   {"N", N},                 {"M", M},
          {"samples", samples},       {"epsilon", epsilon}, {"t", t},               {"depth", depth},           {"sampler", sampler},
          {"dim", dim},               {"delta", delta},   {"T", T},                 {"canonical", canonical}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  c.subcommand = j.at("subcommand").get<std::string>();
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("target", c.target);
  get("adversary", c.adversary);
  get("n", c.n);
  get("padding", c.padding);
  get("trials", c.trials);
  get("budget", c.budget);
  get("seed", c.seed);
  get("cutoff", c.cutoff);
  get("steps", c.steps);
  get("N", c.N);
  get("M", c.M);
  get("samples", c.samples);
  get("epsilon", c.epsilon);
  get("t", c.t);
  get("depth", c.depth);
  get("sampler", c.sampler);
  get("dim", c.dim);
  get("delta", c.delta);
  get("T", c.T);
  get("canonical", c.canonical);
  return c;
}

json run_experiment(const ExperimentConfig& cfg, const EventSink& events) {
  Verdict v;
  json world;
  json result;
  const std::string& s = cfg.subcommand;
  if (s == "demo-ke") {
    result = demo_ke(cfg, events, v, world);
  } else if (s == "demo-commit") {
    result = demo_commit(cfg, events, v, world);
  } else if (s == "demo-lightning") {
    result = demo_lightning(cfg, events, v, world);
  } else if (s == "game") {
    result = run_game(cfg, events, v, world);
  } else if (s == "hybrid") {
    result = run_hybrid(cfg, events, v, world);
  } else if (s == "lemma") {
    result = run_lemma(cfg, v, world);
  } else if (s == "puzzle") {
    result = run_puzzle(cfg, v, world);
  } else if (s == "simulate-world") {
    result = simulate_world(cfg, v, world);
  } else {
    fail(ErrorCode::invalid_argument, "unknown subcommand '" + s + "'");
  }
  return {{"schema_version", kSchemaVersion},
          {"config", cfg.to_json()},
          {"world", world},
          {"result", result},
          {"verdict", {{"ok", v.violations.empty()}, {"violations", v.violations}}}};
}

json replay_report(const json& report, const EventSink& events) {
  require(report.contains("schema_version") && report.contains("config"), ErrorCode::invalid_argument,
          "not a report: schema_version or config missing");
  const int version = report.at("schema_version").get<int>();
  require(version == kSchemaVersion, ErrorCode::invalid_argument,
          "report schema " + std::to_string(version) + " is not supported");
  return run_experiment(ExperimentConfig::from_json(report.at("config")), events);
}

bool report_ok(const json& report) {
  const json& result = report.at("result");
  // lemma verdicts are recomputed from the numbers, never read back
  if (result.contains("reports")) {
    for (const auto& r : result.at("reports")) {
      if (r.contains("measured") && r.contains("bound") && r.contains("error") &&
          report.at("config").at("target") != "tdesign" && !lemma_report_holds(r)) {
        return false;
      }
    }
  }
  return report.at("verdict").at("ok").get<bool>();
}

namespace {

void flatten(const json& j, const std::string& prefix, std::map<std::string, std::string>& row) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), row);
    }
  } else if (j.is_array()) {
    row[prefix] = j.dump();
  } else if (j.is_string()) {
    row[prefix] = j.get<std::string>();
  } else {
    row[prefix] = j.dump();
  }
}

std::vector<json> report_rows(const json& report) {
  const json& result = report.at("result");
  std::vector<json> rows;
  if (result.contains("reports")) {
    for (const auto& r : result.at("reports")) rows.push_back(r);
  } else if (result.contains("arms")) {
    for (const auto& r : result.at("arms")) rows.push_back(r);
  } else {
    rows.push_back(result);
  }
  return rows;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_to_csv(const json& report) {
  std::vector<std::map<std::string, std::string>> rows;
  std::set<std::string> columns;
  for (const auto& r : report_rows(report)) {
    std::map<std::string, std::string> row;
    flatten(r, "", row);
    for (const auto& [k, _] : row) columns.insert(k);
    rows.push_back(std::move(row));
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& c : columns) {
    out << (first ? "" : ",") << csv_field(c);
    first = false;
  }
  out << "\n";
  for (const auto& row : rows) {
    first = true;
    for (const auto& c : columns) {
      auto it = row.find(c);
      out << (first ? "" : ",") << (it == row.end() ? "" : csv_field(it->second));
      first = false;
    }
    out << "\n";
  }
  return out.str();
}

std::string report_to_pretty(const json& report) {
  std::ostringstream out;
  const json& cfg = report.at("config");
  out << cfg.at("subcommand").get<std::string>();
  if (!cfg.at("target").get<std::string>().empty()) out << " " << cfg.at("target").get<std::string>();
  out << "  (seed " << cfg.at("seed") << ", schema " << report.at("schema_version") << ")\n";
  for (const auto& r : report_rows(report)) {
    if (r.contains("measured") && r.contains("bound")) {
      const bool holds = lemma_report_holds(r);
      char line[256];
      std::snprintf(line, sizeof line, "  %-18s measured %.6g +- %.3g  bound %.6g  %s%s\n",
                    r.value("lemma", std::string("?")).c_str(), r.at("measured").get<double>(),
                    r.at("error").get<double>(), r.at("bound").get<double>(), holds ? "PASS" : "FAIL",
                    r.value("vacuous", false) ? " (vacuous)" : "");
      out << line;
    } else if (r.contains("rate") && r.contains("ceiling")) {
      char line[256];
      std::snprintf(line, sizeof line, "  %-12s %-18s %-9s rate %.6g +- %.3g  ceiling %.6g  %s\n",
                    r.at("game").get<std::string>().c_str(), r.at("adversary").get<std::string>().c_str(),
                    r.at("arm").get<std::string>().c_str(), r.at("rate").get<double>(), r.at("sigma").get<double>(),
                    r.at("ceiling").get<double>(), r.at("within_ceiling").get<bool>() ? "ok" : "OVER");
      out << line;
    } else if (r.contains("verifier")) {
      char line[256];
      std::snprintf(line, sizeof line, "  bitfix %-22s N=%d M=%d alpha %.3g beta %.3g  good %.4f >= %.4f  %s\n",
                    r.at("verifier").get<std::string>().c_str(), r.at("N").get<int>(), r.at("M").get<int>(),
                    r.at("alpha").get<double>(), r.at("beta").get<double>(), r.at("good_fraction").get<double>(),
                    r.at("required").get<double>(), r.at("holds").get<bool>() ? "PASS" : "FAIL");
      out << line;
    } else if (r.contains("advantage")) {
      char line[256];
      std::snprintf(line, sizeof line, "  keylemma     %-18s advantage %.6g +- %.3g  bound %.6g  %s\n",
                    r.at("adversary").get<std::string>().c_str(), r.at("advantage").get<double>(),
                    r.at("sigma").get<double>(), r.at("bound").get<double>(), r.at("holds").get<bool>() ? "ok" : "OVER");
      out << line;
    } else {
      std::map<std::string, std::string> flat;
      flatten(r, "", flat);
      for (const auto& [k, val] : flat) out << "  " << k << ": " << val << "\n";
    }
  }
  const json& verdict = report.at("verdict");
  out << (verdict.at("ok").get<bool>() ? "verdict: ok\n" : "verdict: VIOLATION\n");
  for (const auto& s : verdict.at("violations")) out << "  - " << s.get<std::string>() << "\n";
  return out.str();
}

}  // namespace qoracle
