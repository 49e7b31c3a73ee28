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


#ifndef QORACLE_GAMES_HPP
#define QORACLE_GAMES_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qoracle/bitstring.hpp"
#include "qoracle/numerics.hpp"
#include "qoracle/oracle_worlds.hpp"
#include "qoracle/protocols.hpp"
#include "qoracle/rng.hpp"

namespace qoracle {

// Sink for per-trial JSON events; may be empty.
using EventSink = std::function<void(const nlohmann::json&)>;

struct GameOptions {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  EventSink events;
};

struct GameReport {
  std::string game;
  std::string adversary;
  std::string arm = "base";
  unsigned n = 0;
  unsigned budget = 0;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t wins = 0;
  std::uint64_t faults = 0;
  double rate = 0.0;
  double ci_low = 0.0;  // Wilson 95%
  double ci_high = 0.0;
  double sigma = 0.0;  // sqrt(rate(1-rate)/trials)
  double ceiling = 1.0;
  // Largest per-trial adversary query count per oracle, read off world counters.
  std::map<std::string, std::uint64_t> max_queries;
  nlohmann::json world;
  std::vector<std::uint8_t> outcomes;  // per trial, 1 on a win

  bool within_ceiling() const { return rate <= ceiling + 3 * sigma; }
  bool budget_respected() const;
  nlohmann::json to_json(bool with_outcomes = false) const;
};

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);
// Fills rate, CI and sigma from wins/trials.
void finalize_rates(GameReport& r);

// ---- budgeted oracle handles ----

// What an adversary may call. Every oracle has its own budget; the call that
// would exceed it throws ErrorCode::adversary_fault. Usage is measured as the
// change in the world's own counters across each call.
class KEOracles {
 public:
  KEOracles(KEWorld& world, unsigned budget, RngStream& oracle_rng);

  std::optional<SgOutput> sg(unsigned n);
  KeyOutput mix(unsigned n, const BitString& a, const BitString& b, const PureState& c);
  KeyOutput mix(unsigned n, const PureState& abc);
  SearchResult pspace(std::uint64_t space_size, const std::function<double(std::uint64_t)>& score,
                      double threshold = 0.5);

  unsigned budget() const { return budget_; }
  const std::map<std::string, std::uint64_t>& used() const { return used_; }

 private:
  void charge(const std::string& oracle);
  void record(const std::string& oracle, unsigned n, std::uint64_t before);

  KEWorld& world_;
  unsigned budget_;
  RngStream& rng_;
  std::map<std::string, std::uint64_t> used_;
};

class LightningOracles {
 public:
  LightningOracles(LightningWorld& world, unsigned budget, RngStream& oracle_rng);

  unsigned level() const { return world_.level(); }
  unsigned total_qubits() const { return world_.total_qubits(); }
  unsigned budget() const { return budget_; }
  SgOutput sg();
  bool v(const BitString& serial, const PureState& state);

  const std::map<std::string, std::uint64_t>& used() const { return used_; }

 private:
  void charge(const std::string& oracle);

  LightningWorld& world_;
  unsigned budget_;
  RngStream& rng_;
  std::map<std::string, std::uint64_t> used_;
};

// Apply plus one flavour of Test, fixed by the experiment arm.
class KeyLemmaOracles {
 public:
  enum class Flavour { test, test_prime };
  KeyLemmaOracles(KeyLemmaWorld& world, Flavour flavour, unsigned budget, RngStream& oracle_rng);

  unsigned level() const { return world_.level(); }
  unsigned budget() const { return budget_; }
  PureState apply(const BitString& x);
  PureState apply(const PureState& input);
  bool test(const BitString& x, const PureState& b);

  const std::map<std::string, std::uint64_t>& used() const { return used_; }

 private:
  void charge(const std::string& oracle);

  KeyLemmaWorld& world_;
  Flavour flavour_;
  unsigned budget_;
  RngStream& rng_;
  std::map<std::string, std::uint64_t> used_;
};

// ---- adversaries ----

struct EavesdropView {
  unsigned n = 0;
  BitString x;
  BitString y;
  const KEWorld* internals = nullptr;  // set only for test doubles
  std::string advice;
};

struct EavesdropAdversary {
  std::string id;
  unsigned budget = 0;
  bool test_double = false;  // sees world internals; exempt from the ceiling
  std::function<BitString(KEOracles&, const EavesdropView&, RngStream& coins)> guess;
};

// Plays the committer side of sum-binding: commit, then try to open to a
// uniformly random bit b chosen after the commitment.
class Committer {
 public:
  virtual ~Committer() = default;
  virtual BitString commit(KEOracles& oracles, unsigned n, RngStream& coins) = 0;
  virtual KeyOutput open(KEOracles& oracles, bool b, const BitString& challenge, RngStream& coins) = 0;
};

struct BindingAdversary {
  std::string id;
  unsigned budget = 0;
  std::function<std::unique_ptr<Committer>()> make;
};

// Two registers for one serial, either as a product or as a joint state
// (register A = first half of the qubits).
struct CloneSubmission {
  BitString serial;
  std::optional<PureState> a;
  std::optional<PureState> b;
  std::optional<PureState> joint;
};

struct CloneAdversary {
  std::string id;
  unsigned budget = 0;
  std::function<CloneSubmission(LightningOracles&, RngStream& coins)> forge;
};

struct KeyLemmaAdversary {
  std::string id;
  unsigned budget = 0;
  std::function<bool(KeyLemmaOracles&, RngStream& coins)> distinguish;
};

std::vector<EavesdropAdversary> eavesdrop_battery(unsigned budget);
std::vector<BindingAdversary> binding_battery(unsigned budget);
std::vector<CloneAdversary> clone_battery(unsigned budget);
std::vector<KeyLemmaAdversary> key_lemma_battery(unsigned budget);

// Analytic ceilings for the standard batteries.
double eavesdrop_ceiling(unsigned n, unsigned budget);  // 2^-n + 2T/2^n
double binding_ceiling(unsigned n, unsigned budget);    // 1/2 + 2^-n/2 + T/2^(n-1)
double clone_ceiling(unsigned n, unsigned budget);      // T^2/2^n

// ---- games ----

GameReport ke_eavesdrop_game(const KEWorld& world, unsigned n, const EavesdropAdversary& adv,
                             const GameOptions& opts);
GameReport sum_binding_game(const KEWorld& world, unsigned n, const BindingAdversary& adv,
                            const GameOptions& opts);
// Registers are verified in order A then B; B sees the state left after A's
// measurement.
GameReport lightning_clone_game(const LightningWorld& world, const CloneAdversary& adv, const GameOptions& opts);

struct KeyLemmaReport {
  std::string adversary;
  unsigned n = 0;
  unsigned budget = 0;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  double p_test = 0.0;
  double p_test_prime = 0.0;
  double advantage = 0.0;
  double sigma = 0.0;
  double bound = 0.0;  // T / 2^n
  std::uint64_t faults = 0;
  std::map<std::string, std::uint64_t> max_queries;

  bool holds() const { return advantage <= bound + 3 * sigma; }
  nlohmann::json to_json() const;
};

// Runs the adversary against Test and against Test' on coupled seeds, each
// trial with a freshly sampled U on 2n qubits.
KeyLemmaReport key_lemma_experiment(unsigned n, const KeyLemmaAdversary& adv, const GameOptions& opts);

// ---- hybrids ----

enum class HybridStep { identity, swap_unitary, swap_function, forbid_set, suffix_dedup, own_keys_only };

std::string hybrid_step_name(HybridStep s);
HybridStep parse_hybrid_step(const std::string& name);

enum class HybridGame { eavesdrop, sum_binding };

struct HybridChainReport {
  std::vector<HybridStep> steps;
  std::vector<GameReport> arms;  // arms[0] is the base game, arms[i] applies steps[0..i)
  std::vector<double> gaps;      // arms[i+1].rate - arms[i].rate
  std::vector<double> gap_sigma;
  std::vector<std::uint64_t> differing_trials;  // per adjacent pair

  nlohmann::json to_json() const;
};

// Every arm replays the same master seed, so trial t sees the same honest and
// adversary coins in every arm.
HybridChainReport run_hybrid_chain(const KEWorld& world, unsigned n, const std::vector<HybridStep>& steps,
                                   HybridGame game, const std::string& adversary_id, unsigned budget,
                                   const GameOptions& opts);

// ---- concentration ----

struct ConcentrationReport {
  std::size_t dim = 0;
  std::uint64_t samples = 0;
  unsigned queries = 0;
  double lipschitz = 0.0;  // 2T
  double grand_mean = 0.0;
  double max_deviation = 0.0;
  std::vector<double> t_grid;
  std::vector<double> tail_fraction;
  std::vector<double> levy_bound;
  std::vector<bool> vacuous;
  std::vector<std::uint64_t> histogram;  // |deviation| in 20 bins over [0, 1]

  bool holds() const;  // every tail fraction under its bound
  nlohmann::json to_json() const;
};

// acceptance(U) is the exact acceptance probability of a fixed T-query tester.
ConcentrationReport haar_concentration_experiment(const std::function<double(const Unitary&)>& acceptance,
                                                  unsigned queries, std::size_t dim, std::uint64_t samples,
                                                  RngStream& rng, std::vector<double> t_grid = {});

double levy_bound(std::size_t dim, double lipschitz, double t);

}  // namespace qoracle

#endif  // QORACLE_GAMES_HPP
