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


#ifndef QORACLE_PUZZLES_HPP
#define QORACLE_PUZZLES_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qoracle/enumeration.hpp"
#include "qoracle/numerics.hpp"
#include "qoracle/oracle_worlds.hpp"
#include "qoracle/rng.hpp"

namespace qoracle {

// Finite distribution over string values. Probabilities are nonnegative and
// sum to 1 within 1e-12.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;
  explicit DiscreteDistribution(std::map<std::string, double> probs);

  static DiscreteDistribution point(const std::string& value);
  static DiscreteDistribution uniform(const std::vector<std::string>& values);
  static DiscreteDistribution from_counts(const std::map<std::string, std::uint64_t>& counts);

  double prob(const std::string& value) const;
  const std::map<std::string, double>& probabilities() const { return p_; }
  bool empty() const { return p_.empty(); }
  double min_entropy() const;

  nlohmann::json to_json() const;

 private:
  std::map<std::string, double> p_;
};

double statistical_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

struct PuzzleSample {
  std::string puzzle;
  std::string key;

  nlohmann::json to_json() const { return {{"puzzle", puzzle}, {"key", key}}; }
};

// ---- opening-round puzzles ----

// Messages exchanged while opening: round j is (receiver x_j, committer d_j).
struct OpeningTranscript {
  std::string commitment;
  std::vector<std::pair<std::string, std::string>> rounds;
};

// s = [i, z, x_1, d_1, ..., x_i] as a JSON array, k = d_i.
PuzzleSample round_puzzle(const OpeningTranscript& tr, unsigned i);

struct ParsedRoundPuzzle {
  unsigned round = 0;
  std::string commitment;
  std::vector<std::string> messages;  // x_1, d_1, ..., x_i
};
ParsedRoundPuzzle parse_round_puzzle(const std::string& s);

// Runs commit to bit m and the first `rounds` opening rounds.
using RoundProtocol = std::function<OpeningTranscript(bool m, unsigned rounds, ChoiceSource&)>;

class PuzzleSampler {
 public:
  using Fn = std::function<PuzzleSample(ChoiceSource&)>;
  PuzzleSampler(std::string kind, nlohmann::json descriptor, Fn fn);

  // s = the KE transcript [x, y], k = Alice's key.
  static PuzzleSampler ke(const KEWorld& world, unsigned n);
  // Two opening rounds: (request, bit) then (challenge y, response c).
  // Commit gives up after retry_budget SG draws; that run yields s = [i, "ERR"].
  static PuzzleSampler commitment(const KEWorld& world, unsigned n, std::optional<unsigned> fixed_round = {},
                                  unsigned retry_budget = 12);
  static PuzzleSampler rounds(std::string id, unsigned t, RoundProtocol protocol,
                              std::optional<unsigned> fixed_round = {});

  PuzzleSample sample(ChoiceSource& choices) const { return fn_(choices); }
  const std::string& kind() const { return kind_; }
  const nlohmann::json& descriptor() const { return desc_; }

 private:
  std::string kind_;
  nlohmann::json desc_;
  Fn fn_;
};

PuzzleSample owpuzz_from_ke(const KEWorld& world, unsigned n, ChoiceSource& choices);
PuzzleSample owpuzz_from_commitment(const KEWorld& world, unsigned n, ChoiceSource& choices);

struct StatePuzzleSample {
  std::string puzzle;  // Alice's first message x
  PureState key;       // her internal state |phi_x>
};

StatePuzzleSample state_puzzle_from_2qkd(KEWorld& world, unsigned n, ChoiceSource& choices);
// Acceptance of the canonical projector |phi_s><phi_s| on a candidate key.
double state_puzzle_accept_probability(const KEWorld& world, unsigned n, const std::string& s, const PureState& key);
bool state_puzzle_verify(const KEWorld& world, unsigned n, const std::string& s, const PureState& key,
                         ChoiceSource& choices);

// ---- exact inversion ----

using JointDistribution = std::map<std::pair<std::string, std::string>, double>;  // (s, k) -> prob

// Every branch of the sampler's randomness, with exact weights. Refuses past
// max_atoms.
JointDistribution enumerate_joint(const PuzzleSampler& sampler, std::size_t max_atoms = kMaxEnumerationAtoms,
                                  EnumerationStats* stats = nullptr);
DiscreteDistribution puzzle_marginal(const JointDistribution& joint);
// Throws invalid_argument when s has probability zero.
DiscreteDistribution key_conditional(const JointDistribution& joint, const std::string& s);

class BruteForceInverter {
 public:
  explicit BruteForceInverter(const PuzzleSampler& sampler, std::size_t max_atoms = kMaxEnumerationAtoms);
  DiscreteDistribution operator()(const std::string& s) const { return key_conditional(joint_, s); }
  const JointDistribution& joint() const { return joint_; }
  std::size_t atoms() const { return atoms_; }

 private:
  JointDistribution joint_;
  std::size_t atoms_ = 0;
};

DiscreteDistribution brute_force_inverter(const PuzzleSampler& sampler, const std::string& s);

// An inverter reports its full output distribution for a puzzle.
using Inverter = std::function<DiscreteDistribution(const std::string& s)>;

struct InverterEvaluation {
  std::string mode;  // "exact" | "monte-carlo"
  double delta = 0.0;
  double sigma = 0.0;
  std::uint64_t strata = 0;
  std::uint64_t samples = 0;

  nlohmann::json to_json() const;
};

// sum_s P(s) * TV(P(k|s), inv(s)) over the exact joint.
InverterEvaluation evaluate_inverter_exact(const JointDistribution& joint, const Inverter& inverter);
// Draws `trials` pairs, stratifies on s and compares the empirical key
// frequencies in each stratum with the inverter's distribution.
InverterEvaluation evaluate_inverter(const PuzzleSampler& sampler, const Inverter& inverter, std::uint64_t trials,
                                     RngStream& rng);

// Uniform guess over n-bit keys, no queries.
Inverter zero_query_inverter(unsigned n);
Inverter constant_inverter(const std::string& key);

}  // namespace qoracle

#endif  // QORACLE_PUZZLES_HPP
