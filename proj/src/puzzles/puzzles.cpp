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


#include "qoracle/puzzles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qoracle/error.hpp"
#include "qoracle/protocols.hpp"

namespace qoracle {

namespace {

constexpr double kSumTolerance = 1e-12;

BitString parse_key(const std::string& s, unsigned n, const char* what) {
  BitString b = BitString::parse(s);
  require(b.width() == n, ErrorCode::invalid_argument,
          std::string(what) + " must have " + std::to_string(n) + " bits, got '" + s + "'");
  return b;
}

}  // namespace

// ---- distributions ----

DiscreteDistribution::DiscreteDistribution(std::map<std::string, double> probs) : p_(std::move(probs)) {
  double sum = 0.0;
  for (const auto& [v, p] : p_) {
    require(p >= 0.0 && std::isfinite(p), ErrorCode::invalid_argument, "probability of '" + v + "' is negative");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= kSumTolerance, ErrorCode::invalid_argument,
          "probabilities sum to " + std::to_string(sum) + ", not 1");
  std::erase_if(p_, [](const auto& kv) { return kv.second == 0.0; });
}

DiscreteDistribution DiscreteDistribution::point(const std::string& value) { return DiscreteDistribution({{value, 1.0}}); }

DiscreteDistribution DiscreteDistribution::uniform(const std::vector<std::string>& values) {
  require(!values.empty(), ErrorCode::invalid_argument, "uniform distribution over nothing");
  std::map<std::string, double> p;
  for (const auto& v : values) p[v] += 1.0 / static_cast<double>(values.size());
  return DiscreteDistribution(std::move(p));
}

DiscreteDistribution DiscreteDistribution::from_counts(const std::map<std::string, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [v, c] : counts) total += c;
  require(total > 0, ErrorCode::invalid_argument, "no counts");
  std::map<std::string, double> p;
  for (const auto& [v, c] : counts) p[v] = static_cast<double>(c) / static_cast<double>(total);
  return DiscreteDistribution(std::move(p));
}

double DiscreteDistribution::prob(const std::string& value) const {
  auto it = p_.find(value);
  return it == p_.end() ? 0.0 : it->second;
}

double DiscreteDistribution::min_entropy() const {
  double best = 0.0;
  for (const auto& [v, p] : p_) best = std::max(best, p);
  require(best > 0.0, ErrorCode::invalid_argument, "min-entropy of an empty distribution");
  return -std::log2(best);
}

nlohmann::json DiscreteDistribution::to_json() const { return p_; }

double statistical_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  double sum = 0.0;
  for (const auto& [v, pv] : p.probabilities()) sum += std::abs(pv - q.prob(v));
  for (const auto& [v, qv] : q.probabilities()) {
    if (p.prob(v) == 0.0) sum += qv;
  }
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

// ---- opening-round puzzles ----

PuzzleSample round_puzzle(const OpeningTranscript& tr, unsigned i) {
  require(i >= 1 && i <= tr.rounds.size(), ErrorCode::invalid_argument,
          "round index " + std::to_string(i) + " outside 1.." + std::to_string(tr.rounds.size()));
  nlohmann::json s = nlohmann::json::array({i, tr.commitment});
  for (unsigned j = 0; j + 1 < i; ++j) {
    s.push_back(tr.rounds[j].first);
    s.push_back(tr.rounds[j].second);
  }
  s.push_back(tr.rounds[i - 1].first);
  return {s.dump(), tr.rounds[i - 1].second};
}

ParsedRoundPuzzle parse_round_puzzle(const std::string& s) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(s);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("puzzle is not JSON: ") + e.what());
  }
  require(j.is_array() && j.size() >= 2 && j[0].is_number_unsigned() && j[1].is_string(), ErrorCode::invalid_argument,
          "puzzle must be [i, z, x_1, d_1, ..., x_i]");
  ParsedRoundPuzzle p;
  p.round = j[0].get<unsigned>();
  p.commitment = j[1].get<std::string>();
  for (std::size_t k = 2; k < j.size(); ++k) {
    require(j[k].is_string(), ErrorCode::invalid_argument, "puzzle messages must be strings");
    p.messages.push_back(j[k].get<std::string>());
  }
  const bool aborted = p.commitment == "ERR" && p.messages.empty();
  require(aborted || p.messages.size() == 2 * p.round - 1, ErrorCode::invalid_argument,
          "puzzle for round " + std::to_string(p.round) + " needs " + std::to_string(2 * p.round - 1) + " messages");
  return p;
}

PuzzleSampler::PuzzleSampler(std::string kind, nlohmann::json descriptor, Fn fn)
    : kind_(std::move(kind)), desc_(std::move(descriptor)), fn_(std::move(fn)) {
  require(static_cast<bool>(fn_), ErrorCode::invalid_argument, "sampler needs a function");
}

PuzzleSampler PuzzleSampler::ke(const KEWorld& world, unsigned n) {
  require(world.has_level(n), ErrorCode::invalid_argument, "world has no level n=" + std::to_string(n));
  nlohmann::json d{{"kind", "ke"}, {"n", n}, {"world", world.descriptor().to_json()}};
  return PuzzleSampler("ke", std::move(d), [world, n](ChoiceSource& c) {
    KEWorld w = world.fresh_copy();
    const Transcript t = ke_run_honest(w, n, c);
    const nlohmann::json s = nlohmann::json::array({t.messages[0].payload.to_string(), t.messages[1].payload.to_string()});
    return PuzzleSample{s.dump(), key_to_string(t.alice)};
  });
}

PuzzleSampler PuzzleSampler::rounds(std::string id, unsigned t, RoundProtocol protocol,
                                    std::optional<unsigned> fixed_round) {
  require(t >= 1, ErrorCode::invalid_argument, "a round protocol needs t >= 1");
  require(!fixed_round || (*fixed_round >= 1 && *fixed_round <= t), ErrorCode::invalid_argument,
          "fixed round outside 1..t");
  nlohmann::json d{{"kind", "rounds"}, {"protocol", id}, {"t", t}};
  if (fixed_round) d["fixed_round"] = *fixed_round;
  return PuzzleSampler("rounds", std::move(d), [t, protocol = std::move(protocol), fixed_round](ChoiceSource& c) {
    const unsigned i = fixed_round ? *fixed_round : 1 + static_cast<unsigned>(c.uniform(t));
    const bool m = c.uniform(2) == 1;
    const OpeningTranscript tr = protocol(m, i, c);
    if (tr.commitment == "ERR") return PuzzleSample{nlohmann::json::array({i, "ERR"}).dump(), "ERR"};
    return round_puzzle(tr, i);
  });
}

PuzzleSampler PuzzleSampler::commitment(const KEWorld& world, unsigned n, std::optional<unsigned> fixed_round,
                                        unsigned retry_budget) {
  require(world.has_level(n), ErrorCode::invalid_argument, "world has no level n=" + std::to_string(n));
  require(n >= 2, ErrorCode::invalid_argument, "commitments need n >= 2");
  RoundProtocol proto = [world, n, retry_budget](bool m, unsigned rounds, ChoiceSource& c) {
    KEWorld w = world.fresh_copy();
    OpeningTranscript tr;
    CommitmentSession session;
    try {
      session = commit(w, n, m, c, retry_budget);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::retry_exhausted) throw;
      tr.commitment = "ERR";
      return tr;
    }
    tr.commitment = session.message.to_string();
    tr.rounds.emplace_back("", m ? "1" : "0");
    if (rounds >= 2) {
      const ReceiverChallenge rc = receiver_challenge(w, n, c);
      tr.rounds.emplace_back(rc.y.to_string(), key_to_string(committer_response(w, session, rc.y, c)));
    }
    return tr;
  };
  PuzzleSampler s = rounds("commitment", 2, std::move(proto), fixed_round);
  s.desc_["kind"] = "commitment";
  s.desc_["n"] = n;
  s.desc_["retry_budget"] = retry_budget;
  s.desc_["world"] = world.descriptor().to_json();
  s.kind_ = "commitment";
  return s;
}

PuzzleSample owpuzz_from_ke(const KEWorld& world, unsigned n, ChoiceSource& choices) {
  return PuzzleSampler::ke(world, n).sample(choices);
}

PuzzleSample owpuzz_from_commitment(const KEWorld& world, unsigned n, ChoiceSource& choices) {
  return PuzzleSampler::commitment(world, n, std::nullopt, kDefaultCommitRetries).sample(choices);
}

StatePuzzleSample state_puzzle_from_2qkd(KEWorld& world, unsigned n, ChoiceSource& choices) {
  QkdFirst first = qkd_first(world, n, choices);
  return {first.message.msg.to_string(), first.state.state()};
}

double state_puzzle_accept_probability(const KEWorld& world, unsigned n, const std::string& s, const PureState& key) {
  const BitString x = parse_key(s, n, "state puzzle");
  const StateFamily& fam = *world.level(n).states;
  require(key.qubit_count() == fam.total_qubits(), ErrorCode::dimension, "state key has the wrong size");
  return snap_probability(fam.weight(x.value(), key));
}

bool state_puzzle_verify(const KEWorld& world, unsigned n, const std::string& s, const PureState& key,
                         ChoiceSource& choices) {
  return choices.bernoulli(state_puzzle_accept_probability(world, n, s, key));
}

// ---- exact inversion ----

JointDistribution enumerate_joint(const PuzzleSampler& sampler, std::size_t max_atoms, EnumerationStats* stats) {
  std::function<std::pair<std::string, std::string>(ChoiceSource&)> fn = [&](ChoiceSource& c) {
    PuzzleSample s = sampler.sample(c);
    return std::make_pair(std::move(s.puzzle), std::move(s.key));
  };
  return enumerate_distribution(fn, max_atoms, stats);
}

DiscreteDistribution puzzle_marginal(const JointDistribution& joint) {
  std::map<std::string, double> p;
  for (const auto& [sk, w] : joint) p[sk.first] += w;
  return DiscreteDistribution(std::move(p));
}

DiscreteDistribution key_conditional(const JointDistribution& joint, const std::string& s) {
  std::map<std::string, double> p;
  double total = 0.0;
  for (auto it = joint.lower_bound({s, std::string()}); it != joint.end() && it->first.first == s; ++it) {
    p[it->first.second] += it->second;
    total += it->second;
  }
  require(total > 0.0, ErrorCode::invalid_argument, "puzzle '" + s + "' has probability zero under this sampler");
  for (auto& [k, v] : p) v /= total;
  return DiscreteDistribution(std::move(p));
}

BruteForceInverter::BruteForceInverter(const PuzzleSampler& sampler, std::size_t max_atoms) {
  EnumerationStats st;
  joint_ = enumerate_joint(sampler, max_atoms, &st);
  atoms_ = st.atoms;
}

DiscreteDistribution brute_force_inverter(const PuzzleSampler& sampler, const std::string& s) {
  return BruteForceInverter(sampler)(s);
}

nlohmann::json InverterEvaluation::to_json() const {
  return {{"mode", mode}, {"delta", delta}, {"sigma", sigma}, {"strata", strata}, {"samples", samples}};
}

InverterEvaluation evaluate_inverter_exact(const JointDistribution& joint, const Inverter& inverter) {
  InverterEvaluation r;
  r.mode = "exact";
  const DiscreteDistribution marginal = puzzle_marginal(joint);
  for (const auto& [s, ps] : marginal.probabilities()) {
    r.delta += ps * statistical_distance(key_conditional(joint, s), inverter(s));
    ++r.strata;
  }
  return r;
}

InverterEvaluation evaluate_inverter(const PuzzleSampler& sampler, const Inverter& inverter, std::uint64_t trials,
                                     RngStream& rng) {
  require(trials > 0, ErrorCode::invalid_argument, "need at least one trial");
  std::map<std::string, std::map<std::string, std::uint64_t>> strata;
  for (std::uint64_t t = 0; t < trials; ++t) {
    PuzzleSample s = sampler.sample(rng);
    strata[s.puzzle][s.key]++;
  }
  InverterEvaluation r;
  r.mode = "monte-carlo";
  r.samples = trials;
  r.strata = strata.size();
  for (const auto& [s, counts] : strata) {
    std::uint64_t n_s = 0;
    for (const auto& [k, c] : counts) n_s += c;
    r.delta += static_cast<double>(n_s) / static_cast<double>(trials) *
               statistical_distance(DiscreteDistribution::from_counts(counts), inverter(s));
  }
  r.sigma = std::sqrt(r.delta * (1 - r.delta) / static_cast<double>(trials));
  return r;
}

Inverter zero_query_inverter(unsigned n) {
  std::vector<std::string> keys;
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) keys.push_back(BitString(k, n).to_string());
  const DiscreteDistribution u = DiscreteDistribution::uniform(keys);
  return [u](const std::string&) { return u; };
}

Inverter constant_inverter(const std::string& key) {
  const DiscreteDistribution d = DiscreteDistribution::point(key);
  return [d](const std::string&) { return d; };
}

}  // namespace qoracle
