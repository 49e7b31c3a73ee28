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

#ifndef QORACLE_ORACLE_WORLDS_HPP
#define QORACLE_ORACLE_WORLDS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "qoracle/bitstring.hpp"
#include "qoracle/numerics.hpp"
#include "qoracle/randomness.hpp"
#include "qoracle/rng.hpp"

namespace qoracle {

// The states phi_k = U|k, 0...0> for every k, stored as the columns of an
// isometry. Every oracle in this module only ever touches these columns.
class StateFamily {
 public:
  StateFamily(unsigned key_bits, unsigned total_qubits, CMatrix columns);

  static StateFamily haar(unsigned key_bits, unsigned total_qubits, RngStream& rng);
  static StateFamily from_unitary(const Unitary& u, unsigned key_bits);
  // Gram-Schmidt in key order; used for learned (tomographed) columns.
  static StateFamily orthonormalized(unsigned key_bits, unsigned total_qubits, CMatrix estimates);

  unsigned key_bits() const { return key_bits_; }
  unsigned total_qubits() const { return total_qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(cols_.rows()); }
  std::uint64_t key_count() const { return static_cast<std::uint64_t>(cols_.cols()); }
  const CMatrix& columns() const { return cols_; }

  PureState state(std::uint64_t key) const;
  // |<phi_key|s>|^2
  double weight(std::uint64_t key, const PureState& s) const;
  // Born probability of each key outcome z = (k, 0...0) when measuring
  // U^dagger s in the computational basis.
  Eigen::VectorXd weights(const PureState& s) const;

 private:
  unsigned key_bits_;
  unsigned total_qubits_;
  CMatrix cols_;
};

struct WorldDescriptor {
  std::string kind = "ke";  // "ke" | "lightning"
  std::uint64_t seed = 0;
  std::vector<unsigned> levels;
  unsigned padding = 9;  // lightning only: (1+p)n qubits
  bool canonical_order = true;

  nlohmann::json to_json() const;
  static WorldDescriptor from_json(const nlohmann::json& j);
};

class QueryCounters {
 public:
  void bump(const std::string& oracle, unsigned level) { ++counts_[{oracle, level}]; }
  std::uint64_t count(const std::string& oracle, unsigned level) const;
  std::uint64_t total(const std::string& oracle) const;
  void reset() { counts_.clear(); }
  nlohmann::json to_json() const;

 private:
  std::map<std::pair<std::string, unsigned>, std::uint64_t> counts_;
};

struct SgOutput {
  BitString key;
  PureState state;
};

// Hybrid modifications of the KE oracles, applied at one level.
struct HybridPolicy {
  // Mix*: never accept on z = (k, 0^n) for k in this set.
  std::set<std::uint64_t> forbidden_keys;
  // Mix': accept only on keys that SG has returned in this world.
  bool own_keys_only = false;
  // SG': return BOT on a repeated (n-1)-bit suffix, on the committed suffix,
  // or on the challenge key.
  bool suffix_dedup = false;
  std::optional<std::uint64_t> committed_suffix;
  std::optional<std::uint64_t> challenge_key;

  bool empty() const {
    return forbidden_keys.empty() && !own_keys_only && !suffix_dedup;
  }
};

struct KELevel {
  std::shared_ptr<const StateFamily> states;    // on 2n qubits
  std::shared_ptr<const BitFunction> function;  // {0,1}^{2n} -> {0,1}^n
};

class KEWorld {
 public:
  static KEWorld sample(const WorldDescriptor& d);
  KEWorld(WorldDescriptor d, std::map<unsigned, KELevel> levels);

  const WorldDescriptor& descriptor() const { return desc_; }
  bool has_level(unsigned n) const { return levels_.count(n) > 0; }
  const KELevel& level(unsigned n) const;  // introspection for test doubles
  std::vector<unsigned> level_list() const;

  // SG_n. Returns nullopt only under the SG' hybrid policy.
  std::optional<SgOutput> sg(unsigned n, ChoiceSource& choices);
  // Mix_n on classical a, b and a 2n-qubit C register.
  KeyOutput mix(unsigned n, const BitString& a, const BitString& b, const PureState& c,
                ChoiceSource& choices);
  // Mix_n on a general 4n-qubit state over registers A, B, C.
  KeyOutput mix(unsigned n, const PureState& abc, RngStream& rng);
  // Acceptance probability of mix(n, a, b, c) without sampling.
  double mix_accept_probability(unsigned n, const BitString& a, const BitString& b,
                                const PureState& c) const;

  // f_n(canon(a, b)); canon sorts the pair when the canonical flag is set.
  BitString key_for(unsigned n, const BitString& a, const BitString& b) const;

  KEWorld with_unitary(unsigned n, std::shared_ptr<const StateFamily> states, bool reset_counters = true) const;
  KEWorld with_unitary(unsigned n, const Unitary& u, bool reset_counters = true) const;
  KEWorld with_function(unsigned n, std::shared_ptr<const BitFunction> f, bool reset_counters = true) const;
  // Same components, fresh counters and hybrid state.
  KEWorld fresh_copy() const;

  QueryCounters& counters() { return counters_; }
  const QueryCounters& counters() const { return counters_; }
  HybridPolicy& policy(unsigned n) { return hybrid_[n].policy; }
  const std::set<std::uint64_t>& sg_keys(unsigned n) const;

 private:
  struct HybridState {
    HybridPolicy policy;
    std::set<std::uint64_t> produced;
    std::set<std::uint64_t> seen_suffixes;
  };

  bool key_allowed(unsigned n, std::uint64_t key) const;

  WorldDescriptor desc_;
  std::map<unsigned, KELevel> levels_;
  QueryCounters counters_;
  std::map<unsigned, HybridState> hybrid_;
};

KEWorld swap_unitary(const KEWorld& world, unsigned n, const Unitary& fresh, bool reset_counters = true);
KEWorld swap_function(const KEWorld& world, unsigned n, std::shared_ptr<const BitFunction> fresh,
                      bool reset_counters = true);

class LightningWorld {
 public:
  static LightningWorld sample(const WorldDescriptor& d);
  LightningWorld(WorldDescriptor d, unsigned n, std::shared_ptr<const StateFamily> states);

  const WorldDescriptor& descriptor() const { return desc_; }
  unsigned level() const { return n_; }
  unsigned padding() const { return desc_.padding; }
  unsigned total_qubits() const { return states_->total_qubits(); }
  const StateFamily& states() const { return *states_; }

  SgOutput sg(ChoiceSource& choices);
  bool v(const BitString& serial, const PureState& state, ChoiceSource& choices);
  double v_accept_probability(const BitString& serial, const PureState& state) const;

  LightningWorld fresh_copy() const;
  QueryCounters& counters() { return counters_; }
  const QueryCounters& counters() const { return counters_; }

 private:
  WorldDescriptor desc_;
  unsigned n_;
  std::shared_ptr<const StateFamily> states_;
  QueryCounters counters_;
};

// Apply / Test / Test' / Test^S over one isometry on 2n qubits.
class KeyLemmaWorld {
 public:
  static KeyLemmaWorld sample(unsigned n, RngStream& rng, std::set<std::uint64_t> forbidden = {});
  KeyLemmaWorld(unsigned n, std::shared_ptr<const StateFamily> states, std::set<std::uint64_t> forbidden = {});

  unsigned level() const { return n_; }
  const StateFamily& states() const { return *states_; }

  // Classical-input Apply: records x, returns U|x, 0^n>.
  PureState apply(const BitString& x);
  // Apply on an n-qubit input register: measures it to x first.
  PureState apply(const PureState& input, RngStream& rng);

  // One measurement of U^dagger B, reported under all three acceptance
  // rules. test_prime and test_s imply test by construction.
  struct TestOutcome {
    bool test = false;
    bool test_prime = false;
    bool test_s = false;
  };
  TestOutcome test_all(const BitString& x, const PureState& b, ChoiceSource& choices);
  bool test(const BitString& x, const PureState& b, ChoiceSource& choices);
  bool test_prime(const BitString& x, const PureState& b, ChoiceSource& choices);
  bool test_s(const BitString& x, const PureState& b, ChoiceSource& choices);

  const std::set<std::uint64_t>& applied() const { return app_; }
  const std::set<std::uint64_t>& forbidden() const { return forbidden_; }
  QueryCounters& counters() { return counters_; }
  const QueryCounters& counters() const { return counters_; }

 private:
  unsigned n_;
  std::shared_ptr<const StateFamily> states_;
  std::set<std::uint64_t> app_;
  std::set<std::uint64_t> forbidden_;
  QueryCounters counters_;
};

// Exhaustive-search stand-in for the PSPACE oracle.
struct SearchResult {
  bool found = false;
  std::uint64_t witness = 0;
  double best_score = 0.0;
  std::uint64_t evaluated = 0;
};

SearchResult pspace_stub(std::uint64_t space_size, const std::function<double(std::uint64_t)>& score,
                         double accept_threshold = 0.5);

}  // namespace qoracle

#endif  // QORACLE_ORACLE_WORLDS_HPP
