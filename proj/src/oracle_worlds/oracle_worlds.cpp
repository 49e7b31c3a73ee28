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

#include "qoracle/oracle_worlds.hpp"

#include <cmath>
#include <string>

#include "qoracle/error.hpp"

namespace qoracle {

namespace {

constexpr std::uint64_t kTagKE = 1;
constexpr std::uint64_t kTagLightning = 2;

std::uint64_t mask_bits(unsigned bits) { return bits == 0 ? 0 : ((std::uint64_t{1} << bits) - 1); }

void check_key(const BitString& k, unsigned n, const char* what) {
  require(k.width() == n, ErrorCode::dimension,
          std::string(what) + " must have " + std::to_string(n) + " bits, got " + std::to_string(k.width()));
}

}  // namespace

// ---- StateFamily ----

StateFamily::StateFamily(unsigned key_bits, unsigned total_qubits, CMatrix columns)
    : key_bits_(key_bits), total_qubits_(total_qubits), cols_(std::move(columns)) {
  require(key_bits <= total_qubits, ErrorCode::dimension, "key register wider than the state");
  require(static_cast<std::size_t>(cols_.rows()) == (std::size_t{1} << total_qubits) &&
              static_cast<std::size_t>(cols_.cols()) == (std::size_t{1} << key_bits),
          ErrorCode::dimension, "state family needs 2^key_bits columns of length 2^total_qubits");
  const CMatrix gram = cols_.adjoint() * cols_;
  require((gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <=
              tolerances().operator_identity,
          ErrorCode::numeric, "state family columns are not orthonormal");
}

StateFamily StateFamily::haar(unsigned key_bits, unsigned total_qubits, RngStream& rng) {
  check_dimension(total_qubits, "Haar state family");
  return StateFamily(key_bits, total_qubits,
                     haar_isometry(std::size_t{1} << total_qubits, std::size_t{1} << key_bits, rng));
}

StateFamily StateFamily::from_unitary(const Unitary& u, unsigned key_bits) {
  const unsigned q = u.qubit_count();
  require(key_bits <= q, ErrorCode::dimension, "key register wider than the unitary");
  const unsigned pad = q - key_bits;
  const auto keys = static_cast<Eigen::Index>(std::size_t{1} << key_bits);
  CMatrix cols(u.matrix().rows(), keys);
  for (Eigen::Index k = 0; k < keys; ++k) cols.col(k) = u.matrix().col(k << pad);
  return StateFamily(key_bits, q, std::move(cols));
}

StateFamily StateFamily::orthonormalized(unsigned key_bits, unsigned total_qubits, CMatrix estimates) {
  for (Eigen::Index j = 0; j < estimates.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) {
        estimates.col(j) -= estimates.col(i) * estimates.col(i).dot(estimates.col(j));
      }
    }
    const double norm = estimates.col(j).norm();
    require(norm > 1e-12, ErrorCode::numeric, "learned columns are linearly dependent");
    estimates.col(j) /= norm;
  }
  return StateFamily(key_bits, total_qubits, std::move(estimates));
}

PureState StateFamily::state(std::uint64_t key) const {
  require(key < key_count(), ErrorCode::invalid_argument, "key out of range");
  return make_trusted_state(cols_.col(static_cast<Eigen::Index>(key)), total_qubits_);
}

double StateFamily::weight(std::uint64_t key, const PureState& s) const {
  require(key < key_count(), ErrorCode::invalid_argument, "key out of range");
  require(s.dimension() == dimension(), ErrorCode::dimension,
          "state has " + std::to_string(s.qubit_count()) + " qubits, oracle expects " +
              std::to_string(total_qubits_));
  return std::norm(cols_.col(static_cast<Eigen::Index>(key)).dot(s.amplitudes()));
}

Eigen::VectorXd StateFamily::weights(const PureState& s) const {
  require(s.dimension() == dimension(), ErrorCode::dimension, "state size does not match the oracle");
  return (cols_.adjoint() * s.amplitudes()).cwiseAbs2();
}

// ---- descriptors and counters ----

nlohmann::json WorldDescriptor::to_json() const {
  nlohmann::json j{{"kind", kind}, {"seed", seed}, {"levels", levels}, {"canonical_order", canonical_order}};
  if (kind == "lightning") j["padding"] = padding;
  return j;
}

WorldDescriptor WorldDescriptor::from_json(const nlohmann::json& j) {
  WorldDescriptor d;
  try {
    d.kind = j.value("kind", std::string("ke"));
    d.seed = j.at("seed").get<std::uint64_t>();
    d.levels = j.at("levels").get<std::vector<unsigned>>();
    d.padding = j.value("padding", 9U);
    d.canonical_order = j.value("canonical_order", true);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("bad world descriptor: ") + e.what());
  }
  require(d.kind == "ke" || d.kind == "lightning", ErrorCode::invalid_argument,
          "world kind must be 'ke' or 'lightning'");
  require(!d.levels.empty(), ErrorCode::invalid_argument, "world needs at least one level");
  return d;
}

std::uint64_t QueryCounters::count(const std::string& oracle, unsigned level) const {
  auto it = counts_.find({oracle, level});
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t QueryCounters::total(const std::string& oracle) const {
  std::uint64_t t = 0;
  for (const auto& [k, v] : counts_) {
    if (k.first == oracle) t += v;
  }
  return t;
}

nlohmann::json QueryCounters::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : counts_) j[k.first + "/" + std::to_string(k.second)] = v;
  return j;
}

// ---- KEWorld ----

KEWorld KEWorld::sample(const WorldDescriptor& d) {
  require(d.kind == "ke", ErrorCode::invalid_argument, "descriptor is not a KE world");
  for (unsigned n : d.levels) {
    require(n >= 1, ErrorCode::invalid_argument, "levels start at n=1");
    check_dimension(2 * n, ("KE level n=" + std::to_string(n)).c_str());
  }
  RngStream base(d.seed, {kTagKE});
  std::map<unsigned, KELevel> levels;
  for (unsigned n : d.levels) {
    RngStream lr = base.child(n);
    RngStream sr = lr.child(0);
    RngStream fr = lr.child(1);
    levels[n] = KELevel{std::make_shared<StateFamily>(StateFamily::haar(n, 2 * n, sr)),
                        std::make_shared<RandomFunction>(sample_random_function(2 * n, n, fr))};
  }
  return KEWorld(d, std::move(levels));
}

KEWorld::KEWorld(WorldDescriptor d, std::map<unsigned, KELevel> levels)
    : desc_(std::move(d)), levels_(std::move(levels)) {
  for (const auto& [n, lv] : levels_) {
    require(lv.states && lv.function, ErrorCode::invalid_argument, "level components missing");
    require(lv.states->key_bits() == n && lv.states->total_qubits() == 2 * n, ErrorCode::dimension,
            "KE level " + std::to_string(n) + " needs an isometry on 2n qubits");
    require(lv.function->domain_bits() == 2 * n && lv.function->range_bits() == n, ErrorCode::dimension,
            "KE level " + std::to_string(n) + " needs f: {0,1}^2n -> {0,1}^n");
  }
}

const KELevel& KEWorld::level(unsigned n) const {
  auto it = levels_.find(n);
  require(it != levels_.end(), ErrorCode::invalid_argument, "unknown level n=" + std::to_string(n));
  return it->second;
}

std::vector<unsigned> KEWorld::level_list() const {
  std::vector<unsigned> out;
  for (const auto& [n, lv] : levels_) out.push_back(n);
  return out;
}

const std::set<std::uint64_t>& KEWorld::sg_keys(unsigned n) const {
  static const std::set<std::uint64_t> empty;
  auto it = hybrid_.find(n);
  return it == hybrid_.end() ? empty : it->second.produced;
}

std::optional<SgOutput> KEWorld::sg(unsigned n, ChoiceSource& choices) {
  const KELevel& lv = level(n);
  counters_.bump("sg", n);
  const std::uint64_t k = choices.uniform(std::uint64_t{1} << n);
  HybridState& hs = hybrid_[n];
  if (hs.policy.suffix_dedup) {
    const std::uint64_t suffix = k & mask_bits(n - 1);
    const bool repeat = !hs.seen_suffixes.insert(suffix).second;
    if (repeat || hs.policy.committed_suffix == suffix || hs.policy.challenge_key == k) return std::nullopt;
  }
  hs.produced.insert(k);
  return SgOutput{BitString(k, n), lv.states->state(k)};
}

bool KEWorld::key_allowed(unsigned n, std::uint64_t key) const {
  auto it = hybrid_.find(n);
  if (it == hybrid_.end()) return true;
  const HybridState& hs = it->second;
  if (hs.policy.forbidden_keys.count(key)) return false;
  if (hs.policy.own_keys_only && !hs.produced.count(key)) return false;
  return true;
}

double KEWorld::mix_accept_probability(unsigned n, const BitString& a, const BitString& b,
                                       const PureState& c) const {
  const KELevel& lv = level(n);
  check_key(a, n, "Mix register A");
  check_key(b, n, "Mix register B");
  double p = 0.0;
  if (key_allowed(n, a.value())) p += lv.states->weight(a.value(), c);
  if (b != a && key_allowed(n, b.value())) p += lv.states->weight(b.value(), c);
  return snap_probability(p);
}

BitString KEWorld::key_for(unsigned n, const BitString& a, const BitString& b) const {
  const KELevel& lv = level(n);
  check_key(a, n, "key input");
  check_key(b, n, "key input");
  const bool swap = desc_.canonical_order && b < a;
  const BitString& lo = swap ? b : a;
  const BitString& hi = swap ? a : b;
  return BitString((*lv.function)(lo.concat(hi).value()), n);
}

KeyOutput KEWorld::mix(unsigned n, const BitString& a, const BitString& b, const PureState& c,
                       ChoiceSource& choices) {
  const double p = mix_accept_probability(n, a, b, c);
  counters_.bump("mix", n);
  if (!choices.bernoulli(p)) return std::nullopt;
  return key_for(n, a, b);
}

KeyOutput KEWorld::mix(unsigned n, const PureState& abc, RngStream& rng) {
  level(n);
  require(abc.qubit_count() == 4 * n, ErrorCode::dimension,
          "Mix at n=" + std::to_string(n) + " takes " + std::to_string(4 * n) + " qubits, got " +
              std::to_string(abc.qubit_count()));
  std::vector<unsigned> ab;
  for (unsigned q = 0; q < 2 * n; ++q) ab.push_back(q);
  MeasurementResult m = measure_registers(abc, ab, rng);
  const std::uint64_t a = m.outcome.value() >> n;
  const std::uint64_t b = m.outcome.value() & mask_bits(n);
  const auto cdim = static_cast<Eigen::Index>(std::size_t{1} << (2 * n));
  const CVector c = m.post_state.amplitudes().segment(static_cast<Eigen::Index>(m.outcome.value()) * cdim, cdim);
  return mix(n, BitString(a, n), BitString(b, n), PureState::normalized(c), rng);
}

KEWorld KEWorld::with_unitary(unsigned n, std::shared_ptr<const StateFamily> states, bool reset_counters) const {
  KEWorld w = *this;
  auto it = w.levels_.find(n);
  require(it != w.levels_.end(), ErrorCode::invalid_argument, "unknown level n=" + std::to_string(n));
  require(states && states->key_bits() == n && states->total_qubits() == 2 * n, ErrorCode::dimension,
          "replacement unitary has the wrong size for level " + std::to_string(n));
  it->second.states = std::move(states);
  if (reset_counters) w.counters_.reset();
  return w;
}

KEWorld KEWorld::with_unitary(unsigned n, const Unitary& u, bool reset_counters) const {
  require(u.qubit_count() == 2 * n, ErrorCode::dimension,
          "replacement unitary has " + std::to_string(u.qubit_count()) + " qubits, level needs " +
              std::to_string(2 * n));
  return with_unitary(n, std::make_shared<StateFamily>(StateFamily::from_unitary(u, n)), reset_counters);
}

KEWorld KEWorld::with_function(unsigned n, std::shared_ptr<const BitFunction> f, bool reset_counters) const {
  KEWorld w = *this;
  auto it = w.levels_.find(n);
  require(it != w.levels_.end(), ErrorCode::invalid_argument, "unknown level n=" + std::to_string(n));
  require(f && f->domain_bits() == 2 * n && f->range_bits() == n, ErrorCode::dimension,
          "replacement function has the wrong shape for level " + std::to_string(n));
  it->second.function = std::move(f);
  if (reset_counters) w.counters_.reset();
  return w;
}

KEWorld KEWorld::fresh_copy() const {
  KEWorld w(desc_, levels_);
  return w;
}

KEWorld swap_unitary(const KEWorld& world, unsigned n, const Unitary& fresh, bool reset_counters) {
  return world.with_unitary(n, fresh, reset_counters);
}

KEWorld swap_function(const KEWorld& world, unsigned n, std::shared_ptr<const BitFunction> fresh,
                      bool reset_counters) {
  return world.with_function(n, std::move(fresh), reset_counters);
}

// ---- LightningWorld ----

LightningWorld LightningWorld::sample(const WorldDescriptor& d) {
  require(d.kind == "lightning", ErrorCode::invalid_argument, "descriptor is not a lightning world");
  require(d.levels.size() == 1, ErrorCode::invalid_argument, "lightning worlds have exactly one level");
  const unsigned n = d.levels.front();
  require(n >= 1, ErrorCode::invalid_argument, "levels start at n=1");
  const unsigned q = (1 + d.padding) * n;
  check_dimension(q, ("lightning level n=" + std::to_string(n) + " p=" + std::to_string(d.padding)).c_str());
  RngStream r = RngStream(d.seed, {kTagLightning}).child(n);
  return LightningWorld(d, n, std::make_shared<StateFamily>(StateFamily::haar(n, q, r)));
}

LightningWorld::LightningWorld(WorldDescriptor d, unsigned n, std::shared_ptr<const StateFamily> states)
    : desc_(std::move(d)), n_(n), states_(std::move(states)) {
  require(states_ && states_->key_bits() == n && states_->total_qubits() == (1 + desc_.padding) * n,
          ErrorCode::dimension, "lightning isometry must act on (1+p)n qubits");
}

SgOutput LightningWorld::sg(ChoiceSource& choices) {
  counters_.bump("sg", n_);
  const std::uint64_t k = choices.uniform(std::uint64_t{1} << n_);
  return SgOutput{BitString(k, n_), states_->state(k)};
}

double LightningWorld::v_accept_probability(const BitString& serial, const PureState& state) const {
  check_key(serial, n_, "serial number");
  return snap_probability(states_->weight(serial.value(), state));
}

bool LightningWorld::v(const BitString& serial, const PureState& state, ChoiceSource& choices) {
  const double p = v_accept_probability(serial, state);
  counters_.bump("v", n_);
  return choices.bernoulli(p);
}

LightningWorld LightningWorld::fresh_copy() const { return LightningWorld(desc_, n_, states_); }

// ---- KeyLemmaWorld ----

KeyLemmaWorld KeyLemmaWorld::sample(unsigned n, RngStream& rng, std::set<std::uint64_t> forbidden) {
  return KeyLemmaWorld(n, std::make_shared<StateFamily>(StateFamily::haar(n, 2 * n, rng)), std::move(forbidden));
}

KeyLemmaWorld::KeyLemmaWorld(unsigned n, std::shared_ptr<const StateFamily> states,
                             std::set<std::uint64_t> forbidden)
    : n_(n), states_(std::move(states)), forbidden_(std::move(forbidden)) {
  require(states_ && states_->key_bits() == n && states_->total_qubits() == 2 * n, ErrorCode::dimension,
          "key lemma isometry must act on 2n qubits");
}

PureState KeyLemmaWorld::apply(const BitString& x) {
  check_key(x, n_, "Apply input");
  counters_.bump("apply", n_);
  app_.insert(x.value());
  return states_->state(x.value());
}

PureState KeyLemmaWorld::apply(const PureState& input, RngStream& rng) {
  require(input.qubit_count() == n_, ErrorCode::dimension, "Apply takes an n-qubit register");
  std::vector<unsigned> all;
  for (unsigned q = 0; q < n_; ++q) all.push_back(q);
  return apply(measure_registers(input, all, rng).outcome);
}

KeyLemmaWorld::TestOutcome KeyLemmaWorld::test_all(const BitString& x, const PureState& b, ChoiceSource& choices) {
  check_key(x, n_, "Test register A");
  const double p = snap_probability(states_->weight(x.value(), b));
  counters_.bump("test", n_);
  TestOutcome o;
  o.test = choices.bernoulli(p);
  o.test_prime = o.test && app_.count(x.value()) > 0;
  o.test_s = o.test && forbidden_.count(x.value()) == 0;
  return o;
}

bool KeyLemmaWorld::test(const BitString& x, const PureState& b, ChoiceSource& c) { return test_all(x, b, c).test; }
bool KeyLemmaWorld::test_prime(const BitString& x, const PureState& b, ChoiceSource& c) {
  return test_all(x, b, c).test_prime;
}
bool KeyLemmaWorld::test_s(const BitString& x, const PureState& b, ChoiceSource& c) {
  return test_all(x, b, c).test_s;
}

// ---- exhaustive search ----

SearchResult pspace_stub(std::uint64_t space_size, const std::function<double(std::uint64_t)>& score,
                         double accept_threshold) {
  require(space_size <= (std::uint64_t{1} << 24), ErrorCode::refused,
          "search space of " + std::to_string(space_size) + " candidates exceeds 2^24");
  SearchResult r;
  for (std::uint64_t w = 0; w < space_size; ++w) {
    const double s = score(w);
    if (r.evaluated == 0 || s > r.best_score) {
      r.best_score = s;
      r.witness = w;
    }
    ++r.evaluated;
  }
  r.found = r.evaluated > 0 && r.best_score >= accept_threshold;
  return r;
}

}  // namespace qoracle
