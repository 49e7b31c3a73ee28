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


#include "qoracle/games.hpp"

#include <algorithm>
#include <cmath>

#include "qoracle/error.hpp"

namespace qoracle {

namespace {

constexpr std::uint64_t kTagEavesdrop = 11;
constexpr std::uint64_t kTagBinding = 12;
constexpr std::uint64_t kTagClone = 13;
constexpr std::uint64_t kTagKeyLemma = 14;
constexpr std::uint64_t kTagHybrid = 15;

std::uint64_t pow2(unsigned k) { return std::uint64_t{1} << k; }

BitString random_key(unsigned n, RngStream& coins) { return BitString(coins.uniform(pow2(n)), n); }

void check_budget(std::map<std::string, std::uint64_t>& used, const std::string& oracle, unsigned budget) {
  if (used[oracle] + 1 > budget) {
    fail(ErrorCode::adversary_fault,
         "adversary exceeded its budget of " + std::to_string(budget) + " " + oracle + " queries");
  }
}

void merge_max(std::map<std::string, std::uint64_t>& into, const std::map<std::string, std::uint64_t>& from) {
  for (const auto& [k, v] : from) into[k] = std::max(into[k], v);
}

bool is_fault(const Error& e) { return e.code() == ErrorCode::adversary_fault; }

// Per-trial hooks used by the hybrid runner. Plain games pass empty hooks.
struct EavesdropHooks {
  std::function<void(KEWorld&)> before;
  std::function<void(KEWorld&, const BitString& x, const BitString& y)> after;
};

struct BindingHooks {
  std::function<void(KEWorld&, const BitString& message, const BitString& challenge)> after;
};

GameReport new_report(const std::string& game, const std::string& adv, unsigned n, unsigned budget,
                      const GameOptions& opts, nlohmann::json world) {
  require(opts.trials > 0, ErrorCode::invalid_argument, "a game needs at least one trial");
  GameReport r;
  r.game = game;
  r.adversary = adv;
  r.n = n;
  r.budget = budget;
  r.seed = opts.seed;
  r.trials = opts.trials;
  r.world = std::move(world);
  r.outcomes.reserve(opts.trials);
  return r;
}

void record_trial(GameReport& r, std::uint64_t t, bool win, bool fault, nlohmann::json detail,
                  const GameOptions& opts) {
  r.outcomes.push_back(win ? 1 : 0);
  r.wins += win;
  r.faults += fault;
  if (opts.events) {
    detail["game"] = r.game;
    detail["adversary"] = r.adversary;
    detail["arm"] = r.arm;
    detail["trial"] = t;
    detail["win"] = win;
    detail["fault"] = fault;
    opts.events(detail);
  }
}

GameReport run_eavesdrop(const KEWorld& world, unsigned n, const EavesdropAdversary& adv, const GameOptions& opts,
                         const EavesdropHooks& hooks) {
  GameReport r = new_report("eavesdrop", adv.id, n, adv.budget, opts, world.descriptor().to_json());
  r.ceiling = adv.test_double ? 1.0 : eavesdrop_ceiling(n, adv.budget);
  const RngStream master(opts.seed, {kTagEavesdrop});
  for (std::uint64_t t = 0; t < opts.trials; ++t) {
    const RngStream trial = master.child(t);
    RngStream honest = trial.child(0), oracle = trial.child(1), coins = trial.child(2);
    KEWorld w = world.fresh_copy();
    if (hooks.before) hooks.before(w);
    const Transcript tr = ke_run_honest(w, n, honest);
    const BitString& x = tr.messages[0].payload;
    const BitString& y = tr.messages[1].payload;
    if (hooks.after) hooks.after(w, x, y);
    EavesdropView view{n, x, y, adv.test_double ? &w : nullptr, {}};
    KEOracles handle(w, adv.budget, oracle);
    bool win = false, fault = false;
    std::string guess;
    try {
      const BitString g = adv.guess(handle, view, coins);
      guess = g.to_string();
      win = g == w.key_for(n, x, y);
    } catch (const Error& e) {
      if (!is_fault(e)) throw;
      fault = true;
    }
    merge_max(r.max_queries, handle.used());
    record_trial(r, t, win, fault, {{"x", x.to_string()}, {"y", y.to_string()}, {"guess", guess}}, opts);
  }
  finalize_rates(r);
  return r;
}

GameReport run_binding(const KEWorld& world, unsigned n, const BindingAdversary& adv, const GameOptions& opts,
                       const BindingHooks& hooks) {
  require(n >= 2, ErrorCode::invalid_argument, "sum-binding needs n >= 2");
  GameReport r = new_report("sum-binding", adv.id, n, adv.budget, opts, world.descriptor().to_json());
  r.ceiling = binding_ceiling(n, adv.budget);
  const RngStream master(opts.seed, {kTagBinding});
  for (std::uint64_t t = 0; t < opts.trials; ++t) {
    const RngStream trial = master.child(t);
    RngStream honest = trial.child(0), oracle = trial.child(1), coins = trial.child(2);
    KEWorld w = world.fresh_copy();
    KEOracles handle(w, adv.budget, oracle);
    std::unique_ptr<Committer> committer = adv.make();
    bool win = false, fault = false;
    nlohmann::json detail;
    try {
      const BitString msg = committer->commit(handle, n, coins);
      require(msg.width() + 1 == n, ErrorCode::adversary_fault, "commitment has the wrong length");
      const bool b = honest.uniform(2) == 1;
      const ReceiverChallenge rc = receiver_challenge(w, n, honest);
      if (hooks.after) hooks.after(w, msg, rc.y);
      const KeyOutput c = committer->open(handle, b, rc.y, coins);
      win = receiver_check(w, n, rc, b, msg, c, honest);
      detail = {{"message", msg.to_string()}, {"b", b}, {"challenge", rc.y.to_string()}, {"response", key_to_string(c)}};
    } catch (const Error& e) {
      if (!is_fault(e)) throw;
      fault = true;
    }
    merge_max(r.max_queries, handle.used());
    record_trial(r, t, win, fault, detail, opts);
  }
  finalize_rates(r);
  return r;
}

std::unique_ptr<RandomFunction> fresh_function(unsigned n, RngStream rng) {
  return std::make_unique<RandomFunction>(sample_random_function(2 * n, n, rng));
}

}  // namespace

// ---- reports ----

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  require(trials > 0 && successes <= trials, ErrorCode::invalid_argument, "Wilson interval needs 0 <= s <= n, n > 0");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1 + z * z / n;
  const double center = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

void finalize_rates(GameReport& r) {
  require(r.wins <= r.trials, ErrorCode::contract, "more wins than trials");
  r.rate = static_cast<double>(r.wins) / static_cast<double>(r.trials);
  std::tie(r.ci_low, r.ci_high) = wilson_interval(r.wins, r.trials);
  r.sigma = std::sqrt(r.rate * (1 - r.rate) / static_cast<double>(r.trials));
}

bool GameReport::budget_respected() const {
  return std::all_of(max_queries.begin(), max_queries.end(), [&](const auto& kv) { return kv.second <= budget; });
}

nlohmann::json GameReport::to_json(bool with_outcomes) const {
  nlohmann::json j{{"game", game},
                   {"adversary", adversary},
                   {"arm", arm},
                   {"n", n},
                   {"budget", budget},
                   {"seed", seed},
                   {"trials", trials},
                   {"wins", wins},
                   {"faults", faults},
                   {"rate", rate},
                   {"ci95", {ci_low, ci_high}},
                   {"sigma", sigma},
                   {"ceiling", ceiling},
                   {"within_ceiling", within_ceiling()},
                   {"max_queries", max_queries},
                   {"budget_respected", budget_respected()},
                   {"world", world}};
  if (with_outcomes) j["outcomes"] = outcomes;
  return j;
}

// ---- handles ----

KEOracles::KEOracles(KEWorld& world, unsigned budget, RngStream& oracle_rng)
    : world_(world), budget_(budget), rng_(oracle_rng) {}

void KEOracles::charge(const std::string& oracle) { check_budget(used_, oracle, budget_); }

void KEOracles::record(const std::string& oracle, unsigned n, std::uint64_t before) {
  used_[oracle] += world_.counters().count(oracle, n) - before;
}

std::optional<SgOutput> KEOracles::sg(unsigned n) {
  charge("sg");
  const auto before = world_.counters().count("sg", n);
  auto out = world_.sg(n, rng_);
  record("sg", n, before);
  return out;
}

KeyOutput KEOracles::mix(unsigned n, const BitString& a, const BitString& b, const PureState& c) {
  charge("mix");
  const auto before = world_.counters().count("mix", n);
  KeyOutput out = world_.mix(n, a, b, c, rng_);
  record("mix", n, before);
  return out;
}

KeyOutput KEOracles::mix(unsigned n, const PureState& abc) {
  charge("mix");
  const auto before = world_.counters().count("mix", n);
  KeyOutput out = world_.mix(n, abc, rng_);
  record("mix", n, before);
  return out;
}

SearchResult KEOracles::pspace(std::uint64_t space_size, const std::function<double(std::uint64_t)>& score,
                               double threshold) {
  charge("pspace");
  ++used_["pspace"];
  return pspace_stub(space_size, score, threshold);
}

LightningOracles::LightningOracles(LightningWorld& world, unsigned budget, RngStream& oracle_rng)
    : world_(world), budget_(budget), rng_(oracle_rng) {}

void LightningOracles::charge(const std::string& oracle) { check_budget(used_, oracle, budget_); }

SgOutput LightningOracles::sg() {
  charge("sg");
  const auto before = world_.counters().count("sg", world_.level());
  SgOutput out = world_.sg(rng_);
  used_["sg"] += world_.counters().count("sg", world_.level()) - before;
  return out;
}

bool LightningOracles::v(const BitString& serial, const PureState& state) {
  charge("v");
  const auto before = world_.counters().count("v", world_.level());
  const bool ok = world_.v(serial, state, rng_);
  used_["v"] += world_.counters().count("v", world_.level()) - before;
  return ok;
}

KeyLemmaOracles::KeyLemmaOracles(KeyLemmaWorld& world, Flavour flavour, unsigned budget, RngStream& oracle_rng)
    : world_(world), flavour_(flavour), budget_(budget), rng_(oracle_rng) {}

void KeyLemmaOracles::charge(const std::string& oracle) { check_budget(used_, oracle, budget_); }

PureState KeyLemmaOracles::apply(const BitString& x) {
  charge("apply");
  const auto before = world_.counters().count("apply", world_.level());
  PureState s = world_.apply(x);
  used_["apply"] += world_.counters().count("apply", world_.level()) - before;
  return s;
}

PureState KeyLemmaOracles::apply(const PureState& input) {
  charge("apply");
  const auto before = world_.counters().count("apply", world_.level());
  PureState s = world_.apply(input, rng_);
  used_["apply"] += world_.counters().count("apply", world_.level()) - before;
  return s;
}

bool KeyLemmaOracles::test(const BitString& x, const PureState& b) {
  charge("test");
  const auto before = world_.counters().count("test", world_.level());
  const auto o = world_.test_all(x, b, rng_);
  used_["test"] += world_.counters().count("test", world_.level()) - before;
  return flavour_ == Flavour::test ? o.test : o.test_prime;
}

// ---- batteries ----

double eavesdrop_ceiling(unsigned n, unsigned budget) {
  return (1.0 + 2.0 * budget) / static_cast<double>(pow2(n));
}

double binding_ceiling(unsigned n, unsigned budget) {
  return 0.5 + 0.5 / static_cast<double>(pow2(n)) + budget / static_cast<double>(pow2(n - 1));
}

double clone_ceiling(unsigned n, unsigned budget) {
  return static_cast<double>(budget) * budget / static_cast<double>(pow2(n));
}

std::vector<EavesdropAdversary> eavesdrop_battery(unsigned budget) {
  std::vector<EavesdropAdversary> out;
  out.push_back({"zero-query", budget, false,
                 [](KEOracles&, const EavesdropView& v, RngStream& coins) { return random_key(v.n, coins); }});
  out.push_back({"omniscient", budget, true, [](KEOracles&, const EavesdropView& v, RngStream&) {
                   return v.internals->key_for(v.n, v.x, v.y);
                 }});
  // Re-draws SG hoping to land on x or y, then asks Mix with the matching state.
  out.push_back({"sg-grinder", budget, false, [](KEOracles& o, const EavesdropView& v, RngStream& coins) {
                   for (unsigned i = 0; i < o.budget(); ++i) {
                     auto s = o.sg(v.n);
                     if (s && (s->key == v.x || s->key == v.y)) {
                       if (KeyOutput k = o.mix(v.n, v.x, v.y, s->state)) return *k;
                       break;
                     }
                   }
                   return random_key(v.n, coins);
                 }});
  // Feeds Mix(x, y, .) fresh Haar states on the C register.
  out.push_back({"mix-prober", budget, false, [](KEOracles& o, const EavesdropView& v, RngStream& coins) {
                   for (unsigned i = 0; i < o.budget(); ++i) {
                     if (KeyOutput k = o.mix(v.n, v.x, v.y, haar_state(pow2(2 * v.n), coins))) return *k;
                   }
                   return random_key(v.n, coins);
                 }});
  return out;
}

namespace {

// Commits to the first bit of its first SG key.
class HonestCommitter : public Committer {
 public:
  enum class Mode { refuse, blind_guess, grind_sibling };
  explicit HonestCommitter(Mode mode) : mode_(mode) {}

  BitString commit(KEOracles& o, unsigned n, RngStream&) override {
    auto s = o.sg(n);
    require(s.has_value(), ErrorCode::adversary_fault, "SG returned BOT during commit");
    n_ = n;
    key_ = s->key;
    state_ = std::move(s->state);
    return key_.suffix_from(2);
  }

  KeyOutput open(KEOracles& o, bool b, const BitString& y, RngStream& coins) override {
    if (b == key_.bit(1)) return o.mix(n_, key_, y, *state_);
    switch (mode_) {
      case Mode::refuse:
        return std::nullopt;
      case Mode::blind_guess:
        return random_key(n_, coins);
      case Mode::grind_sibling: {
        const BitString sibling(key_.value() ^ pow2(n_ - 1), n_);
        for (unsigned i = 1; i < o.budget(); ++i) {
          auto s = o.sg(n_);
          if (s && s->key == sibling) return o.mix(n_, sibling, y, s->state);
        }
        return random_key(n_, coins);
      }
    }
    return std::nullopt;
  }

 private:
  Mode mode_;
  unsigned n_ = 0;
  BitString key_;
  std::optional<PureState> state_;
};

}  // namespace

std::vector<BindingAdversary> binding_battery(unsigned budget) {
  using M = HonestCommitter::Mode;
  return {
      {"honest", budget, [] { return std::make_unique<HonestCommitter>(M::refuse); }},
      {"blind-guess", budget, [] { return std::make_unique<HonestCommitter>(M::blind_guess); }},
      {"sibling-grinder", budget, [] { return std::make_unique<HonestCommitter>(M::grind_sibling); }},
  };
}

std::vector<CloneAdversary> clone_battery(unsigned budget) {
  std::vector<CloneAdversary> out;
  out.push_back({"honest-haar", budget, [](LightningOracles& o, RngStream& coins) {
                   SgOutput s = o.sg();
                   return CloneSubmission{s.key, s.state, haar_state(pow2(o.total_qubits()), coins), std::nullopt};
                 }});
  // Pairs its note with a note of a different serial.
  out.push_back({"two-mint", budget, [](LightningOracles& o, RngStream& coins) {
                   SgOutput first = o.sg();
                   for (unsigned i = 1; i < o.budget(); ++i) {
                     SgOutput other = o.sg();
                     if (other.key != first.key) return CloneSubmission{first.key, first.state, other.state, std::nullopt};
                   }
                   return CloneSubmission{first.key, first.state, haar_state(pow2(o.total_qubits()), coins),
                                          std::nullopt};
                 }});
  // Mints until two serials collide.
  out.push_back({"sg-birthday", budget, [](LightningOracles& o, RngStream& coins) {
                   std::map<std::uint64_t, PureState> seen;
                   std::optional<SgOutput> first;
                   for (unsigned i = 0; i < o.budget(); ++i) {
                     SgOutput s = o.sg();
                     if (!first) first = s;
                     auto it = seen.find(s.key.value());
                     if (it != seen.end()) return CloneSubmission{s.key, it->second, s.state, std::nullopt};
                     seen.emplace(s.key.value(), s.state);
                   }
                   require(first.has_value(), ErrorCode::adversary_fault, "sg-birthday needs a budget of at least 1");
                   return CloneSubmission{first->key, first->state, haar_state(pow2(o.total_qubits()), coins),
                                          std::nullopt};
                 }});
  return out;
}

std::vector<KeyLemmaAdversary> key_lemma_battery(unsigned budget) {
  std::vector<KeyLemmaAdversary> out;
  out.push_back({"apply-then-test", budget, [](KeyLemmaOracles& o, RngStream& coins) {
                   const BitString x = random_key(o.level(), coins);
                   return o.test(x, o.apply(x));
                 }});
  // Tests unapplied serials against Haar states.
  out.push_back({"haar-prober", budget, [](KeyLemmaOracles& o, RngStream& coins) {
                   bool any = false;
                   for (unsigned i = 0; i < o.budget(); ++i) {
                     any |= o.test(random_key(o.level(), coins), haar_state(pow2(2 * o.level()), coins));
                   }
                   return any;
                 }});
  // Mixes an applied state with noise and tests it under other serials.
  out.push_back({"superposed-neighbour", budget, [](KeyLemmaOracles& o, RngStream& coins) {
                   const unsigned n = o.level();
                   const BitString x0 = random_key(n, coins);
                   const PureState s0 = o.apply(x0);
                   bool any = false;
                   for (unsigned i = 0; i < o.budget(); ++i) {
                     const BitString x1((x0.value() + 1 + coins.uniform(pow2(n) - 1)) % pow2(n), n);
                     CVector v = s0.amplitudes() + haar_state(pow2(2 * n), coins).amplitudes();
                     any |= o.test(x1, PureState::normalized(v));
                   }
                   return any;
                 }});
  // Applies to a uniform superposition, then guesses which serial it collapsed to.
  out.push_back({"blind-apply", budget, [](KeyLemmaOracles& o, RngStream& coins) {
                   const unsigned n = o.level();
                   const PureState plus = PureState::normalized(CVector::Ones(static_cast<Eigen::Index>(pow2(n))));
                   const PureState s = o.apply(plus);
                   bool any = false;
                   for (unsigned i = 0; i < o.budget(); ++i) any |= o.test(random_key(n, coins), s);
                   return any;
                 }});
  return out;
}

// ---- games ----

GameReport ke_eavesdrop_game(const KEWorld& world, unsigned n, const EavesdropAdversary& adv,
                             const GameOptions& opts) {
  return run_eavesdrop(world, n, adv, opts, {});
}

GameReport sum_binding_game(const KEWorld& world, unsigned n, const BindingAdversary& adv,
                            const GameOptions& opts) {
  return run_binding(world, n, adv, opts, {});
}

GameReport lightning_clone_game(const LightningWorld& world, const CloneAdversary& adv, const GameOptions& opts) {
  const unsigned n = world.level();
  GameReport r = new_report("lightning-clone", adv.id, n, adv.budget, opts, world.descriptor().to_json());
  r.ceiling = clone_ceiling(n, adv.budget);
  const RngStream master(opts.seed, {kTagClone});
  const unsigned q = world.total_qubits();
  for (std::uint64_t t = 0; t < opts.trials; ++t) {
    const RngStream trial = master.child(t);
    RngStream honest = trial.child(0), oracle = trial.child(1), coins = trial.child(2);
    LightningWorld w = world.fresh_copy();
    LightningOracles handle(w, adv.budget, oracle);
    bool a_ok = false, b_ok = false, fault = false;
    std::string serial;
    try {
      const CloneSubmission sub = adv.forge(handle, coins);
      serial = sub.serial.to_string();
      if (sub.joint) {
        require(sub.joint->qubit_count() == 2 * q, ErrorCode::adversary_fault, "joint submission has the wrong size");
        // Psi as a dA x dB matrix (register A holds the high qubits).
        const auto d = static_cast<Eigen::Index>(pow2(q));
        const CMatrix psi = Eigen::Map<const CMatrix>(sub.joint->amplitudes().data(), d, d).transpose();
        const CVector phi = w.states().state(sub.serial.value()).amplitudes();
        const CVector b_given_a = psi.transpose() * phi.conjugate();  // (<phi| x I) Psi
        const double p_a = snap_probability(b_given_a.squaredNorm());
        const double p_b = snap_probability((psi * phi.conjugate()).squaredNorm());
        const double p_ab = snap_probability(std::norm(phi.dot(b_given_a)));
        w.counters().bump("v", n);
        a_ok = honest.bernoulli(p_a);
        w.counters().bump("v", n);
        const double p_b_cond = a_ok ? p_ab / p_a : (p_a < 1 ? (p_b - p_ab) / (1 - p_a) : 0.0);
        b_ok = honest.bernoulli(snap_probability(std::clamp(p_b_cond, 0.0, 1.0)));
      } else {
        require(sub.a && sub.b, ErrorCode::adversary_fault, "submission is missing a register");
        a_ok = w.v(sub.serial, *sub.a, honest);
        b_ok = w.v(sub.serial, *sub.b, honest);
      }
    } catch (const Error& e) {
      if (!is_fault(e)) throw;
      fault = true;
    }
    const bool win = a_ok && b_ok;
    merge_max(r.max_queries, handle.used());
    record_trial(r, t, win, fault, {{"serial", serial}, {"verify_a", a_ok}, {"verify_b", b_ok}}, opts);
  }
  finalize_rates(r);
  return r;
}

nlohmann::json KeyLemmaReport::to_json() const {
  return {{"adversary", adversary},
          {"n", n},
          {"budget", budget},
          {"seed", seed},
          {"trials", trials},
          {"p_test", p_test},
          {"p_test_prime", p_test_prime},
          {"advantage", advantage},
          {"sigma", sigma},
          {"bound", bound},
          {"faults", faults},
          {"max_queries", max_queries},
          {"holds", holds()}};
}

KeyLemmaReport key_lemma_experiment(unsigned n, const KeyLemmaAdversary& adv, const GameOptions& opts) {
  require(opts.trials > 0, ErrorCode::invalid_argument, "a game needs at least one trial");
  check_dimension(2 * n, "key lemma world");
  KeyLemmaReport r;
  r.adversary = adv.id;
  r.n = n;
  r.budget = adv.budget;
  r.seed = opts.seed;
  r.trials = opts.trials;
  r.bound = static_cast<double>(adv.budget) / static_cast<double>(pow2(n));
  std::uint64_t ones[2] = {0, 0};
  const RngStream master(opts.seed, {kTagKeyLemma});
  for (std::uint64_t t = 0; t < opts.trials; ++t) {
    const RngStream trial = master.child(t);
    RngStream world_rng = trial.child(0);
    const KeyLemmaWorld base = KeyLemmaWorld::sample(n, world_rng);
    for (int arm = 0; arm < 2; ++arm) {
      KeyLemmaWorld w = base;
      RngStream oracle = trial.child(1), coins = trial.child(2);
      KeyLemmaOracles handle(w, arm == 0 ? KeyLemmaOracles::Flavour::test : KeyLemmaOracles::Flavour::test_prime,
                             adv.budget, oracle);
      bool out = false;
      try {
        out = adv.distinguish(handle, coins);
      } catch (const Error& e) {
        if (!is_fault(e)) throw;
        ++r.faults;
      }
      ones[arm] += out;
      merge_max(r.max_queries, handle.used());
      if (opts.events) {
        opts.events({{"game", "key-lemma"}, {"adversary", adv.id}, {"trial", t},
                     {"arm", arm == 0 ? "test" : "test_prime"}, {"output", out}});
      }
    }
  }
  const double trials = static_cast<double>(opts.trials);
  r.p_test = static_cast<double>(ones[0]) / trials;
  r.p_test_prime = static_cast<double>(ones[1]) / trials;
  r.advantage = std::abs(r.p_test - r.p_test_prime);
  r.sigma = std::sqrt((r.p_test * (1 - r.p_test) + r.p_test_prime * (1 - r.p_test_prime)) / trials);
  return r;
}

// ---- hybrids ----

std::string hybrid_step_name(HybridStep s) {
  switch (s) {
    case HybridStep::identity:
      return "identity";
    case HybridStep::swap_unitary:
      return "swap_unitary";
    case HybridStep::swap_function:
      return "swap_function";
    case HybridStep::forbid_set:
      return "forbid_set";
    case HybridStep::suffix_dedup:
      return "suffix_dedup";
    case HybridStep::own_keys_only:
      return "own_keys_only";
  }
  return "?";
}

HybridStep parse_hybrid_step(const std::string& name) {
  for (HybridStep s : {HybridStep::identity, HybridStep::swap_unitary, HybridStep::swap_function,
                       HybridStep::forbid_set, HybridStep::suffix_dedup, HybridStep::own_keys_only}) {
    if (hybrid_step_name(s) == name) return s;
  }
  fail(ErrorCode::invalid_argument, "unknown hybrid step '" + name + "'");
}

nlohmann::json HybridChainReport::to_json() const {
  nlohmann::json j;
  j["steps"] = nlohmann::json::array();
  for (HybridStep s : steps) j["steps"].push_back(hybrid_step_name(s));
  j["arms"] = nlohmann::json::array();
  for (const auto& a : arms) j["arms"].push_back(a.to_json());
  j["gaps"] = gaps;
  j["gap_sigma"] = gap_sigma;
  j["differing_trials"] = differing_trials;
  return j;
}

HybridChainReport run_hybrid_chain(const KEWorld& world, unsigned n, const std::vector<HybridStep>& steps,
                                   HybridGame game, const std::string& adversary_id, unsigned budget,
                                   const GameOptions& opts) {
  for (HybridStep s : steps) {
    const bool ke_only = s == HybridStep::forbid_set || s == HybridStep::own_keys_only;
    const bool binding_only = s == HybridStep::suffix_dedup;
    require(!(ke_only && game == HybridGame::sum_binding) && !(binding_only && game == HybridGame::eavesdrop),
            ErrorCode::invalid_argument,
            "hybrid step " + hybrid_step_name(s) + " does not apply to the " +
                (game == HybridGame::eavesdrop ? "eavesdrop" : "sum-binding") + " game");
  }
  require(world.has_level(n), ErrorCode::invalid_argument, "world has no level n=" + std::to_string(n));

  std::optional<EavesdropAdversary> eav;
  std::optional<BindingAdversary> bind;
  if (game == HybridGame::eavesdrop) {
    for (auto& a : eavesdrop_battery(budget))
      if (a.id == adversary_id) eav = a;
  } else {
    for (auto& a : binding_battery(budget))
      if (a.id == adversary_id) bind = a;
  }
  require(eav || bind, ErrorCode::invalid_argument, "unknown adversary '" + adversary_id + "' for this game");

  HybridChainReport rep;
  rep.steps = steps;
  KEWorld current = world.fresh_copy();
  bool forbid = false, own_keys = false, dedup = false;
  std::string label = "base";
  for (std::size_t arm = 0; arm <= steps.size(); ++arm) {
    if (arm > 0) {
      const HybridStep s = steps[arm - 1];
      const RngStream step_rng(opts.seed, {kTagHybrid, arm});
      switch (s) {
        case HybridStep::identity:
          break;
        case HybridStep::swap_unitary: {
          RngStream r = step_rng;
          current = current.with_unitary(n, std::make_shared<StateFamily>(StateFamily::haar(n, 2 * n, r)));
          break;
        }
        case HybridStep::swap_function:
          current = current.with_function(n, fresh_function(n, step_rng));
          break;
        case HybridStep::forbid_set:
          forbid = true;
          break;
        case HybridStep::suffix_dedup:
          dedup = true;
          break;
        case HybridStep::own_keys_only:
          own_keys = true;
          break;
      }
      label = (arm == 1 ? "" : label + "+") + hybrid_step_name(s);
    }
    GameReport r;
    if (eav) {
      EavesdropHooks hooks;
      if (own_keys) hooks.before = [n](KEWorld& w) { w.policy(n).own_keys_only = true; };
      if (forbid) {
        hooks.after = [n](KEWorld& w, const BitString& x, const BitString& y) {
          w.policy(n).forbidden_keys = {x.value(), y.value()};
        };
      }
      r = run_eavesdrop(current, n, *eav, opts, hooks);
    } else {
      BindingHooks hooks;
      if (dedup) {
        hooks.after = [n](KEWorld& w, const BitString& msg, const BitString& y) {
          HybridPolicy& p = w.policy(n);
          p.suffix_dedup = true;
          p.committed_suffix = msg.value();
          p.challenge_key = y.value();
        };
      }
      r = run_binding(current, n, *bind, opts, hooks);
    }
    r.arm = label;
    rep.arms.push_back(std::move(r));
  }
  for (std::size_t i = 0; i + 1 < rep.arms.size(); ++i) {
    const GameReport& a = rep.arms[i];
    const GameReport& b = rep.arms[i + 1];
    rep.gaps.push_back(b.rate - a.rate);
    rep.gap_sigma.push_back(std::sqrt(a.sigma * a.sigma + b.sigma * b.sigma));
    std::uint64_t diff = 0;
    for (std::size_t t = 0; t < a.outcomes.size(); ++t) diff += a.outcomes[t] != b.outcomes[t];
    rep.differing_trials.push_back(diff);
  }
  return rep;
}

// ---- concentration ----

double levy_bound(std::size_t dim, double lipschitz, double t) {
  require(lipschitz > 0, ErrorCode::invalid_argument, "Lipschitz constant must be positive");
  return 2.0 * std::exp(-(static_cast<double>(dim) - 2.0) * t * t / (24.0 * lipschitz * lipschitz));
}

bool ConcentrationReport::holds() const {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!vacuous[i] && tail_fraction[i] > levy_bound[i]) return false;
  }
  return true;
}

nlohmann::json ConcentrationReport::to_json() const {
  return {{"dim", dim},
          {"samples", samples},
          {"queries", queries},
          {"lipschitz", lipschitz},
          {"grand_mean", grand_mean},
          {"max_deviation", max_deviation},
          {"t", t_grid},
          {"tail_fraction", tail_fraction},
          {"levy_bound", levy_bound},
          {"vacuous", vacuous},
          {"histogram", histogram},
          {"holds", holds()}};
}

ConcentrationReport haar_concentration_experiment(const std::function<double(const Unitary&)>& acceptance,
                                                  unsigned queries, std::size_t dim, std::uint64_t samples,
                                                  RngStream& rng, std::vector<double> t_grid) {
  require(is_power_of_two(dim), ErrorCode::invalid_argument, "dimension must be a power of two");
  check_dimension(log2_exact(dim), "concentration experiment");
  require(samples > 0 && queries > 0, ErrorCode::invalid_argument, "need samples > 0 and queries > 0");
  if (t_grid.empty()) t_grid = {0.05, 0.1, 0.2, 0.3, 0.5};
  ConcentrationReport r;
  r.dim = dim;
  r.samples = samples;
  r.queries = queries;
  r.lipschitz = 2.0 * queries;
  r.t_grid = t_grid;
  std::vector<double> values;
  values.reserve(samples);
  for (std::uint64_t i = 0; i < samples; ++i) values.push_back(acceptance(haar_unitary(dim, rng)));
  double sum = 0.0;
  for (double v : values) sum += v;
  r.grand_mean = sum / static_cast<double>(samples);
  r.histogram.assign(20, 0);
  std::vector<std::uint64_t> tails(t_grid.size(), 0);
  for (double v : values) {
    const double dev = std::abs(v - r.grand_mean);
    r.max_deviation = std::max(r.max_deviation, dev);
    r.histogram[std::min<std::size_t>(19, static_cast<std::size_t>(dev * 20))]++;
    for (std::size_t k = 0; k < t_grid.size(); ++k) tails[k] += dev >= t_grid[k];
  }
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    r.tail_fraction.push_back(static_cast<double>(tails[k]) / static_cast<double>(samples));
    r.levy_bound.push_back(levy_bound(dim, r.lipschitz, t_grid[k]));
    r.vacuous.push_back(r.levy_bound.back() >= 1.0);
  }
  return r;
}

}  // namespace qoracle
