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

#include <cmath>

#include "doctest.h"
#include "qoracle/error.hpp"
#include "qoracle/games.hpp"
#include "support/oracles.hpp"

using namespace qoracle;

namespace {

KEWorld ke_world(std::uint64_t seed, std::vector<unsigned> levels) {
  WorldDescriptor d;
  d.seed = seed;
  d.levels = std::move(levels);
  return KEWorld::sample(d);
}

LightningWorld lightning(std::uint64_t seed, unsigned n, unsigned p) {
  WorldDescriptor d;
  d.kind = "lightning";
  d.seed = seed;
  d.levels = {n};
  d.padding = p;
  return LightningWorld::sample(d);
}

template <typename Battery>
auto pick(const Battery& b, const std::string& id) {
  for (const auto& a : b)
    if (a.id == id) return a;
  FAIL("no adversary " << id);
  return b.front();
}

void check_close(double rate, double expect, std::uint64_t trials) {
  CHECK(std::abs(rate - expect) <= 3 * testing::binomial_sigma(expect, static_cast<double>(trials)) + 1e-12);
}

}  // namespace

TEST_CASE("Wilson interval agrees with the test oracle") {
  for (auto [s, n] : {std::pair<std::uint64_t, std::uint64_t>{0, 100}, {37, 100}, {100, 100}, {5, 100000}}) {
    auto [lo, hi] = wilson_interval(s, n);
    auto [lo2, hi2] = testing::wilson95(s, n);
    CHECK(lo == doctest::Approx(std::max(0.0, lo2)).epsilon(1e-12));
    CHECK(hi == doctest::Approx(std::min(1.0, hi2)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(wilson_interval(3, 2), Error);
}

TEST_CASE("eavesdrop game battery") {
  auto w = ke_world(21, {2});
  const unsigned T = 2;
  GameOptions o;
  o.trials = 10000;
  o.seed = 1;
  auto battery = eavesdrop_battery(T);
  auto zero = ke_eavesdrop_game(w, 2, pick(battery, "zero-query"), o);
  check_close(zero.rate, 0.25, o.trials);
  CHECK(zero.max_queries.empty());
  CHECK(zero.wins <= zero.trials);
  CHECK(zero.ci_low <= zero.rate);
  CHECK(zero.rate <= zero.ci_high);

  o.trials = 500;
  auto omni = ke_eavesdrop_game(w, 2, pick(battery, "omniscient"), o);
  CHECK(omni.rate == 1.0);

  o.trials = 10000;
  for (const char* id : {"sg-grinder", "mix-prober"}) {
    auto r = ke_eavesdrop_game(w, 2, pick(battery, id), o);
    CHECK(r.within_ceiling());
    CHECK(r.rate <= eavesdrop_ceiling(2, T) + 3 * r.sigma);
    CHECK(r.budget_respected());
    CHECK(r.faults == 0);
    CHECK(r.rate >= 0.25 - 3 * r.sigma);
  }
  // sg-grinder's exact win rate: 1/4 + (1 - 1/4) * P(SG hits x or y in T draws)
  auto grind = ke_eavesdrop_game(w, 2, pick(battery, "sg-grinder"), o);
  // x == y half the time contributes a 1/4 hit chance, otherwise 1/2
  const double hit = 0.25 * (1 - std::pow(0.75, T)) + 0.75 * (1 - std::pow(0.5, T));
  check_close(grind.rate, 0.25 + 0.75 * hit, o.trials);
  CHECK(grind.max_queries["sg"] == T);
}

TEST_CASE("budget overrun is an adversary fault") {
  auto w = ke_world(22, {2});
  EavesdropAdversary greedy{"greedy", 3, false, [](KEOracles& o, const EavesdropView& v, RngStream&) {
                              for (int i = 0; i < 4; ++i) o.sg(v.n);
                              return v.x;
                            }};
  GameOptions opts;
  opts.trials = 50;
  auto r = ke_eavesdrop_game(w, 2, greedy, opts);
  CHECK(r.faults == 50);
  CHECK(r.wins == 0);
  CHECK(r.max_queries["sg"] == 3);
}

TEST_CASE("per-trial events and trial order independence") {
  auto w = ke_world(23, {2});
  std::vector<nlohmann::json> events;
  GameOptions o;
  o.trials = 200;
  o.seed = 5;
  o.events = [&](const nlohmann::json& e) { events.push_back(e); };
  auto r = ke_eavesdrop_game(w, 2, eavesdrop_battery(2)[2], o);
  REQUIRE(events.size() == 200);
  std::uint64_t wins = 0;
  for (const auto& e : events) wins += e["win"].get<bool>();
  CHECK(wins == r.wins);
  // a report over the first half equals the prefix of the full run
  o.trials = 100;
  o.events = nullptr;
  auto half = ke_eavesdrop_game(w, 2, eavesdrop_battery(2)[2], o);
  CHECK(std::equal(half.outcomes.begin(), half.outcomes.end(), r.outcomes.begin()));
  CHECK(ke_eavesdrop_game(w, 2, eavesdrop_battery(2)[2], o).to_json().dump() == half.to_json().dump());
}

TEST_CASE("sum-binding battery") {
  auto w = ke_world(24, {3});
  const unsigned T = 3;
  GameOptions o;
  o.trials = 10000;
  o.seed = 2;
  auto battery = binding_battery(T);
  auto honest = sum_binding_game(w, 3, pick(battery, "honest"), o);
  check_close(honest.rate, 0.5, o.trials);
  auto blind = sum_binding_game(w, 3, pick(battery, "blind-guess"), o);
  check_close(blind.rate, 0.5 + 0.5 / 8, o.trials);
  auto grind = sum_binding_game(w, 3, pick(battery, "sibling-grinder"), o);
  CHECK(grind.within_ceiling());
  CHECK(grind.rate - blind.rate <= T / 4.0 + 3 * grind.sigma);
  for (const auto* r : {&honest, &blind, &grind}) {
    CHECK(r->budget_respected());
    CHECK(r->faults == 0);
  }
}

TEST_CASE("lightning clone battery") {
  auto w = lightning(25, 2, 2);
  const unsigned T = 3;
  GameOptions o;
  o.trials = 20000;
  o.seed = 3;
  std::vector<nlohmann::json> log;
  o.events = [&](const nlohmann::json& e) { log.push_back(e); };
  auto battery = clone_battery(T);
  auto honest = lightning_clone_game(w, pick(battery, "honest-haar"), o);
  CHECK(testing::wilson95(honest.wins, honest.trials).second <= 3.0 / 64 + 1e-12);
  auto two = lightning_clone_game(w, pick(battery, "two-mint"), o);
  auto bday = lightning_clone_game(w, pick(battery, "sg-birthday"), o);
  // collision among T serials from 4 values, second register then verifies surely
  check_close(bday.rate, testing::birthday_exact(T, 4), o.trials);
  for (const auto* r : {&honest, &two, &bday}) {
    CHECK(r->within_ceiling());
    CHECK(r->budget_respected());
  }
  // with T=3 two-mint finds a distinct serial unless all three collide
  CHECK(two.rate <= 1.0 / 16 + 3 * two.sigma);
  for (const auto& e : log) {
    if (e["win"].get<bool>()) CHECK((e["verify_a"].get<bool>() && e["verify_b"].get<bool>()));
  }
}

TEST_CASE("clone game verifies entangled submissions sequentially") {
  auto w = lightning(26, 2, 2);
  const auto& fam = w.states();
  auto joint_of = [&](std::uint64_t s1, std::uint64_t s2, std::uint64_t t1, std::uint64_t t2) {
    CVector v = kron(fam.state(s1).amplitudes(), fam.state(s2).amplitudes()) +
                kron(fam.state(t1).amplitudes(), fam.state(t2).amplitudes());
    return PureState::normalized(v);
  };
  GameOptions o;
  o.trials = 4000;
  std::vector<nlohmann::json> log;
  o.events = [&](const nlohmann::json& e) { log.push_back(e); };
  CloneAdversary same{"joint-same", 1, [&](LightningOracles& h, RngStream&) {
                        SgOutput s = h.sg();
                        return CloneSubmission{s.key, {}, {}, tensor(s.state, s.state)};
                      }};
  CHECK(lightning_clone_game(w, same, o).rate == 1.0);
  // (|s s'> + |s' s>)/sqrt2 under serial s: A accepts half the time, then B
  // holds phi_s' and must reject; when A rejects B holds phi_s.
  CloneAdversary swapped{"joint-swap", 0, [&](LightningOracles&, RngStream&) {
                           return CloneSubmission{BitString(0, 2), {}, {}, joint_of(0, 1, 1, 0)};
                         }};
  log.clear();
  auto r = lightning_clone_game(w, swapped, o);
  CHECK(r.rate == 0.0);
  std::uint64_t a_ok = 0, b_ok = 0;
  for (const auto& e : log) {
    a_ok += e["verify_a"].get<bool>();
    b_ok += e["verify_b"].get<bool>();
    CHECK(e["verify_a"].get<bool>() != e["verify_b"].get<bool>());
  }
  check_close(a_ok / 4000.0, 0.5, 4000);
  CHECK(a_ok + b_ok == 4000);
}

TEST_CASE("key lemma battery respects T/2^n") {
  for (auto [n, T] : {std::pair<unsigned, unsigned>{3, 4}, {4, 8}}) {
    GameOptions o;
    o.trials = 1500;
    o.seed = 9;
    for (const auto& adv : key_lemma_battery(T)) {
      auto r = key_lemma_experiment(n, adv, o);
      CHECK_MESSAGE(r.holds(), adv.id);
      CHECK(r.faults == 0);
      for (const auto& [k, v] : r.max_queries) CHECK(v <= T);
      if (adv.id == "apply-then-test") {
        CHECK(r.p_test == 1.0);
        CHECK(r.advantage == 0.0);
      }
      CHECK(r.p_test_prime <= r.p_test + 3 * r.sigma);
    }
  }
}

TEST_CASE("hybrid chains") {
  auto w = ke_world(27, {2, 3});
  GameOptions o;
  o.trials = 4000;
  o.seed = 4;
  auto base = ke_eavesdrop_game(w, 2, pick(eavesdrop_battery(2), "sg-grinder"), o);
  auto empty = run_hybrid_chain(w, 2, {}, HybridGame::eavesdrop, "sg-grinder", 2, o);
  REQUIRE(empty.arms.size() == 1);
  CHECK(empty.arms[0].to_json().dump() == base.to_json().dump());

  auto ident = run_hybrid_chain(w, 2, {HybridStep::identity, HybridStep::identity}, HybridGame::eavesdrop,
                                "sg-grinder", 2, o);
  CHECK(ident.differing_trials == std::vector<std::uint64_t>{0, 0});
  CHECK(ident.arms[1].outcomes == ident.arms[0].outcomes);

  auto sf = run_hybrid_chain(w, 2, {HybridStep::swap_function}, HybridGame::eavesdrop, "zero-query", 2, o);
  CHECK(std::abs(sf.gaps[0]) <= 3 * sf.gap_sigma[0]);
  CHECK(sf.arms[1].arm == "swap_function");

  auto su = run_hybrid_chain(w, 3, {HybridStep::swap_unitary}, HybridGame::eavesdrop, "sg-grinder", 4, o);
  CHECK(std::abs(su.gaps[0]) <= 0.1 + 3 * su.gap_sigma[0]);

  // Mix* on the transcript keys kills the grinder's only edge.
  auto fb = run_hybrid_chain(w, 2, {HybridStep::forbid_set}, HybridGame::eavesdrop, "sg-grinder", 2, o);
  check_close(fb.arms[1].rate, 0.25, o.trials);
  auto own = run_hybrid_chain(w, 2, {HybridStep::own_keys_only}, HybridGame::eavesdrop, "mix-prober", 2, o);
  CHECK(own.arms[1].within_ceiling());

  auto dd = run_hybrid_chain(w, 3, {HybridStep::suffix_dedup}, HybridGame::sum_binding, "sibling-grinder", 3, o);
  check_close(dd.arms[1].rate, 0.5 + 0.5 / 8, o.trials);
  CHECK(dd.to_json()["arms"].size() == 2);

  CHECK_THROWS_AS(run_hybrid_chain(w, 2, {HybridStep::suffix_dedup}, HybridGame::eavesdrop, "zero-query", 2, o),
                  Error);
  CHECK_THROWS_AS(run_hybrid_chain(w, 2, {}, HybridGame::eavesdrop, "nobody", 2, o), Error);
  CHECK(parse_hybrid_step("own_keys_only") == HybridStep::own_keys_only);
  CHECK_THROWS_AS(parse_hybrid_step("bogus"), Error);
}

TEST_CASE("Haar concentration") {
  RngStream rng(31);
  auto flat = haar_concentration_experiment([](const Unitary&) { return 0.5; }, 1, 16, 200, rng);
  CHECK(flat.max_deviation == 0.0);
  for (double f : flat.tail_fraction) CHECK(f == 0.0);

  auto overlap = [](const Unitary& u) { return std::norm(u.matrix()(0, 0)); };
  auto r = haar_concentration_experiment(overlap, 1, 16, 4000, rng, {0.3});
  CHECK(r.levy_bound[0] == doctest::Approx(2 * std::exp(-14 * 0.09 / 96)));
  CHECK(r.tail_fraction[0] <= r.levy_bound[0]);
  CHECK(r.holds());
  // |U_00|^2 ~ Beta(1, 15): mean 1/16
  CHECK(r.grand_mean == doctest::Approx(1.0 / 16).epsilon(0.1));

  auto tiny = haar_concentration_experiment(overlap, 1, 2, 500, rng);
  for (bool v : tiny.vacuous) CHECK(v);
  CHECK(tiny.holds());
  CHECK(tiny.to_json()["vacuous"].size() == tiny.t_grid.size());
}
