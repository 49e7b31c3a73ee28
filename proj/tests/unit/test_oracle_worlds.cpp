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
#include <map>

#include "doctest.h"
#include "qoracle/enumeration.hpp"
#include "qoracle/error.hpp"
#include "qoracle/oracle_worlds.hpp"
#include "support/oracles.hpp"

using namespace qoracle;

namespace {

KEWorld ke_world(std::uint64_t seed, std::vector<unsigned> levels) {
  WorldDescriptor d;
  d.seed = seed;
  d.levels = std::move(levels);
  return KEWorld::sample(d);
}

}  // namespace

TEST_CASE("descriptor round trip and dimension guard") {
  WorldDescriptor d;
  d.seed = 42;
  d.levels = {1, 2};
  auto j = d.to_json();
  auto back = WorldDescriptor::from_json(j);
  CHECK(back.to_json() == j);
  d.levels = {20};
  try {
    KEWorld::sample(d);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::resource);
    CHECK(std::string(e.what()).find("40 qubits") != std::string::npos);
  }
}

TEST_CASE("same descriptor gives the same world") {
  auto a = ke_world(3, {2});
  auto b = ke_world(3, {2});
  CHECK((a.level(2).states->columns() - b.level(2).states->columns()).cwiseAbs().maxCoeff() == 0.0);
  for (std::uint64_t x = 0; x < 16; ++x) CHECK((*a.level(2).function)(x) == (*b.level(2).function)(x));
}

TEST_CASE("SG outputs are uniform and self-consistent") {
  auto w = ke_world(1, {1, 2, 3});
  RngStream rng(2);
  std::map<std::uint64_t, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) counts[w.sg(2, rng)->key.value()]++;
  for (std::uint64_t k = 0; k < 4; ++k) {
    CHECK(std::abs(counts[k] / double(draws) - 0.25) <= 3 * testing::binomial_sigma(0.25, draws));
  }
  CHECK(w.counters().count("sg", 2) == draws);

  for (unsigned n : {1U, 2U, 3U}) {
    for (int i = 0; i < 1000; ++i) {
      auto out = w.sg(n, rng);
      CHECK(std::abs(out->state.amplitudes().norm() - 1.0) < 1e-10);
      BitString other(rng.uniform(1ULL << n), n);
      CHECK(w.mix(n, out->key, other, out->state, rng).has_value());
    }
    // distinct keys give orthogonal states
    const auto& cols = w.level(n).states->columns();
    CMatrix gram = cols.adjoint() * cols;
    CHECK((gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= 1e-9);
  }
  CHECK_THROWS_AS(w.sg(4, rng), Error);
}

TEST_CASE("Mix contract") {
  auto w = ke_world(5, {2});
  RngStream rng(6);
  const auto& states = *w.level(2).states;
  for (std::uint64_t x = 0; x < 4; ++x) {
    for (std::uint64_t y = 0; y < 4; ++y) {
      BitString bx(x, 2), by(y, 2);
      auto k = w.mix(2, bx, by, states.state(x), rng);
      REQUIRE(k.has_value());
      const std::uint64_t lo = std::min(x, y), hi = std::max(x, y);
      CHECK(k->value() == (*w.level(2).function)((lo << 2) | hi));
      for (std::uint64_t z = 0; z < 4; ++z) {
        if (z == x || z == y) continue;
        CHECK_FALSE(w.mix(2, bx, by, states.state(z), rng).has_value());
      }
    }
  }
  // Haar C register: Born rule on two accepting basis vectors
  int accepted = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    PureState c = haar_state(16, rng);
    accepted += w.mix(2, BitString(0, 2), BitString(3, 2), c, rng).has_value();
  }
  const double p = 2.0 / 16.0;
  CHECK(std::abs(accepted / double(trials) - p) <= 3 * testing::binomial_sigma(p, trials));

  // the general 4n-qubit entry point agrees on |x>|y>|phi_x>
  PureState abc = tensor(tensor(PureState::basis(2, 1), PureState::basis(2, 2)), states.state(1));
  auto k = w.mix(2, abc, rng);
  REQUIRE(k.has_value());
  CHECK(*k == w.key_for(2, BitString(1, 2), BitString(2, 2)));
  CHECK_THROWS_AS(w.mix(2, states.state(0), rng), Error);
  CHECK_THROWS_AS(w.mix(2, BitString(0, 3), BitString(0, 2), states.state(0), rng), Error);
}

TEST_CASE("canonical order flag") {
  WorldDescriptor d;
  d.seed = 9;
  d.levels = {2};
  d.canonical_order = false;
  auto w = KEWorld::sample(d);
  BitString a(1, 2), b(2, 2);
  CHECK(w.key_for(2, a, b).value() == (*w.level(2).function)((1 << 2) | 2));
  CHECK(w.key_for(2, b, a).value() == (*w.level(2).function)((2 << 2) | 1));
}

TEST_CASE("hybrid policies") {
  auto w = ke_world(11, {3});
  RngStream rng(12);
  const auto& states = *w.level(3).states;
  w.policy(3).forbidden_keys = {2};
  CHECK_FALSE(w.mix(3, BitString(2, 3), BitString(5, 3), states.state(2), rng).has_value());
  CHECK(w.mix(3, BitString(2, 3), BitString(5, 3), states.state(5), rng).has_value());

  auto w2 = w.fresh_copy();
  w2.policy(3).own_keys_only = true;
  CHECK_FALSE(w2.mix(3, BitString(2, 3), BitString(5, 3), states.state(5), rng).has_value());
  auto out = w2.sg(3, rng);
  CHECK(w2.mix(3, out->key, BitString(5, 3), out->state, rng).has_value());

  auto w3 = w.fresh_copy();
  w3.policy(3).suffix_dedup = true;
  w3.policy(3).challenge_key = 6;
  std::map<std::uint64_t, int> seen;
  for (int i = 0; i < 40; ++i) {
    auto o = w3.sg(3, rng);
    if (!o) continue;
    CHECK(o->key.value() != 6);
    CHECK(seen[o->key.value() & 3]++ == 0);
  }
}

TEST_CASE("swap hooks") {
  auto w = ke_world(13, {2});
  RngStream rng(14);
  auto same = w.with_function(2, w.level(2).function);
  RngStream r1(15), r2(15);
  for (int i = 0; i < 50; ++i) {
    auto a = w.sg(2, r1);
    auto b = same.sg(2, r2);
    CHECK(a->key == b->key);
  }
  RngStream ur(16);
  auto swapped = swap_unitary(w, 2, haar_unitary(16, ur));
  CHECK(swapped.counters().total("sg") == 0);
  for (int i = 0; i < 100; ++i) {
    auto x = swapped.sg(2, rng);
    auto y = swapped.sg(2, rng);
    auto ka = swapped.mix(2, x->key, y->key, x->state, rng);
    auto kb = swapped.mix(2, x->key, y->key, y->state, rng);
    CHECK(ka == kb);
  }
  CHECK_THROWS_AS(swap_unitary(w, 2, haar_unitary(8, ur)), Error);

  // swapping f after the transcript is fixed leaves the key unpredictable
  int match = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    RngStream tr(17, {static_cast<std::uint64_t>(i)});
    auto x = w.sg(2, tr);
    auto y = w.sg(2, tr);
    BitString guess = w.key_for(2, x->key, y->key);  // uses the old f
    RngStream fr = tr.child(1);
    auto fresh = std::make_shared<RandomFunction>(sample_random_function(4, 2, fr));
    auto w2 = swap_function(w, 2, fresh);
    match += w2.key_for(2, x->key, y->key) == guess;
  }
  CHECK(std::abs(match / double(trials) - 0.25) <= 3 * testing::binomial_sigma(0.25, trials));
}

TEST_CASE("lightning world V") {
  WorldDescriptor d;
  d.kind = "lightning";
  d.seed = 21;
  d.levels = {2};
  d.padding = 2;
  auto w = LightningWorld::sample(d);
  RngStream rng(22);
  for (int i = 0; i < 200; ++i) {
    auto out = w.sg(rng);
    CHECK(w.v(out.key, out.state, rng));
    BitString other((out.key.value() + 1) % 4, 2);
    CHECK_FALSE(w.v(other, out.state, rng));
  }
  CHECK(w.counters().count("v", 2) == 400);

  d.levels = {1};
  d.padding = 9;
  auto big = LightningWorld::sample(d);
  CHECK(big.total_qubits() == 10);
  int acc = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) acc += big.v(BitString(rng.uniform(2), 1), haar_state(1024, rng), rng);
  CHECK(testing::wilson95(acc, trials).second <= 3.0 / 1024.0);
}

TEST_CASE("key lemma oracles") {
  RngStream rng(31);
  auto w = KeyLemmaWorld::sample(3, rng, {4});
  BitString x(3, 3);
  PureState s = w.apply(x);
  for (int i = 0; i < 50; ++i) {
    auto o = w.test_all(x, s, rng);
    CHECK(o.test);
    CHECK(o.test_prime);
    CHECK(o.test_s);
  }
  BitString y(4, 3);
  PureState phi_y = w.states().state(4);
  for (int i = 0; i < 50; ++i) {
    auto o = w.test_all(y, phi_y, rng);
    CHECK(o.test);
    CHECK_FALSE(o.test_prime);
    CHECK_FALSE(o.test_s);
  }
  // coupled Test'/Test on random inputs
  for (int i = 0; i < 2000; ++i) {
    BitString z(rng.uniform(8), 3);
    PureState in = haar_state(64, rng);
    auto o = w.test_all(z, in, rng);
    if (o.test_prime) CHECK(o.test);
    if (o.test_s) CHECK(o.test);
  }
  CHECK(w.counters().count("apply", 3) == 1);
  CHECK(w.counters().count("test", 3) == 2100);
  PureState reg = PureState::basis(3, 6);
  auto out = w.apply(reg, rng);
  CHECK(w.applied().count(6) == 1);
  CHECK(overlap_squared(out, w.states().state(6)) == doctest::Approx(1.0));
}

TEST_CASE("suffix birthday events in SG") {
  auto w = ke_world(41, {4});
  const unsigned T = 4, n = 4;
  int repeats = 0;
  const int trials = 20000;
  RngStream rng(42);
  for (int t = 0; t < trials; ++t) {
    std::set<std::uint64_t> seen;
    bool rep = false;
    for (unsigned i = 0; i < T; ++i) rep |= !seen.insert(w.sg(n, rng)->key.value() & 7).second;
    repeats += rep;
  }
  const double rate = repeats / double(trials);
  CHECK(rate <= double(T * T) / 8 + 3 * testing::binomial_sigma(rate, trials));
  CHECK(std::abs(rate - testing::birthday_exact(T, 8)) <= 3 * testing::binomial_sigma(rate, trials) + 1e-3);
}

TEST_CASE("pspace stub") {
  CHECK_FALSE(pspace_stub(0, [](std::uint64_t) { return 1.0; }).found);
  auto r = pspace_stub(256, [](std::uint64_t w) { return w == 173 ? 1.0 : 0.01 * (w % 7); });
  CHECK(r.found);
  CHECK(r.witness == 173);
  CHECK(r.evaluated == 256);
  CHECK_THROWS_AS(pspace_stub((1ULL << 24) + 1, [](std::uint64_t) { return 0.0; }), Error);
}

TEST_CASE("enumeration of an oracle sampler is exact") {
  auto w = ke_world(51, {2});
  std::function<std::string(ChoiceSource&)> sampler = [&](ChoiceSource& c) {
    auto x = w.sg(2, c);
    auto k = w.mix(2, x->key, BitString(0, 2), w.level(2).states->state(0), c);
    return x->key.to_string() + ":" + key_to_string(k);
  };
  auto dist = enumerate_distribution(sampler);
  double total = 0;
  for (auto& [k, p] : dist) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // key 00: mixing own state accepts always; others accept with prob 0
  CHECK(dist.size() == 4);
  CHECK_THROWS_AS(enumerate_distribution(sampler, 3), Error);
}
