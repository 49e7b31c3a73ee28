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
#include "qoracle/protocols.hpp"
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

TEST_CASE("KE honest runs agree and match f") {
  auto w = ke_world(1, {2, 3});
  RngStream rng(2);
  for (unsigned n : {2U, 3U}) {
    for (int i = 0; i < 1000; ++i) {
      Transcript t = ke_run_honest(w, n, rng);
      REQUIRE(t.messages.size() == 2);
      REQUIRE(t.alice.has_value());
      CHECK(t.alice == t.bob);
      const auto x = t.messages[0].payload.value(), y = t.messages[1].payload.value();
      const auto lo = std::min(x, y), hi = std::max(x, y);
      CHECK(t.alice->value() == (*w.level(n).function)((lo << n) | hi));
    }
  }
  auto j = ke_run_honest(w, 2, rng).to_json();
  CHECK(j["messages"].size() == 2);
  CHECK(j["outputs"]["alice"] == j["outputs"]["bob"]);
}

TEST_CASE("KE transcript marginals are uniform (chi-square)") {
  auto w = ke_world(3, {2});
  RngStream rng(4);
  std::map<std::uint64_t, int> cells;
  const int runs = 10000;
  for (int i = 0; i < runs; ++i) {
    Transcript t = ke_run_honest(w, 2, rng);
    cells[(t.messages[0].payload.value() << 2) | t.messages[1].payload.value()]++;
  }
  double chi2 = 0.0;
  const double expect = runs / 16.0;
  for (std::uint64_t c = 0; c < 16; ++c) chi2 += std::pow(cells[c] - expect, 2) / expect;
  CHECK(chi2 < 30.578);  // chi-square, 15 dof, alpha 0.01
}

TEST_CASE("commitment correctness") {
  auto w = ke_world(5, {3});
  RngStream rng(6);
  for (int i = 0; i < 1000; ++i) {
    const bool b = rng.uniform(2) == 1;
    auto s = commit(w, 3, b, rng);
    CHECK(s.key.bit(1) == b);
    CHECK(s.key == BitString(b ? 1 : 0, 1).concat(s.message));
    auto r = open(s, w, rng);
    CHECK(r.accepted);
    REQUIRE(r.bit.has_value());
    CHECK(*r.bit == b);
  }
  // a tampered response is rejected unless it happens to hit the key
  int rejected = 0;
  const int trials = 4000;
  for (int i = 0; i < trials; ++i) {
    auto s = commit(w, 3, true, rng);
    auto rc = receiver_challenge(w, 3, rng);
    KeyOutput honest = committer_response(w, s, rc.y, rng);
    KeyOutput tampered = BitString((honest->value() + 1 + rng.uniform(7)) % 8, 3);
    rejected += !receiver_check(w, 3, rc, true, s.message, tampered, rng);
    CHECK(receiver_check(w, 3, rc, true, s.message, honest, rng));
  }
  CHECK(rejected == trials);
  CommitmentSession empty;
  CHECK_THROWS_AS(open(empty, w, rng), Error);
}

TEST_CASE("commit retry budget is explicit") {
  auto w = ke_world(7, {2});
  RngStream rng(8);
  bool saw_error = false;
  for (int i = 0; i < 200 && !saw_error; ++i) {
    try {
      commit(w, 2, true, rng, 1);
    } catch (const Error& e) {
      saw_error = e.code() == ErrorCode::retry_exhausted;
    }
  }
  CHECK(saw_error);
}

TEST_CASE("commitment hiding: exact message distributions match") {
  auto w = ke_world(9, {2});
  auto message_dist = [&](bool b) {
    std::function<std::string(ChoiceSource&)> sampler = [&, b](ChoiceSource& c) -> std::string {
      KEWorld local = w.fresh_copy();
      try {
        return commit(local, 2, b, c, 12).message.to_string();
      } catch (const Error&) {
        return "ERR";
      }
    };
    return enumerate_distribution(sampler);
  };
  auto d0 = message_dist(false);
  auto d1 = message_dist(true);
  double tv = 0.0;
  std::set<std::string> keys;
  for (auto& [k, p] : d0) keys.insert(k);
  for (auto& [k, p] : d1) keys.insert(k);
  for (const auto& k : keys) tv += std::abs((d0.count(k) ? d0[k] : 0.0) - (d1.count(k) ? d1[k] : 0.0));
  CHECK(tv / 2 == 0.0);
  CHECK(d0["0"] == doctest::Approx(0.5 * (1 - std::pow(0.5, 12))));
}

TEST_CASE("lightning mint and verify") {
  WorldDescriptor d;
  d.kind = "lightning";
  d.seed = 11;
  d.levels = {2};
  d.padding = 2;
  auto w = LightningWorld::sample(d);
  RngStream rng(12);
  for (int i = 0; i < 500; ++i) {
    BankNote a = lightning_mint(w, rng);
    CHECK(lightning_verify(w, a, rng));
    BankNote b = lightning_mint(w, rng);
    if (b.serial != a.serial) CHECK_FALSE(lightning_verify(w, BankNote{a.serial, b.note}, rng));
  }
}

TEST_CASE("2QKD adapter") {
  auto w = ke_world(13, {2});
  RngStream rng(14);
  int match = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    QkdFirst first = qkd_first(w, 2, rng);
    CHECK_FALSE(first.message.quantum.has_value());
    auto second = qkd_second(w, 2, first.message, rng);
    REQUIRE(second.has_value());
    KeyOutput k = qkd_decode(w, first.state, second->resp, rng);
    CHECK(k == second->key);
    CHECK_THROWS_AS(qkd_decode(w, first.state, second->resp, rng), Error);

    // decode with st from an independent run
    QkdFirst other = qkd_first(w, 2, rng);
    KeyOutput k2 = qkd_decode(w, other.state, second->resp, rng);
    match += k2 == second->key;
  }
  // exact rate for this f: average over x, y, x' of [key(x', y) == key(x, y)]
  double p = 0.0;
  for (std::uint64_t x = 0; x < 4; ++x)
    for (std::uint64_t y = 0; y < 4; ++y)
      for (std::uint64_t x2 = 0; x2 < 4; ++x2)
        p += w.key_for(2, BitString(x2, 2), BitString(y, 2)) == w.key_for(2, BitString(x, 2), BitString(y, 2));
  p /= 64.0;
  CHECK(std::abs(match / double(trials) - p) <= 3 * testing::binomial_sigma(p, trials));
}
