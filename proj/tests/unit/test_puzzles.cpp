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
#include "qoracle/protocols.hpp"
#include "qoracle/puzzles.hpp"
#include "support/oracles.hpp"

using namespace qoracle;

namespace {

KEWorld ke_world(std::uint64_t seed, std::vector<unsigned> levels) {
  WorldDescriptor d;
  d.seed = seed;
  d.levels = std::move(levels);
  return KEWorld::sample(d);
}

DiscreteDistribution random_dist(RngStream& rng, int support) {
  std::map<std::string, double> p;
  double total = 0.0;
  std::vector<double> w;
  for (int i = 0; i < support; ++i) w.push_back(rng.uniform01() * (rng.uniform(3) == 0 ? 0.0 : 1.0) + 1e-3);
  for (double x : w) total += x;
  for (int i = 0; i < support; ++i) p[std::to_string(i)] = w[i] / total;
  // fix rounding so the sum is exactly representable within tolerance
  return DiscreteDistribution(p);
}

// f(canon(x, y)) straight from the function table.
std::string key_from_table(const KEWorld& w, unsigned n, std::uint64_t x, std::uint64_t y) {
  const auto lo = std::min(x, y), hi = std::max(x, y);
  return BitString((*w.level(n).function)((lo << n) | hi), n).to_string();
}

}  // namespace

TEST_CASE("statistical distance examples and metric properties") {
  auto p = DiscreteDistribution({{"0", 0.75}, {"1", 0.25}});
  auto u = DiscreteDistribution::uniform({"0", "1"});
  CHECK(statistical_distance(p, p) == 0.0);
  CHECK(statistical_distance(p, u) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(statistical_distance(DiscreteDistribution::point("a"), DiscreteDistribution::point("b")) == 1.0);
  RngStream rng(1);
  for (int i = 0; i < 500; ++i) {
    auto a = random_dist(rng, 5), b = random_dist(rng, 7), c = random_dist(rng, 3);
    CHECK(statistical_distance(a, b) == statistical_distance(b, a));
    CHECK(statistical_distance(a, c) <= statistical_distance(a, b) + statistical_distance(b, c) + 1e-12);
  }
  CHECK_THROWS_AS(DiscreteDistribution({{"0", 0.5}, {"1", 0.4}}), Error);
  CHECK_THROWS_AS(DiscreteDistribution({{"0", 1.5}, {"1", -0.5}}), Error);
  CHECK(DiscreteDistribution::uniform({"0", "1", "2", "3"}).min_entropy() == doctest::Approx(2.0));
}

TEST_CASE("KE puzzle: exact joint, point-mass conditionals, brute force") {
  auto w = ke_world(41, {2});
  auto sampler = PuzzleSampler::ke(w, 2);
  RngStream rng(2);
  for (int i = 0; i < 200; ++i) {
    PuzzleSample ps = sampler.sample(rng);
    auto j = nlohmann::json::parse(ps.puzzle);
    REQUIRE(j.size() == 2);
    const auto x = BitString::parse(j[0].get<std::string>()).value(), y = BitString::parse(j[1].get<std::string>()).value();
    CHECK(ps.key == key_from_table(w, 2, x, y));
  }
  BruteForceInverter inv(sampler);
  auto marginal = puzzle_marginal(inv.joint());
  CHECK(marginal.probabilities().size() == 16);
  for (const auto& [s, p] : marginal.probabilities()) {
    CHECK(p == doctest::Approx(1.0 / 16).epsilon(1e-12));
    auto cond = inv(s);
    CHECK(cond.probabilities().size() == 1);
    auto j = nlohmann::json::parse(s);
    CHECK(cond.prob(key_from_table(w, 2, BitString::parse(j[0].get<std::string>()).value(), BitString::parse(j[1].get<std::string>()).value())) == 1.0);
  }
  auto exact = evaluate_inverter_exact(inv.joint(), [&](const std::string& s) { return inv(s); });
  CHECK(exact.delta == 0.0);
  CHECK(exact.mode == "exact");
  CHECK(evaluate_inverter_exact(inv.joint(), zero_query_inverter(2)).delta == doctest::Approx(0.75).epsilon(1e-12));

  // constant inverter: 1 - fraction of transcripts whose key is "00"
  double hits = 0;
  for (std::uint64_t x = 0; x < 4; ++x)
    for (std::uint64_t y = 0; y < 4; ++y) hits += key_from_table(w, 2, x, y) == "00";
  CHECK(evaluate_inverter_exact(inv.joint(), constant_inverter("00")).delta ==
        doctest::Approx(1 - hits / 16).epsilon(1e-12));

  RngStream mc(3);
  auto z = evaluate_inverter(sampler, zero_query_inverter(2), 10000, mc);
  CHECK(z.mode == "monte-carlo");
  CHECK(z.delta >= 0.75 - 3 * z.sigma);
  CHECK(evaluate_inverter(sampler, [&](const std::string& s) { return inv(s); }, 2000, mc).delta == 0.0);

  CHECK_THROWS_AS(inv("[\"00\",\"01\",\"10\"]"), Error);
  CHECK_THROWS_AS(enumerate_joint(sampler, 4), Error);
}

TEST_CASE("commitment puzzle shape and round trip") {
  auto w = ke_world(42, {3});
  RngStream rng(4);
  for (int i = 0; i < 300; ++i) {
    PuzzleSample ps = owpuzz_from_commitment(w, 3, rng);
    ParsedRoundPuzzle p = parse_round_puzzle(ps.puzzle);
    REQUIRE((p.round == 1 || p.round == 2));
    CHECK(p.commitment.size() == 2);
    CHECK(p.messages.size() == 2 * p.round - 1);
    if (p.round == 2) {
      CHECK(ps.key.size() == 3);
      CHECK(p.messages[1] == ps.key.substr(0, 0) + p.messages[1]);
      // the response matches the receiver's own Mix for the revealed bit
      CHECK(ps.key == w.key_for(3, BitString::parse(p.messages[2]),
                                BitString::parse(p.messages[1] + p.commitment)).to_string());
    } else {
      CHECK((ps.key == "0" || ps.key == "1"));
    }
    // lossless: re-serializing the parsed fields gives the same string
    nlohmann::json again = nlohmann::json::array({p.round, p.commitment});
    for (const auto& m : p.messages) again.push_back(m);
    CHECK(again.dump() == ps.puzzle);
  }
  CHECK_THROWS_AS(parse_round_puzzle("not json"), Error);
  CHECK_THROWS_AS(parse_round_puzzle("[2,\"01\",\"\"]"), Error);
}

TEST_CASE("commitment puzzle conditionals by enumeration") {
  auto w = ke_world(43, {2});
  auto sampler = PuzzleSampler::commitment(w, 2);
  BruteForceInverter inv(sampler);
  auto marginal = puzzle_marginal(inv.joint());
  for (const auto& [s, p] : marginal.probabilities()) {
    ParsedRoundPuzzle parsed = parse_round_puzzle(s);
    auto cond = inv(s);
    if (parsed.commitment == "ERR") {
      CHECK(cond.prob("ERR") == 1.0);
    } else if (parsed.round == 2) {
      CHECK(cond.min_entropy() == 0.0);
    } else {
      // hiding: the revealed bit is uniform given the commitment alone
      CHECK(cond.min_entropy() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  // matches empirical conditionals within 3 sigma
  RngStream rng(5);
  std::map<std::string, std::map<std::string, std::uint64_t>> counts;
  const int runs = 10000;
  for (int i = 0; i < runs; ++i) {
    auto ps = sampler.sample(rng);
    counts[ps.puzzle][ps.key]++;
  }
  for (const auto& [s, ks] : counts) {
    std::uint64_t n_s = 0;
    for (const auto& [k, c] : ks) n_s += c;
    auto cond = inv(s);
    for (const auto& [k, p] : cond.probabilities()) {
      const double freq = ks.count(k) ? static_cast<double>(ks.at(k)) / n_s : 0.0;
      CHECK(std::abs(freq - p) <= 3 * testing::binomial_sigma(p, n_s) + 1e-12);
    }
  }
}

TEST_CASE("round-index averaging identity") {
  auto w = ke_world(44, {2});
  for (const Inverter& a : {zero_query_inverter(2), constant_inverter("01")}) {
    const double avg = evaluate_inverter_exact(BruteForceInverter(PuzzleSampler::commitment(w, 2, std::nullopt, 6)).joint(), a).delta;
    double mean = 0.0;
    for (unsigned i : {1U, 2U}) {
      mean += evaluate_inverter_exact(BruteForceInverter(PuzzleSampler::commitment(w, 2, i, 6)).joint(), a).delta / 2;
    }
    CHECK(std::abs(avg - mean) <= 1e-12);
  }
}

TEST_CASE("synthetic three-round protocol") {
  // z = m xor r; round j: receiver sends a bit, committer answers with its xor
  // against m, and the last round reveals r.
  RoundProtocol proto = [](bool m, unsigned rounds, ChoiceSource& c) {
    const bool r = c.uniform(2) == 1;
    OpeningTranscript tr;
    tr.commitment = (m ^ r) ? "1" : "0";
    for (unsigned j = 1; j <= rounds; ++j) {
      const bool x = c.uniform(2) == 1;
      const bool d = j == 3 ? r : (x ^ m);
      tr.rounds.emplace_back(x ? "1" : "0", d ? "1" : "0");
    }
    return tr;
  };
  auto sampler = PuzzleSampler::rounds("xor3", 3, proto);
  BruteForceInverter inv(sampler);
  const auto marginal = puzzle_marginal(inv.joint());
  for (const auto& [s, p] : marginal.probabilities()) {
    auto parsed = parse_round_puzzle(s);
    CHECK(parsed.messages.size() == 2 * parsed.round - 1);
    // round 1 answer is uniform given (z, x_1); later answers are determined
    CHECK(inv(s).min_entropy() == doctest::Approx(parsed.round == 1 ? 1.0 : 0.0));
  }
  double mean = 0.0;
  for (unsigned i = 1; i <= 3; ++i)
    mean += evaluate_inverter_exact(BruteForceInverter(PuzzleSampler::rounds("xor3", 3, proto, i)).joint(),
                                    constant_inverter("0")).delta / 3;
  CHECK(std::abs(evaluate_inverter_exact(inv.joint(), constant_inverter("0")).delta - mean) <= 1e-12);
}

TEST_CASE("state puzzle from 2QKD") {
  auto w = ke_world(45, {2});
  RngStream rng(6);
  for (int i = 0; i < 200; ++i) {
    KEWorld local = w.fresh_copy();
    auto sp = state_puzzle_from_2qkd(local, 2, rng);
    CHECK(state_puzzle_accept_probability(w, 2, sp.puzzle, sp.key) == 1.0);
    CHECK(state_puzzle_verify(w, 2, sp.puzzle, sp.key, rng));
    // replay the key through decode
    QkdState st(2, BitString::parse(sp.puzzle), sp.key);
    auto second = qkd_second(local, 2, QkdMessage{BitString::parse(sp.puzzle), std::nullopt}, rng);
    REQUIRE(second.has_value());
    CHECK(qkd_decode(local, st, second->resp, rng) == second->key);
  }
  std::uint64_t acc = 0;
  const std::uint64_t trials = 100000;
  for (std::uint64_t i = 0; i < trials; ++i) acc += state_puzzle_verify(w, 2, "10", haar_state(16, rng), rng);
  CHECK(testing::wilson95(acc, trials).second <= 3.0 / 16);
  CHECK_THROWS_AS(state_puzzle_accept_probability(w, 2, "101", haar_state(16, rng)), Error);
}
