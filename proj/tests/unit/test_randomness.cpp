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
#include <set>

#include "doctest.h"
#include "qoracle/error.hpp"
#include "qoracle/randomness.hpp"

using namespace qoracle;

TEST_CASE("random function uniformity and determinism") {
  int ones0 = 0, ones1 = 0;
  for (int i = 0; i < 10000; ++i) {
    RngStream rng(100, {static_cast<std::uint64_t>(i)});
    auto f = sample_random_function(1, 1, rng);
    ones0 += static_cast<int>(f(0));
    ones1 += static_cast<int>(f(1));
    CHECK(f(0) == f(0));
  }
  CHECK(std::abs(ones0 / 10000.0 - 0.5) < 0.02);
  CHECK(std::abs(ones1 / 10000.0 - 0.5) < 0.02);

  int differ = 0;
  for (int i = 0; i < 2000; ++i) {
    RngStream a(7, {1, static_cast<std::uint64_t>(i)}), b(7, {2, static_cast<std::uint64_t>(i)});
    auto f = sample_random_function(4, 1, a);
    auto g = sample_random_function(4, 1, b);
    bool d = false;
    for (std::uint64_t x = 0; x < 16; ++x) d |= f(x) != g(x);
    differ += d;
  }
  CHECK(differ >= 1995);  // 1 - 2^-16 each
  RngStream r(3);
  auto f = sample_random_function(2, 3, r);
  CHECK_THROWS_AS(f(4), Error);
}

TEST_CASE("lazy random functions are consistent across copies") {
  RngStream rng(5);
  auto f = sample_random_function(30, 8, rng);
  CHECK_FALSE(f.eager());
  const auto g = f;
  for (std::uint64_t x : {0ULL, 12345ULL, (1ULL << 30) - 1}) {
    CHECK(f(x) == g(x));
    CHECK(f(x) < 256);
  }
  auto h = f.with_fixed({{7, 200}});
  CHECK(h(7) == 200);
  CHECK(h(8) == f(8));
}

TEST_CASE("bit fixing sources") {
  // fix f(0)=1: f(0) always 1, f(1) uniform
  int ones = 0;
  for (int i = 0; i < 4000; ++i) {
    RngStream rng(9, {static_cast<std::uint64_t>(i)});
    auto f = sample_bit_fixing({{0, 1}}, 1, 1, rng);
    CHECK(f(0) == 1);
    ones += static_cast<int>(f(1));
  }
  CHECK(std::abs(ones / 4000.0 - 0.5) < 0.03);

  RngStream rng(1);
  CHECK_THROWS_AS(sample_bit_fixing({{0, 1}, {0, 0}}, 1, 1, rng), Error);
  CHECK_NOTHROW(sample_bit_fixing({{0, 1}, {0, 1}}, 1, 1, rng));

  // empty fixed set is the uniform sampler on identical seeds
  for (int i = 0; i < 64; ++i) {
    RngStream a(11, {static_cast<std::uint64_t>(i)}), b(11, {static_cast<std::uint64_t>(i)});
    CHECK(sample_bit_fixing({}, 1, 1, a).table() == sample_random_function(1, 1, b).table());
  }

  // T uniform queries hit one of k fixed points at rate <= T k / 2^m
  const unsigned m = 6, T = 3;
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> fixed{{1, 0}, {5, 1}, {9, 0}, {33, 1}};
  std::set<std::uint64_t> fixed_inputs;
  for (auto& p : fixed) fixed_inputs.insert(p.first);
  RngStream q(12);
  int hits = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    bool hit = false;
    for (unsigned j = 0; j < T; ++j) hit |= fixed_inputs.count(q.uniform(1ULL << m)) > 0;
    hits += hit;
  }
  const double rate = hits / double(trials);
  const double bound = double(T) * fixed.size() / (1 << m);
  CHECK(rate <= bound + 3 * std::sqrt(rate * (1 - rate) / trials));
}

TEST_CASE("GF(2^m) multiplication forms a field") {
  for (unsigned m = 1; m <= 10; ++m) {
    const std::uint64_t q = 1ULL << m;
    for (std::uint64_t a = 1; a < q; ++a) {
      int inverses = 0;
      for (std::uint64_t b = 1; b < q; ++b) inverses += gf2m_multiply(a, b, m) == 1;
      CHECK(inverses == 1);
    }
  }
  // spot-check associativity and distributivity at the wider widths
  RngStream rng(13);
  for (unsigned m = 11; m <= 16; ++m) {
    for (int i = 0; i < 200; ++i) {
      std::uint64_t a = rng.uniform(1ULL << m), b = rng.uniform(1ULL << m), c = rng.uniform(1ULL << m);
      CHECK(gf2m_multiply(gf2m_multiply(a, b, m), c, m) == gf2m_multiply(a, gf2m_multiply(b, c, m), m));
      CHECK(gf2m_multiply(a, b ^ c, m) == (gf2m_multiply(a, b, m) ^ gf2m_multiply(a, c, m)));
    }
  }
}

namespace {

// Exhaustive t-wise check: for every t distinct points, every value tuple
// occurs the same number of times across all seeds.
bool twise_exact(unsigned t, unsigned m) {
  const std::uint64_t q = 1ULL << m;
  const std::uint64_t seeds = 1ULL << (m * t);
  std::vector<std::uint64_t> pts(t);
  bool ok = true;
  std::function<void(unsigned, std::uint64_t)> rec = [&](unsigned depth, std::uint64_t start) {
    if (depth == t) {
      std::map<std::vector<std::uint64_t>, std::uint64_t> counts;
      for (std::uint64_t s = 0; s < seeds; ++s) {
        auto fam = TwiseFamily::from_seed(t, m, s);
        std::vector<std::uint64_t> vals;
        for (auto x : pts) vals.push_back(twise_eval(fam, x));
        counts[vals]++;
      }
      std::uint64_t tuples = 1;
      for (unsigned i = 0; i < t; ++i) tuples *= q;
      ok &= counts.size() == tuples;
      for (auto& [k, c] : counts) ok &= c == seeds / tuples;
      return;
    }
    for (std::uint64_t x = start; x < q; ++x) {
      pts[depth] = x;
      rec(depth + 1, x + 1);
    }
  };
  rec(0, 0);
  return ok;
}

}  // namespace

TEST_CASE("t-wise families") {
  auto c = TwiseFamily::from_seed(1, 3, 5);
  for (std::uint64_t x = 0; x < 8; ++x) CHECK(twise_eval(c, x) == 5);
  CHECK(twise_exact(2, 2));
  CHECK(twise_exact(2, 3));
  CHECK(twise_exact(3, 2));
  RngStream rng(3);
  auto fam = TwiseFamily::sample(4, 8, rng);
  CHECK(twise_eval(fam, 17) == twise_eval(fam, 17));
  TwiseFunction g(fam, 3);
  CHECK(g(200) < 8);
}

TEST_CASE("min entropy conditioned examples") {
  Verifier ignore{"ignore", 0, [](std::span<const std::uint32_t>) { return 0.3; }};
  auto c0 = FunctionCensus::build(2, 2, ignore);
  CHECK(c0.size() == 4);
  CHECK(min_entropy_conditioned(c0, 0, 0.0) == doctest::Approx(2.0));

  Verifier first{"first", 1, [](std::span<const std::uint32_t> f) { return double(f[0]); }};
  auto c1 = FunctionCensus::build(2, 2, first);
  for (std::uint64_t i = 0; i < 4; ++i) {
    CHECK(min_entropy_conditioned(c1, i, 0.5) == doctest::Approx(1.0));
    CHECK(min_entropy_conditioned(c1, i, 0.999) == doctest::Approx(1.0));
  }
  CHECK(c1.table(2) == std::vector<std::uint32_t>{1, 0});
  std::vector<std::uint32_t> t{1, 0};
  CHECK(c1.index_of(t) == 2);
  Verifier big{"big", 0, [](std::span<const std::uint32_t>) { return 0.0; }};
  CHECK_THROWS_AS(FunctionCensus::build(25, 2, big), Error);
}

TEST_CASE("bitfix lemma holds as an exact count over the battery") {
  const double alphas[] = {0.1, 0.25, 0.5};
  const double betas[] = {0.01, 0.05, 0.2};
  for (auto [N, M] : {std::pair{4U, 2U}, std::pair{2U, 4U}, std::pair{3U, 3U}}) {
    for (const auto& v : standard_verifier_battery(N, M)) {
      auto census = FunctionCensus::build(N, M, v);
      // class weights sum to one: every function lands in exactly one
      // value class
      std::map<double, std::size_t> classes;
      for (double a : census.acceptances()) classes[a]++;
      std::size_t total = 0;
      for (auto& [a, n] : classes) total += n;
      CHECK(total == census.size());
      for (double a : alphas) {
        for (double b : betas) {
          auto r = check_bitfix_lemma(census, a, b);
          INFO(v.id << " N=" << N << " M=" << M << " alpha=" << a << " beta=" << b);
          CHECK(r.holds);
        }
      }
    }
  }
}

TEST_CASE("presampling witness") {
  Verifier ignore{"ignore", 0, [](std::span<const std::uint32_t>) { return 0.5; }};
  auto c0 = FunctionCensus::build(4, 2, ignore);
  auto w0 = build_presampling_witness(c0, 5, {0.1, 2});
  CHECK(w0.source.fixed_points.empty());
  CHECK(w0.gap == 0.0);

  Verifier read0{"read0", 1, [](std::span<const std::uint32_t> f) { return double(f[0]); }};
  auto c1 = FunctionCensus::build(4, 2, read0);
  std::vector<std::uint32_t> f{1, 0, 1, 1};
  auto w1 = build_presampling_witness(c1, c1.index_of(f), {0.1, 2});
  REQUIRE(w1.source.fixed_points.size() == 1);
  CHECK(w1.source.fixed_points[0] == std::pair<std::uint64_t, std::uint64_t>{0, 1});
  CHECK(w1.gap == 0.0);
  CHECK(w1.search_mode == "exhaustive");

  // two-query distinguishers at N=4, M=2 over every f
  for (const auto& v : standard_verifier_battery(4, 2)) {
    if (v.queries != 2) continue;
    auto c = FunctionCensus::build(4, 2, v);
    for (std::uint64_t i = 0; i < c.size(); ++i) {
      for (double alpha : {0.0, 0.25, 0.5}) {
        auto w = build_presampling_witness(c, i, {alpha, 2});
        INFO(v.id << " f=" << i << " alpha=" << alpha);
        CHECK(w.dense_bound_holds);
        CHECK(w.gap <= alpha + w.dense_bound + 1e-12);
      }
    }
  }
  auto wg = build_presampling_witness(c1, 3, {0.1, 3});
  CHECK(wg.search_mode == "exhaustive<=2+greedy");
}
