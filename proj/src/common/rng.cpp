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

#include "qoracle/rng.hpp"

#include <cmath>

#include "qoracle/error.hpp"

namespace qoracle {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t derive_state(std::uint64_t seed, const std::vector<std::uint64_t>& path) {
  std::uint64_t h = splitmix64(seed ^ 0x6A09E667F3BCC908ULL);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x3C6EF372FE94F82BULL));
  return h;
}

}  // namespace

double snap_probability(double p) {
  if (p < 1e-12) return 0.0;
  if (p > 1.0 - 1e-12) return 1.0;
  return p;
}

RngStream::RngStream(std::uint64_t seed, std::vector<std::uint64_t> path)
    : seed_(seed), path_(std::move(path)), engine_(derive_state(seed_, path_)) {}

RngStream RngStream::child(std::uint64_t id) const {
  std::vector<std::uint64_t> p = path_;
  p.push_back(id);
  return RngStream(seed_, std::move(p));
}

std::uint64_t RngStream::uniform(std::uint64_t bound) {
  require(bound >= 1, ErrorCode::invalid_argument, "uniform bound must be positive");
  if (bound == 1) return 0;
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = ~0ULL - (~0ULL % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

bool RngStream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01() < p;
}

double RngStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

std::complex<double> RngStream::complex_normal() {
  const double s = std::sqrt(0.5);
  const double re = normal();
  const double im = normal();
  return {re * s, im * s};
}

std::size_t RngStream::weighted(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  require(total > 0.0, ErrorCode::numeric, "all outcome weights are zero");
  double u = uniform01() * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return last;
}

}  // namespace qoracle
