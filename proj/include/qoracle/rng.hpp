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

#ifndef QORACLE_RNG_HPP
#define QORACLE_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace qoracle {

// Discrete choices made by oracles and honest parties. Keeping these behind
// an interface lets the puzzle inverter replay a sampler over every branch
// with exact weights instead of drawing.
class ChoiceSource {
 public:
  virtual ~ChoiceSource() = default;

  // Uniform in [0, bound).
  virtual std::uint64_t uniform(std::uint64_t bound) = 0;
  virtual bool bernoulli(double p) = 0;
};

// Snap Born probabilities within 1e-12 of 0 or 1.
double snap_probability(double p);

class RngStream final : public ChoiceSource {
 public:
  explicit RngStream(std::uint64_t seed, std::vector<std::uint64_t> path = {});

  RngStream child(std::uint64_t id) const;

  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

  std::uint64_t uniform(std::uint64_t bound) override;
  bool bernoulli(double p) override;

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  double normal();
  // Standard complex Gaussian, E|z|^2 = 1.
  std::complex<double> complex_normal();
  std::size_t weighted(const std::vector<double>& weights);

 private:
  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace qoracle

#endif  // QORACLE_RNG_HPP
