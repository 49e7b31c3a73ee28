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

#ifndef QORACLE_ENUMERATION_HPP
#define QORACLE_ENUMERATION_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qoracle/error.hpp"
#include "qoracle/rng.hpp"

namespace qoracle {

inline constexpr std::size_t kMaxEnumerationAtoms = std::size_t{1} << 24;

// Replays a fixed prefix of choices, then always takes the first branch and
// records the alternatives it skipped.
class TapeSource final : public ChoiceSource {
 public:
  struct Decision {
    std::uint64_t choice;
    double weight;
    std::vector<std::pair<std::uint64_t, double>> alternatives;
  };

  explicit TapeSource(std::vector<std::uint64_t> prefix) : prefix_(std::move(prefix)) {}

  std::uint64_t uniform(std::uint64_t bound) override;
  bool bernoulli(double p) override;

  double weight() const { return weight_; }
  const std::vector<Decision>& decisions() const { return decisions_; }

 private:
  std::uint64_t take(std::vector<std::pair<std::uint64_t, double>> options);

  std::vector<std::uint64_t> prefix_;
  std::vector<Decision> decisions_;
  double weight_ = 1.0;
};

struct EnumerationStats {
  std::size_t atoms = 0;
};

// Exact output distribution of a sampler written against ChoiceSource.
// The sampler must be deterministic given its choices.
template <typename Outcome>
std::map<Outcome, double> enumerate_distribution(
    const std::function<Outcome(ChoiceSource&)>& sampler,
    std::size_t max_atoms = kMaxEnumerationAtoms, EnumerationStats* stats = nullptr) {
  std::map<Outcome, double> out;
  std::vector<std::vector<std::uint64_t>> stack{{}};
  std::size_t atoms = 0;
  while (!stack.empty()) {
    std::vector<std::uint64_t> prefix = std::move(stack.back());
    stack.pop_back();
    const std::size_t fixed = prefix.size();
    TapeSource tape(std::move(prefix));
    Outcome outcome = sampler(tape);
    if (++atoms > max_atoms) {
      fail(ErrorCode::refused, "randomness space exceeds " + std::to_string(max_atoms) + " atoms");
    }
    out[outcome] += tape.weight();
    const auto& ds = tape.decisions();
    for (std::size_t i = ds.size(); i-- > fixed;) {
      for (std::size_t a = 1; a < ds[i].alternatives.size(); ++a) {
        std::vector<std::uint64_t> next;
        next.reserve(i + 1);
        for (std::size_t j = 0; j < i; ++j) next.push_back(ds[j].choice);
        next.push_back(ds[i].alternatives[a].first);
        stack.push_back(std::move(next));
      }
    }
  }
  if (stats) stats->atoms = atoms;
  return out;
}

}  // namespace qoracle

#endif  // QORACLE_ENUMERATION_HPP
