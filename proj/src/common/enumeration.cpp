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

#include "qoracle/enumeration.hpp"

namespace qoracle {

std::uint64_t TapeSource::take(std::vector<std::pair<std::uint64_t, double>> options) {
  const std::size_t index = decisions_.size();
  std::size_t pick = 0;
  if (index < prefix_.size()) {
    pick = options.size();
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (options[i].first == prefix_[index]) pick = i;
    }
    require(pick < options.size(), ErrorCode::contract,
            "sampler is not deterministic given its choices");
  }
  Decision d{options[pick].first, options[pick].second, std::move(options)};
  weight_ *= d.weight;
  decisions_.push_back(std::move(d));
  return decisions_.back().choice;
}

std::uint64_t TapeSource::uniform(std::uint64_t bound) {
  require(bound >= 1, ErrorCode::invalid_argument, "uniform bound must be positive");
  require(bound <= kMaxEnumerationAtoms, ErrorCode::refused, "choice too wide to enumerate");
  std::vector<std::pair<std::uint64_t, double>> options;
  options.reserve(bound);
  const double w = 1.0 / static_cast<double>(bound);
  for (std::uint64_t i = 0; i < bound; ++i) options.emplace_back(i, w);
  return take(std::move(options));
}

bool TapeSource::bernoulli(double p) {
  std::vector<std::pair<std::uint64_t, double>> options;
  if (p > 0.0) options.emplace_back(1, p >= 1.0 ? 1.0 : p);
  if (p < 1.0) options.emplace_back(0, p <= 0.0 ? 1.0 : 1.0 - p);
  return take(std::move(options)) == 1;
}

}  // namespace qoracle
