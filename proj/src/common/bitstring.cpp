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

#include "qoracle/bitstring.hpp"

#include "qoracle/error.hpp"

namespace qoracle {

BitString::BitString(std::uint64_t value, unsigned width) : value_(value), width_(width) {
  require(width <= 63, ErrorCode::invalid_argument, "bit strings are limited to 63 bits");
  require(width == 63 || value < (std::uint64_t{1} << width), ErrorCode::invalid_argument,
          "value " + std::to_string(value) + " does not fit in " + std::to_string(width) + " bits");
}

BitString BitString::parse(std::string_view text) {
  std::uint64_t v = 0;
  for (char c : text) {
    require(c == '0' || c == '1', ErrorCode::invalid_argument,
            "not a bit string: '" + std::string(text) + "'");
    v = (v << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return BitString(v, static_cast<unsigned>(text.size()));
}

bool BitString::bit(unsigned position) const {
  require(position >= 1 && position <= width_, ErrorCode::invalid_argument, "bit position out of range");
  return (value_ >> (width_ - position)) & 1U;
}

BitString BitString::prefix(unsigned count) const {
  require(count <= width_, ErrorCode::invalid_argument, "prefix longer than string");
  return BitString(count == 0 ? 0 : value_ >> (width_ - count), count);
}

BitString BitString::suffix_from(unsigned position) const {
  require(position >= 1 && position <= width_ + 1, ErrorCode::invalid_argument,
          "suffix position out of range");
  const unsigned w = width_ - (position - 1);
  const std::uint64_t mask = w == 0 ? 0 : (w >= 64 ? ~0ULL : ((std::uint64_t{1} << w) - 1));
  return BitString(value_ & mask, w);
}

BitString BitString::concat(const BitString& tail) const {
  return BitString((value_ << tail.width_) | tail.value_, width_ + tail.width_);
}

std::string BitString::to_string() const {
  std::string s(width_, '0');
  for (unsigned i = 0; i < width_; ++i) {
    if ((value_ >> (width_ - 1 - i)) & 1U) s[i] = '1';
  }
  return s;
}

}  // namespace qoracle
