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

#ifndef QORACLE_BITSTRING_HPP
#define QORACLE_BITSTRING_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace qoracle {

// Fixed-width classical string, at most 63 bits. Bit 1 (the 1-indexed
// "first bit") is the most significant one, so numeric order is
// lexicographic order.
class BitString {
 public:
  BitString() = default;
  BitString(std::uint64_t value, unsigned width);

  static BitString parse(std::string_view text);
  static BitString zeros(unsigned width) { return BitString(0, width); }

  std::uint64_t value() const { return value_; }
  unsigned width() const { return width_; }

  // 1-based, most significant first.
  bool bit(unsigned position) const;
  BitString prefix(unsigned count) const;
  BitString suffix_from(unsigned position) const;  // bits position..width
  BitString concat(const BitString& tail) const;

  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
    if (auto c = a.width_ <=> b.width_; c != 0) return c;
    return a.value_ <=> b.value_;
  }

 private:
  std::uint64_t value_ = 0;
  unsigned width_ = 0;
};

// An n-bit party output or the distinguished failure symbol.
using KeyOutput = std::optional<BitString>;

inline std::string key_to_string(const KeyOutput& k) {
  return k ? k->to_string() : std::string("BOT");
}

}  // namespace qoracle

#endif  // QORACLE_BITSTRING_HPP
