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

#ifndef QORACLE_RANDOMNESS_HPP
#define QORACLE_RANDOMNESS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qoracle/rng.hpp"

namespace qoracle {

inline constexpr unsigned kEagerTableBits = 20;

class BitFunction {
 public:
  BitFunction(unsigned domain_bits, unsigned range_bits);
  virtual ~BitFunction() = default;

  virtual std::uint64_t operator()(std::uint64_t x) const = 0;

  unsigned domain_bits() const { return domain_bits_; }
  unsigned range_bits() const { return range_bits_; }

 protected:
  void check_input(std::uint64_t x) const;

 private:
  unsigned domain_bits_;
  unsigned range_bits_;
};

// Uniformly random function {0,1}^m -> {0,1}^r. Eager table for m <= 20;
// otherwise each point is derived on first use from a keyed hash and cached.
// Copies share the table/cache, so they are the same function.
class RandomFunction final : public BitFunction {
 public:
  static RandomFunction sample(unsigned m, unsigned r, RngStream& rng);
  static RandomFunction from_table(unsigned m, unsigned r, std::vector<std::uint64_t> table);

  std::uint64_t operator()(std::uint64_t x) const override;

  bool eager() const { return table_ != nullptr; }
  const std::vector<std::uint64_t>& table() const;

  // Same function with the listed points overwritten.
  RandomFunction with_fixed(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points) const;

 private:
  struct LazyCache {
    std::mutex mu;
    std::unordered_map<std::uint64_t, std::uint64_t> values;
  };

  RandomFunction(unsigned m, unsigned r) : BitFunction(m, r) {}

  std::shared_ptr<const std::vector<std::uint64_t>> table_;
  std::uint64_t key_ = 0;
  std::shared_ptr<LazyCache> cache_;
  std::shared_ptr<const std::map<std::uint64_t, std::uint64_t>> overrides_;
};

struct BitFixingSource {
  unsigned domain_bits = 0;
  unsigned range_bits = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> fixed_points;

  nlohmann::json to_json() const;
};

RandomFunction sample_random_function(unsigned m, unsigned r, RngStream& rng);
RandomFunction sample_bit_fixing(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& fixed,
                                 unsigned m, unsigned r, RngStream& rng);
inline RandomFunction sample_bit_fixing(const BitFixingSource& src, RngStream& rng) {
  return sample_bit_fixing(src.fixed_points, src.domain_bits, src.range_bits, rng);
}

// GF(2^m) arithmetic, 1 <= m <= 16.
std::uint64_t gf2m_multiply(std::uint64_t a, std::uint64_t b, unsigned m);

// Random polynomial of degree t-1 over GF(2^m); evaluations at any t
// distinct points are jointly uniform.
class TwiseFamily {
 public:
  TwiseFamily(unsigned t, unsigned field_bits, std::vector<std::uint64_t> coefficients);

  static TwiseFamily sample(unsigned t, unsigned field_bits, RngStream& rng);
  // Coefficients are the base-2^m digits of seed_index (seed 0..2^(m t)-1).
  static TwiseFamily from_seed(unsigned t, unsigned field_bits, std::uint64_t seed_index);

  unsigned independence() const { return t_; }
  unsigned field_bits() const { return m_; }
  const std::vector<std::uint64_t>& coefficients() const { return coeffs_; }

  std::uint64_t eval(std::uint64_t x) const;

 private:
  unsigned t_;
  unsigned m_;
  std::vector<std::uint64_t> coeffs_;
};

std::uint64_t twise_eval(const TwiseFamily& fam, std::uint64_t x);

// {0,1}^m -> {0,1}^r view of a t-wise family over GF(2^m), r <= m, keeping
// the low r bits (truncation preserves t-wise independence).
class TwiseFunction final : public BitFunction {
 public:
  TwiseFunction(TwiseFamily family, unsigned range_bits);
  std::uint64_t operator()(std::uint64_t x) const override;

 private:
  TwiseFamily fam_;
};

// ---- exact function census ----

// A classical query algorithm given by its exact acceptance probability as
// a function of the oracle table. `queries` is its worst-case query count.
struct Verifier {
  std::string id;
  unsigned queries = 0;
  std::function<double(std::span<const std::uint32_t>)> acceptance;
};

class FunctionCensus {
 public:
  static FunctionCensus build(unsigned N, unsigned M, const Verifier& verifier);

  unsigned domain_size() const { return N_; }
  unsigned range_size() const { return M_; }
  const std::string& verifier_id() const { return verifier_id_; }
  unsigned verifier_queries() const { return verifier_queries_; }
  std::size_t size() const { return acc_.size(); }
  double acceptance(std::uint64_t f_index) const { return acc_.at(f_index); }
  const std::vector<double>& acceptances() const { return acc_; }
  // Table of function f_index; f(i) is base-M digit i (i = 0 most significant).
  std::vector<std::uint32_t> table(std::uint64_t f_index) const;
  std::uint64_t index_of(std::span<const std::uint32_t> table) const;
  double log2_size() const;

 private:
  unsigned N_ = 0;
  unsigned M_ = 0;
  std::string verifier_id_;
  unsigned verifier_queries_ = 0;
  std::vector<double> acc_;
};

double min_entropy_conditioned(const FunctionCensus& census, std::uint64_t f_index, double alpha);

struct BitfixCheck {
  std::string verifier_id;
  unsigned N = 0;
  unsigned M = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double threshold = 0.0;      // N log M - log(1/beta)
  double good_fraction = 0.0;  // fraction of f with H >= threshold
  double required = 0.0;       // 1 - beta/alpha
  double min_h_inf = 0.0;
  double max_h_inf = 0.0;
  bool holds = false;

  nlohmann::json to_json() const;
};

BitfixCheck check_bitfix_lemma(const FunctionCensus& census, double alpha, double beta);

std::vector<Verifier> standard_verifier_battery(unsigned N, unsigned M);

struct WitnessParams {
  double alpha = 0.1;
  unsigned max_fixed = 2;
};

struct PresamplingWitness {
  BitFixingSource source;
  double gap = 0.0;  // |acc(f) - E acc over the bit-fixing source|
  std::string search_mode;
  bool budget_exhausted = false;
  // Dense-source comparison: X' uniform over the alpha-window of f agreeing
  // with the fixed points, Y' the bit-fixing source.
  double delta = 0.0;
  double dense_gap = 0.0;
  double dense_bound = 0.0;  // T * delta * log2 M
  bool dense_bound_holds = false;

  nlohmann::json to_json() const;
};

PresamplingWitness build_presampling_witness(const FunctionCensus& census, std::uint64_t f_index,
                                             const WitnessParams& params);

}  // namespace qoracle

#endif  // QORACLE_RANDOMNESS_HPP
