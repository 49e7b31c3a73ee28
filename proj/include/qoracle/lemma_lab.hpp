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


#ifndef QORACLE_LEMMA_LAB_HPP
#define QORACLE_LEMMA_LAB_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "qoracle/numerics.hpp"
#include "qoracle/oracle_worlds.hpp"
#include "qoracle/rng.hpp"

namespace qoracle {

struct LemmaReport {
  std::string lemma;
  nlohmann::json params = nlohmann::json::object();
  double measured = 0.0;
  double error = 0.0;
  double bound = 0.0;
  std::string method;  // "exact" | "monte-carlo" | "exhaustive"
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  nlohmann::json extra = nlohmann::json::object();

  // A bound of 1 or more on a probability-like quantity says nothing.
  bool vacuous() const { return bound >= 1.0; }
  bool holds() const { return measured - 3 * error <= bound; }
  nlohmann::json to_json() const;
};

// Recomputes the verdict from the numbers in a serialized report.
bool lemma_report_holds(const nlohmann::json& report);

// ---- random orthogonal states ----

// Maximally mixed product state (I/M)^{(x)N}.
CMatrix maximally_mixed_product(unsigned N, unsigned M);
// Product over N sites of the Heisenberg-Weyl twirl of a random state. Exact;
// the group is a 1-design, so this is the Haar average.
CMatrix twirled_product_state(unsigned N, unsigned M, RngStream& rng);

struct RandomOrthoOptions {
  std::uint64_t samples = 10000;
  unsigned batches = 16;
  unsigned bootstrap = 16;
};

LemmaReport verify_randomortho(unsigned N, unsigned M, RngStream& rng, const RandomOrthoOptions& opts = {});

// ---- reflection simulation ----

// <Phi| P_sym |Phi> for the product state Phi of the given registers, via the
// permanent of their Gram matrix. At most 20 registers.
double symmetric_subspace_acceptance(std::span<const PureState> registers);

// Accepts psi with the symmetric-subspace test on phi^{(x)t} (x) psi.
class ReflectionSimulator {
 public:
  ReflectionSimulator(PureState phi, unsigned copies);
  static unsigned copies_for(double epsilon);  // ceil(1/eps)

  unsigned copies() const { return t_; }
  double accept_probability(const PureState& psi) const;
  bool run(const PureState& psi, ChoiceSource& choices) const;

 private:
  PureState phi_;
  unsigned t_;
};

struct SimrefOptions {
  std::uint64_t inputs = 1000;
  std::uint64_t shots = 10000;
};

LemmaReport verify_simref(double epsilon, std::size_t dim, RngStream& rng, const SimrefOptions& opts = {});

// ---- design moments ----

struct DesignSampler {
  std::string name;
  std::size_t dim = 0;
  std::function<Unitary(RngStream&)> sample;
};

DesignSampler haar_sampler(std::size_t dim);
// Brickwork of two-qubit gates CZ (u (x) v), u and v single-qubit Haar; even
// layers pair (0,1),(2,3)..., odd layers (1,2),(3,4).... Depth 0 is the
// identity. A single qubit gets one Haar gate per layer.
DesignSampler brickwork_sampler(unsigned qubits, unsigned depth);
Unitary brickwork_unitary(unsigned qubits, unsigned depth, RngStream& rng);

inline constexpr std::size_t kMomentDimCap = 1024;

// E[U^{(x)t} (x) conj(U)^{(x)t}] for Haar U: the projector onto the span of
// the vectorized permutation operators.
CMatrix haar_moment_operator(std::size_t dim, unsigned t);
CMatrix moment_operator(const std::vector<Unitary>& samples, unsigned t);
// Largest singular value, by power iteration on A^dagger A.
double operator_norm(const CMatrix& a);

// Reports ||M_t(sampler) - M_t(Haar)||_op against the target epsilon.
LemmaReport verify_design_moments(const DesignSampler& sampler, unsigned t, std::uint64_t samples, double epsilon,
                                  RngStream& rng);

// ---- oracle learning ----

struct LearnOptions {
  double delta = 0.3;
  unsigned T = 3;
  std::uint64_t sg_budget = 10000;  // over all learned levels
  unsigned design_depth = 8;        // brickwork depth for levels above the cutoff
};

struct LearnedLevel {
  unsigned level = 0;
  std::uint64_t sg_calls = 0;
  std::uint64_t mix_calls = 0;
  std::size_t copies_per_key = 0;
  std::vector<double> column_overlaps;  // |<phi_k|phi'_k>|^2, via introspection
  bool table_exact = false;             // f' = f on every input Mix can reveal
};

struct SimulatedWorld {
  unsigned cutoff = 0;
  KEWorld world;
  std::vector<LearnedLevel> learned;
  std::vector<unsigned> substituted;

  nlohmann::json to_json() const;
};

// Learns levels <= cutoff through SG and Mix on `real` only; levels above the
// cutoff get a brickwork unitary and a 2T-wise independent function. Throws
// resource when the SG budget runs out before every key has enough copies.
SimulatedWorld learn_small_world(KEWorld& real, unsigned cutoff, RngStream& rng, const LearnOptions& opts = {});

// SG_1 -> j; SG_2 -> (k, psi); Mix_2(k, jj) on normalize(psi + |k,00>);
// accepts iff Mix returns v with the same low bit as j.
bool three_query_tester(KEWorld& world, ChoiceSource& choices);

// ceil(log2(3456 q^2 T^4 + 2)).
unsigned simulation_cutoff(double q, double T);

// ---- birthday and union bounds ----

// Suffix collisions among T SG keys vs T^2/2^(n-1); a fixed key redrawn vs
// T/2^n; either of two transcript keys hit vs 2T/2^n.
std::vector<LemmaReport> verify_birthday_and_union_bounds(const KEWorld& world, unsigned n, unsigned T,
                                                          std::uint64_t trials, RngStream& rng);

}  // namespace qoracle

#endif  // QORACLE_LEMMA_LAB_HPP
