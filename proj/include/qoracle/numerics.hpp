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

#ifndef QORACLE_NUMERICS_HPP
#define QORACLE_NUMERICS_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qoracle/bitstring.hpp"
#include "qoracle/rng.hpp"

namespace qoracle {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct Tolerances {
  double state_norm = 1e-10;
  double operator_identity = 1e-9;
  double probability_snap = 1e-12;
};

const Tolerances& tolerances();

// Largest Hilbert-space dimension any dense object may have. Default 4096.
std::size_t dimension_cap();
void set_dimension_cap(std::size_t cap);
// Throws ErrorCode::resource naming the qubit count when over the cap.
void check_dimension(unsigned qubits, const char* what);

bool is_power_of_two(std::size_t x);
unsigned log2_exact(std::size_t dim);

// Qubit 0 is the most significant bit of the basis index, so
// |k, 0^m> has index k << m.
class PureState {
 public:
  explicit PureState(CVector amplitudes);

  static PureState basis(unsigned qubits, std::uint64_t index);
  // Normalizes; throws numeric if the vector is zero.
  static PureState normalized(CVector v);

  unsigned qubit_count() const { return qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }

  Complex inner(const PureState& other) const;  // <this|other>
  CMatrix density() const { return amps_ * amps_.adjoint(); }

 private:
  struct Trusted {};
  PureState(CVector amplitudes, unsigned qubits, Trusted)
      : amps_(std::move(amplitudes)), qubits_(qubits) {}
  friend PureState make_trusted_state(CVector, unsigned);

  CVector amps_;
  unsigned qubits_ = 0;
};

// No validation; for vectors already normalized by construction.
PureState make_trusted_state(CVector amplitudes, unsigned qubits);

class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix matrix);
  static DensityMatrix from_state(const PureState& s);

  unsigned qubit_count() const { return qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

 private:
  CMatrix m_;
  unsigned qubits_ = 0;
};

class Unitary {
 public:
  explicit Unitary(CMatrix matrix);

  unsigned qubit_count() const { return qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

  PureState apply(const PureState& s) const;
  Unitary adjoint() const;

 private:
  struct Trusted {};
  Unitary(CMatrix m, unsigned qubits, Trusted) : m_(std::move(m)), qubits_(qubits) {}
  friend Unitary make_trusted_unitary(CMatrix);

  CMatrix m_;
  unsigned qubits_ = 0;
};

Unitary make_trusted_unitary(CMatrix matrix);

class Projector {
 public:
  explicit Projector(CMatrix matrix);
  static Projector rank_one(const PureState& s);

  bool is_rank_one() const { return rank_one_.has_value(); }
  std::size_t dimension() const;
  CMatrix matrix() const;

  double expectation(const PureState& s) const;
  // Pi|s>, unnormalized.
  CVector apply(const CVector& v) const;

 private:
  Projector() = default;
  std::optional<PureState> rank_one_;
  CMatrix m_;
};

Unitary haar_unitary(std::size_t dim, RngStream& rng);
PureState haar_state(std::size_t dim, RngStream& rng);
// dim x columns with Haar-distributed orthonormal columns (first columns of
// a Haar unitary).
CMatrix haar_isometry(std::size_t dim, std::size_t columns, RngStream& rng);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double td_from_overlap(const PureState& phi, const PureState& psi);
double overlap_squared(const PureState& phi, const PureState& psi);
double diamond_distance_measurement(const Projector& pa, const Projector& pb);

struct MeasurementResult {
  BitString outcome;  // in the order the registers were listed
  PureState post_state;
};

MeasurementResult measure_registers(const PureState& state, const std::vector<unsigned>& registers,
                                    RngStream& rng);

struct TestResult {
  bool accepted;
  PureState post_state;
};

TestResult projective_test(const PureState& state, const Projector& p, RngStream& rng);

// Copy-count threshold ceil(8 * n_param / epsilon).
std::size_t tomography_copies_required(std::size_t n_param, double epsilon);

// Measures every copy with the uniform (Haar) POVM and returns the top
// eigenvector of the averaged snapshots.
PureState state_tomography(std::span<const PureState> copies, std::size_t n_param, double epsilon,
                           RngStream& rng);

PureState tensor(const PureState& a, const PureState& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);
DensityMatrix partial_trace(const DensityMatrix& d, const std::vector<unsigned>& keep);

}  // namespace qoracle

#endif  // QORACLE_NUMERICS_HPP
