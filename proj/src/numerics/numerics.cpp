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

#include "qoracle/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "qoracle/error.hpp"

namespace qoracle {

namespace {

std::atomic<std::size_t> g_dimension_cap{4096};

void require_same_dimension(std::size_t a, std::size_t b, const char* what) {
  require(a == b, ErrorCode::dimension,
          std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
              std::to_string(b) + ")");
}

// Scatters the low bits of `value` into the bit positions listed in `bits`
// (bits[0] receives the most significant bit of value).
std::size_t scatter_bits(std::size_t value, const std::vector<unsigned>& bits) {
  std::size_t out = 0;
  const std::size_t w = bits.size();
  for (std::size_t i = 0; i < w; ++i) {
    if ((value >> (w - 1 - i)) & 1U) out |= std::size_t{1} << bits[i];
  }
  return out;
}

}  // namespace

const Tolerances& tolerances() {
  static const Tolerances t{};
  return t;
}

std::size_t dimension_cap() { return g_dimension_cap.load(); }

void set_dimension_cap(std::size_t cap) {
  require(cap >= 1, ErrorCode::invalid_argument, "dimension cap must be positive");
  g_dimension_cap.store(cap);
}

void check_dimension(unsigned qubits, const char* what) {
  const std::size_t cap = dimension_cap();
  if (qubits >= 62 || (std::size_t{1} << qubits) > cap) {
    fail(ErrorCode::resource, std::string(what) + " needs " + std::to_string(qubits) +
                                  " qubits (dimension 2^" + std::to_string(qubits) +
                                  "), above the dimension cap " + std::to_string(cap) +
                                  "; set QORACLE_DIM_CAP to raise it");
  }
}

bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

unsigned log2_exact(std::size_t dim) {
  require(is_power_of_two(dim), ErrorCode::dimension,
          "dimension " + std::to_string(dim) + " is not a power of two");
  unsigned q = 0;
  while ((std::size_t{1} << q) < dim) ++q;
  return q;
}

// ---- PureState ----

PureState::PureState(CVector amplitudes) : amps_(std::move(amplitudes)) {
  qubits_ = log2_exact(static_cast<std::size_t>(amps_.size()));
  const double norm = amps_.norm();
  require(std::abs(norm - 1.0) <= tolerances().state_norm, ErrorCode::numeric,
          "state norm " + std::to_string(norm) + " is not 1");
}

PureState PureState::basis(unsigned qubits, std::uint64_t index) {
  check_dimension(qubits, "basis state");
  const std::size_t dim = std::size_t{1} << qubits;
  require(index < dim, ErrorCode::invalid_argument, "basis index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(v), qubits, Trusted{});
}

PureState PureState::normalized(CVector v) {
  const unsigned q = log2_exact(static_cast<std::size_t>(v.size()));
  const double norm = v.norm();
  require(norm > 1e-300 && std::isfinite(norm), ErrorCode::numeric, "cannot normalize a zero vector");
  v /= norm;
  return PureState(std::move(v), q, Trusted{});
}

Complex PureState::inner(const PureState& other) const {
  require_same_dimension(dimension(), other.dimension(), "inner product");
  return amps_.dot(other.amps_);  // Eigen's dot conjugates the left operand
}

PureState make_trusted_state(CVector amplitudes, unsigned qubits) {
  return PureState(std::move(amplitudes), qubits, PureState::Trusted{});
}

// ---- DensityMatrix ----

DensityMatrix::DensityMatrix(CMatrix matrix) : m_(std::move(matrix)) {
  require(m_.rows() == m_.cols(), ErrorCode::dimension, "density matrix must be square");
  qubits_ = log2_exact(static_cast<std::size_t>(m_.rows()));
  const double tol = tolerances().state_norm;
  require((m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol, ErrorCode::numeric,
          "density matrix is not Hermitian");
  require(std::abs(m_.trace().real() - 1.0) <= tol && std::abs(m_.trace().imag()) <= tol,
          ErrorCode::numeric, "density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -tol, ErrorCode::numeric,
          "density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::from_state(const PureState& s) { return DensityMatrix(s.density()); }

// ---- Unitary ----

Unitary::Unitary(CMatrix matrix) : m_(std::move(matrix)) {
  require(m_.rows() == m_.cols(), ErrorCode::dimension, "unitary must be square");
  qubits_ = log2_exact(static_cast<std::size_t>(m_.rows()));
  const CMatrix id = CMatrix::Identity(m_.rows(), m_.cols());
  require((m_ * m_.adjoint() - id).cwiseAbs().maxCoeff() <= tolerances().operator_identity,
          ErrorCode::numeric, "matrix is not unitary");
}

PureState Unitary::apply(const PureState& s) const {
  require_same_dimension(dimension(), s.dimension(), "unitary application");
  return PureState::normalized(m_ * s.amplitudes());
}

Unitary Unitary::adjoint() const { return Unitary(m_.adjoint(), qubits_, Trusted{}); }

Unitary make_trusted_unitary(CMatrix matrix) {
  const unsigned q = log2_exact(static_cast<std::size_t>(matrix.rows()));
  return Unitary(std::move(matrix), q, Unitary::Trusted{});
}

// ---- Projector ----

Projector::Projector(CMatrix matrix) : m_(std::move(matrix)) {
  require(m_.rows() == m_.cols(), ErrorCode::dimension, "projector must be square");
  log2_exact(static_cast<std::size_t>(m_.rows()));
  const double tol = tolerances().operator_identity;
  require((m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol, ErrorCode::numeric,
          "projector is not Hermitian");
  require((m_ * m_ - m_).cwiseAbs().maxCoeff() <= tol, ErrorCode::numeric,
          "projector is not idempotent");
}

Projector Projector::rank_one(const PureState& s) {
  Projector p;
  p.rank_one_ = s;
  return p;
}

std::size_t Projector::dimension() const {
  return rank_one_ ? rank_one_->dimension() : static_cast<std::size_t>(m_.rows());
}

CMatrix Projector::matrix() const { return rank_one_ ? rank_one_->density() : m_; }

double Projector::expectation(const PureState& s) const {
  require_same_dimension(dimension(), s.dimension(), "projector expectation");
  if (rank_one_) return std::norm(rank_one_->inner(s));
  return (s.amplitudes().adjoint() * m_ * s.amplitudes())(0, 0).real();
}

CVector Projector::apply(const CVector& v) const {
  require_same_dimension(dimension(), static_cast<std::size_t>(v.size()), "projector application");
  if (rank_one_) return rank_one_->amplitudes() * rank_one_->amplitudes().dot(v);
  return m_ * v;
}

// ---- Haar sampling ----

CMatrix haar_isometry(std::size_t dim, std::size_t columns, RngStream& rng) {
  require(dim >= 1 && columns >= 1 && columns <= dim, ErrorCode::invalid_argument,
          "isometry needs 1 <= columns <= dim");
  require(is_power_of_two(dim), ErrorCode::dimension, "Haar dimension must be a power of two");
  check_dimension(log2_exact(dim), "Haar sample");
  const auto d = static_cast<Eigen::Index>(dim);
  const auto c = static_cast<Eigen::Index>(columns);
  CMatrix g(d, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = CMatrix::Identity(d, c);
  q.applyOnTheLeft(qr.householderQ());
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < c; ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(j) *= diag / mag;
  }
  return q;
}

Unitary haar_unitary(std::size_t dim, RngStream& rng) {
  return make_trusted_unitary(haar_isometry(dim, dim, rng));
}

PureState haar_state(std::size_t dim, RngStream& rng) {
  require(dim >= 1 && is_power_of_two(dim), ErrorCode::dimension,
          "Haar state dimension must be a power of two");
  check_dimension(log2_exact(dim), "Haar state");
  CVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  return PureState::normalized(std::move(v));
}

// ---- distances ----

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dimension(a.dimension(), b.dimension(), "trace distance");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double overlap_squared(const PureState& phi, const PureState& psi) {
  return std::norm(phi.inner(psi));
}

double td_from_overlap(const PureState& phi, const PureState& psi) {
  return std::sqrt(std::max(0.0, 1.0 - overlap_squared(phi, psi)));
}

double diamond_distance_measurement(const Projector& pa, const Projector& pb) {
  require_same_dimension(pa.dimension(), pb.dimension(), "diamond distance");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(pa.matrix() - pb.matrix(), Eigen::EigenvaluesOnly);
  return 2.0 * es.eigenvalues().cwiseAbs().maxCoeff();
}

// ---- measurement ----

MeasurementResult measure_registers(const PureState& state, const std::vector<unsigned>& registers,
                                    RngStream& rng) {
  const unsigned q = state.qubit_count();
  std::vector<bool> seen(q, false);
  for (unsigned r : registers) {
    require(r < q, ErrorCode::dimension, "register index " + std::to_string(r) + " out of range");
    require(!seen[r], ErrorCode::dimension, "register indices must be disjoint");
    seen[r] = true;
  }
  require(registers.size() <= 20, ErrorCode::resource, "too many measured qubits");
  // bit position of qubit r in the basis index
  std::vector<unsigned> pos;
  for (unsigned r : registers) pos.push_back(q - 1 - r);

  const auto& a = state.amplitudes();
  const std::size_t outcomes = std::size_t{1} << registers.size();
  auto outcome_of = [&](std::size_t idx) {
    std::size_t o = 0;
    for (unsigned p : pos) o = (o << 1) | ((idx >> p) & 1U);
    return o;
  };
  std::vector<double> probs(outcomes, 0.0);
  for (Eigen::Index i = 0; i < a.size(); ++i) probs[outcome_of(static_cast<std::size_t>(i))] += std::norm(a(i));
  const std::size_t pick = rng.weighted(probs);
  require(probs[pick] > 1e-300, ErrorCode::numeric, "measurement outcome probability underflow");

  CVector post = CVector::Zero(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (outcome_of(static_cast<std::size_t>(i)) == pick) post(i) = a(i);
  }
  return {BitString(pick, static_cast<unsigned>(registers.size())), PureState::normalized(std::move(post))};
}

TestResult projective_test(const PureState& state, const Projector& p, RngStream& rng) {
  const double prob = snap_probability(p.expectation(state));
  const bool accepted = rng.bernoulli(prob);
  CVector proj = p.apply(state.amplitudes());
  CVector post = accepted ? proj : CVector(state.amplitudes() - proj);
  return {accepted, PureState::normalized(std::move(post))};
}

// ---- tomography ----

std::size_t tomography_copies_required(std::size_t n_param, double epsilon) {
  require(epsilon > 0.0 && epsilon <= 1.0, ErrorCode::invalid_argument, "epsilon must be in (0,1]");
  require(n_param >= 1, ErrorCode::invalid_argument, "n_param must be positive");
  return static_cast<std::size_t>(std::ceil(8.0 * static_cast<double>(n_param) / epsilon - 1e-9));
}

PureState state_tomography(std::span<const PureState> copies, std::size_t n_param, double epsilon,
                           RngStream& rng) {
  const std::size_t need = tomography_copies_required(n_param, epsilon);
  require(copies.size() >= need, ErrorCode::contract,
          "tomography needs " + std::to_string(need) + " copies, got " + std::to_string(copies.size()));
  const std::size_t dim = copies.front().dimension();
  const auto d = static_cast<Eigen::Index>(dim);
  CMatrix acc = CMatrix::Zero(d, d);
  for (const PureState& copy : copies) {
    require_same_dimension(dim, copy.dimension(), "tomography copies");
    // Outcome density of the uniform POVM is proportional to |<v|copy>|^2
    // against Haar measure, so rejection-sample Haar vectors.
    for (;;) {
      PureState v = haar_state(dim, rng);
      if (rng.uniform01() < overlap_squared(v, copy)) {
        acc.noalias() += v.amplitudes() * v.amplitudes().adjoint();
        break;
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(acc);
  return PureState::normalized(es.eigenvectors().col(d - 1));
}

// ---- composition ----

PureState tensor(const PureState& a, const PureState& b) {
  const unsigned q = a.qubit_count() + b.qubit_count();
  check_dimension(q, "tensor product");
  const auto da = a.amplitudes().size();
  const auto db = b.amplitudes().size();
  CVector v(da * db);
  for (Eigen::Index i = 0; i < da; ++i) v.segment(i * db, db) = a.amplitudes()(i) * b.amplitudes();
  return make_trusted_state(std::move(v), q);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& d, const std::vector<unsigned>& keep) {
  const unsigned q = d.qubit_count();
  std::vector<bool> kept(q, false);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    require(keep[i] < q, ErrorCode::dimension, "kept register out of range");
    require(i == 0 || keep[i] > keep[i - 1], ErrorCode::dimension,
            "kept registers must be strictly increasing");
    kept[keep[i]] = true;
  }
  std::vector<unsigned> keep_pos, trace_pos;
  for (unsigned r = 0; r < q; ++r) (kept[r] ? keep_pos : trace_pos).push_back(q - 1 - r);
  const std::size_t dk = std::size_t{1} << keep_pos.size();
  const std::size_t dt = std::size_t{1} << trace_pos.size();
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  const CMatrix& m = d.matrix();
  for (std::size_t i = 0; i < dk; ++i) {
    const std::size_t bi = scatter_bits(i, keep_pos);
    for (std::size_t j = 0; j < dk; ++j) {
      const std::size_t bj = scatter_bits(j, keep_pos);
      Complex s = 0.0;
      for (std::size_t t = 0; t < dt; ++t) {
        const std::size_t bt = scatter_bits(t, trace_pos);
        s += m(static_cast<Eigen::Index>(bi | bt), static_cast<Eigen::Index>(bj | bt));
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
    }
  }
  return DensityMatrix(std::move(out));
}

}  // namespace qoracle
