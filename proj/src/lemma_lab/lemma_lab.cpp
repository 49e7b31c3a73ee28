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


#include "qoracle/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qoracle/error.hpp"
#include "qoracle/randomness.hpp"

namespace qoracle {

namespace {

std::uint64_t pow2(unsigned k) { return std::uint64_t{1} << k; }

std::size_t ipow(std::size_t b, unsigned e) {
  std::size_t r = 1;
  for (unsigned i = 0; i < e; ++i) r *= b;
  return r;
}

// Eigenvalues of rho - I/D summed in absolute value, halved.
double td_to_maximally_mixed(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
  const double inv = 1.0 / static_cast<double>(rho.rows());
  return 0.5 * (es.eigenvalues().array() - inv).abs().sum();
}

CVector kron_vec(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

double binomial_error(double p, std::uint64_t n) {
  return std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(n));
}

}  // namespace

nlohmann::json LemmaReport::to_json() const {
  return {{"lemma", lemma},   {"params", params},   {"measured", measured}, {"error", error},
          {"bound", bound},   {"method", method},   {"samples", samples},   {"seed", seed},
          {"extra", extra},   {"vacuous", vacuous()}, {"holds", holds()}};
}

bool lemma_report_holds(const nlohmann::json& r) {
  return r.at("measured").get<double>() - 3 * r.at("error").get<double>() <= r.at("bound").get<double>();
}

// ---- random orthogonal states ----

CMatrix maximally_mixed_product(unsigned N, unsigned M) {
  const auto d = static_cast<Eigen::Index>(ipow(M, N));
  return CMatrix::Identity(d, d) / static_cast<double>(d);
}

namespace {

// (1/M^2) sum_{a,b} X^a Z^b |phi><phi| Z^-b X^-a
CMatrix heisenberg_weyl_twirl(const CVector& phi) {
  const auto M = phi.size();
  CMatrix out = CMatrix::Zero(M, M);
  const double pi2 = 2.0 * std::acos(-1.0);
  for (Eigen::Index b = 0; b < M; ++b) {
    CVector z(M);
    for (Eigen::Index j = 0; j < M; ++j) z(j) = std::polar(1.0, pi2 * static_cast<double>(b * j % M) / M) * phi(j);
    for (Eigen::Index a = 0; a < M; ++a) {
      CVector w(M);
      for (Eigen::Index j = 0; j < M; ++j) w((j + a) % M) = z(j);
      out += w * w.adjoint();
    }
  }
  return out / static_cast<double>(M * M);
}

}  // namespace

CMatrix twirled_product_state(unsigned N, unsigned M, RngStream& rng) {
  CMatrix rho = CMatrix::Ones(1, 1);
  for (unsigned k = 0; k < N; ++k) rho = kron(rho, heisenberg_weyl_twirl(haar_state(M, rng).amplitudes()));
  return rho;
}

LemmaReport verify_randomortho(unsigned N, unsigned M, RngStream& rng, const RandomOrthoOptions& opts) {
  require(N >= 1 && N <= M, ErrorCode::invalid_argument, "need 1 <= N <= M");
  require(is_power_of_two(M), ErrorCode::invalid_argument, "M must be a power of two");
  const unsigned q = N * log2_exact(M);
  require(q <= 12, ErrorCode::dimension,
          "M^N = 2^" + std::to_string(q) + " exceeds the 2^12 limit for this check");
  check_dimension(q, "random-ortho density matrix");
  require(opts.samples >= opts.batches && opts.batches >= 2, ErrorCode::invalid_argument,
          "need at least two batches and one sample per batch");

  LemmaReport r;
  r.lemma = "randomortho";
  r.params = {{"N", N}, {"M", M}, {"samples", opts.samples}, {"batches", opts.batches}, {"bootstrap", opts.bootstrap}};
  r.bound = static_cast<double>(N) * (N + 1) / (2.0 * M);
  r.seed = rng.seed();

  // exact arm: the product of Haar averages, by twirling
  const CMatrix mm = maximally_mixed_product(N, M);
  const double exact_err = (twirled_product_state(N, M, rng) - mm).cwiseAbs().maxCoeff();
  r.extra["exact_arm_max_entry_error"] = exact_err;
  r.extra["exact_arm_holds"] = exact_err <= 1e-12;

  if (N == 1) {
    // one column of a Haar unitary is a Haar state, so rho' = rho exactly
    r.measured = 0.0;
    r.method = "exact";
    return r;
  }

  const auto D = static_cast<Eigen::Index>(ipow(M, N));
  const std::uint64_t per_batch = opts.samples / opts.batches;
  std::vector<CMatrix> batch_sums;
  CMatrix total = CMatrix::Zero(D, D);
  CMatrix vecs(D, static_cast<Eigen::Index>(per_batch));
  for (unsigned b = 0; b < opts.batches; ++b) {
    for (std::uint64_t s = 0; s < per_batch; ++s) {
      const CMatrix cols = haar_isometry(M, N, rng);
      CVector v = cols.col(0);
      for (unsigned k = 1; k < N; ++k) v = kron_vec(v, cols.col(k));
      vecs.col(static_cast<Eigen::Index>(s)) = v;
    }
    CMatrix sum = CMatrix::Zero(D, D);
    sum.selfadjointView<Eigen::Lower>().rankUpdate(vecs);
    sum = sum.selfadjointView<Eigen::Lower>();
    total += sum;
    batch_sums.push_back(std::move(sum));
  }
  const double used = static_cast<double>(per_batch * opts.batches);
  r.samples = per_batch * opts.batches;
  r.measured = td_to_maximally_mixed(total / used);
  r.method = "monte-carlo";

  // batch bootstrap for the error bar
  std::vector<double> reps;
  for (unsigned rep = 0; rep < opts.bootstrap; ++rep) {
    CMatrix s = CMatrix::Zero(D, D);
    for (unsigned b = 0; b < opts.batches; ++b) s += batch_sums[rng.uniform(opts.batches)];
    reps.push_back(td_to_maximally_mixed(s / used));
  }
  if (reps.size() >= 2) {
    const double mean = std::accumulate(reps.begin(), reps.end(), 0.0) / static_cast<double>(reps.size());
    double var = 0.0;
    for (double x : reps) var += (x - mean) * (x - mean);
    r.error = std::sqrt(var / static_cast<double>(reps.size() - 1));
  }
  return r;
}

// ---- reflection simulation ----

double symmetric_subspace_acceptance(std::span<const PureState> regs) {
  const std::size_t n = regs.size();
  require(n >= 1 && n <= 20, ErrorCode::resource, "symmetric test limited to 20 registers");
  for (const auto& s : regs) {
    require(s.dimension() == regs[0].dimension(), ErrorCode::dimension, "registers differ in dimension");
  }
  std::vector<Complex> g(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i * n + j] = regs[i].inner(regs[j]);
  // Ryser with Gray-code subset order
  std::vector<Complex> row_sums(n, 0.0);
  Complex perm = 0.0;
  std::uint64_t gray = 0;
  for (std::uint64_t k = 1; k < (std::uint64_t{1} << n); ++k) {
    const std::uint64_t next = k ^ (k >> 1);
    const std::uint64_t flip = next ^ gray;
    const auto col = static_cast<std::size_t>(std::countr_zero(flip));
    const double sign = (next & flip) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i) row_sums[i] += sign * g[i * n + col];
    gray = next;
    Complex prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) prod *= row_sums[i];
    const int bits = std::popcount(gray);
    perm += ((static_cast<int>(n) - bits) % 2 == 0 ? 1.0 : -1.0) * prod;
  }
  double fact = 1.0;
  for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<double>(i);
  return snap_probability(perm.real() / fact);
}

ReflectionSimulator::ReflectionSimulator(PureState phi, unsigned copies) : phi_(std::move(phi)), t_(copies) {
  require(t_ >= 1 && t_ <= 19, ErrorCode::resource, "simulator supports 1..19 copies");
}

unsigned ReflectionSimulator::copies_for(double epsilon) {
  require(epsilon > 0.0 && epsilon <= 1.0, ErrorCode::invalid_argument, "epsilon must lie in (0, 1]");
  return static_cast<unsigned>(std::ceil(1.0 / epsilon - 1e-12));
}

double ReflectionSimulator::accept_probability(const PureState& psi) const {
  require(psi.dimension() == phi_.dimension(), ErrorCode::dimension, "input has the wrong dimension");
  std::vector<PureState> regs(t_, phi_);
  regs.push_back(psi);
  return symmetric_subspace_acceptance(regs);
}

bool ReflectionSimulator::run(const PureState& psi, ChoiceSource& choices) const {
  return choices.bernoulli(accept_probability(psi));
}

LemmaReport verify_simref(double epsilon, std::size_t dim, RngStream& rng, const SimrefOptions& opts) {
  require(dim >= 2 && dim <= 64 && is_power_of_two(dim), ErrorCode::invalid_argument,
          "simref needs a power-of-two dimension in 2..64");
  const unsigned t = ReflectionSimulator::copies_for(epsilon);
  LemmaReport r;
  r.lemma = "simref";
  r.params = {{"epsilon", epsilon}, {"dim", dim}, {"copies", t}, {"inputs", opts.inputs}, {"shots", opts.shots}};
  r.bound = epsilon;
  r.seed = rng.seed();
  r.method = "exact";
  r.samples = opts.inputs;

  const PureState phi = haar_state(dim, rng);
  const ReflectionSimulator sim(phi, t);
  // orthogonal input: Gram-Schmidt a random vector against phi
  CVector o = haar_state(dim, rng).amplitudes();
  o -= phi.amplitudes() * phi.amplitudes().dot(o);
  const PureState orth = PureState::normalized(o);

  double worst = 0.0;
  auto consider = [&](const PureState& psi) {
    worst = std::max(worst, std::abs(sim.accept_probability(psi) - overlap_squared(phi, psi)));
  };
  consider(phi);
  consider(orth);
  for (std::uint64_t i = 2; i < opts.inputs; ++i) consider(haar_state(dim, rng));
  r.measured = worst;

  if (opts.shots > 0) {
    std::uint64_t self = 0, other = 0;
    for (std::uint64_t s = 0; s < opts.shots; ++s) {
      self += sim.run(phi, rng);
      other += sim.run(orth, rng);
    }
    const double fs = static_cast<double>(self) / static_cast<double>(opts.shots);
    const double fo = static_cast<double>(other) / static_cast<double>(opts.shots);
    r.extra["self_accept_frequency"] = fs;
    r.extra["self_sigma"] = binomial_error(fs, opts.shots);
    r.extra["orthogonal_accept_frequency"] = fo;
    r.extra["orthogonal_sigma"] = binomial_error(fo, opts.shots);
  }
  return r;
}

// ---- design moments ----

DesignSampler haar_sampler(std::size_t dim) {
  return {"haar", dim, [dim](RngStream& rng) { return haar_unitary(dim, rng); }};
}

Unitary brickwork_unitary(unsigned qubits, unsigned depth, RngStream& rng) {
  require(qubits >= 1, ErrorCode::invalid_argument, "brickwork needs at least one qubit");
  check_dimension(qubits, "brickwork circuit");
  const auto dim = static_cast<Eigen::Index>(pow2(qubits));
  CMatrix u = CMatrix::Identity(dim, dim);
  CMatrix cz = CMatrix::Identity(4, 4);
  cz(3, 3) = -1.0;
  auto embed = [&](const CMatrix& gate, unsigned first, unsigned width) {
    // gate on qubits first..first+width-1 (qubit 0 most significant)
    CMatrix full = CMatrix::Ones(1, 1);
    if (first > 0) full = CMatrix::Identity(static_cast<Eigen::Index>(pow2(first)), static_cast<Eigen::Index>(pow2(first)));
    full = kron(full, gate);
    const unsigned rest = qubits - first - width;
    if (rest > 0) full = kron(full, CMatrix::Identity(static_cast<Eigen::Index>(pow2(rest)), static_cast<Eigen::Index>(pow2(rest))));
    return full;
  };
  for (unsigned layer = 0; layer < depth; ++layer) {
    if (qubits == 1) {
      u = haar_unitary(2, rng).matrix() * u;
      continue;
    }
    for (unsigned a = layer % 2; a + 1 < qubits; a += 2) {
      const CMatrix g = cz * kron(haar_unitary(2, rng).matrix(), haar_unitary(2, rng).matrix());
      u = embed(g, a, 2) * u;
    }
  }
  return make_trusted_unitary(std::move(u));
}

DesignSampler brickwork_sampler(unsigned qubits, unsigned depth) {
  return {"brickwork-d" + std::to_string(depth), static_cast<std::size_t>(pow2(qubits)),
          [qubits, depth](RngStream& rng) { return brickwork_unitary(qubits, depth, rng); }};
}

namespace {

void check_moment_size(std::size_t dim, unsigned t) {
  require(t >= 1 && t <= 3 && dim >= 2 && dim <= 16, ErrorCode::invalid_argument, "moments need t <= 3, dim <= 16");
  const std::size_t D = ipow(dim, 2 * t);
  require(D <= kMomentDimCap, ErrorCode::resource,
          "moment operator of dimension " + std::to_string(D) + " exceeds the cap " + std::to_string(kMomentDimCap) +
              " (dim^(2t))");
}

CMatrix tensor_power(const CMatrix& u, unsigned t) {
  CMatrix out = u;
  for (unsigned k = 1; k < t; ++k) out = kron(out, u);
  return out;
}

}  // namespace

CMatrix haar_moment_operator(std::size_t dim, unsigned t) {
  check_moment_size(dim, t);
  const std::size_t dt = ipow(dim, t);
  std::vector<unsigned> perm(t);
  std::iota(perm.begin(), perm.end(), 0U);
  std::vector<CVector> basis;
  do {
    // vec(P_pi) with entry (i, j) = prod_k [i_k == j_perm[k]]
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dt * dt));
    for (std::size_t j = 0; j < dt; ++j) {
      std::vector<std::size_t> digits(t);
      std::size_t rest = j;
      for (unsigned k = t; k-- > 0;) {
        digits[k] = rest % dim;
        rest /= dim;
      }
      std::size_t i = 0;
      for (unsigned k = 0; k < t; ++k) i = i * dim + digits[perm[k]];
      v(static_cast<Eigen::Index>(i * dt + j)) = 1.0;
    }
    for (const auto& b : basis) v -= b * b.dot(v);
    for (const auto& b : basis) v -= b * b.dot(v);
    if (v.norm() > 1e-9) basis.push_back(v / v.norm());
  } while (std::next_permutation(perm.begin(), perm.end()));
  const auto D = static_cast<Eigen::Index>(dt * dt);
  CMatrix p = CMatrix::Zero(D, D);
  for (const auto& b : basis) p += b * b.adjoint();
  return p;
}

CMatrix moment_operator(const std::vector<Unitary>& samples, unsigned t) {
  require(!samples.empty(), ErrorCode::invalid_argument, "no samples");
  const std::size_t dim = samples.front().dimension();
  check_moment_size(dim, t);
  const auto D = static_cast<Eigen::Index>(ipow(dim, 2 * t));
  CMatrix acc = CMatrix::Zero(D, D);
  for (const auto& u : samples) {
    require(u.dimension() == dim, ErrorCode::dimension, "samples differ in dimension");
    const CMatrix up = tensor_power(u.matrix(), t);
    acc += kron(up, up.conjugate());
  }
  return acc / static_cast<double>(samples.size());
}

double operator_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  RngStream start(0x6f706e6f726dULL);
  CVector x(a.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = start.complex_normal();
  x.normalize();
  double value = 0.0;
  for (int it = 0; it < 2000; ++it) {
    CVector y = a.adjoint() * (a * x);
    const double n = y.norm();
    if (n == 0.0) return 0.0;
    const double next = std::sqrt(n);
    x = y / n;
    if (it > 10 && std::abs(next - value) <= 1e-13 * std::max(1.0, next)) {
      value = next;
      break;
    }
    value = next;
  }
  return (a * x).norm();
}

LemmaReport verify_design_moments(const DesignSampler& sampler, unsigned t, std::uint64_t samples, double epsilon,
                                  RngStream& rng) {
  check_moment_size(sampler.dim, t);
  require(samples >= 2, ErrorCode::invalid_argument, "need at least two samples");
  LemmaReport r;
  r.lemma = "tdesign";
  r.params = {{"sampler", sampler.name}, {"dim", sampler.dim}, {"t", t}, {"epsilon", epsilon}};
  r.bound = epsilon;
  r.samples = samples;
  r.seed = rng.seed();
  r.method = "monte-carlo";
  const auto D = static_cast<Eigen::Index>(ipow(sampler.dim, 2 * t));
  CMatrix halves[2] = {CMatrix::Zero(D, D), CMatrix::Zero(D, D)};
  std::uint64_t counts[2] = {0, 0};
  for (std::uint64_t s = 0; s < samples; ++s) {
    const Unitary u = sampler.sample(rng);
    require(u.dimension() == sampler.dim, ErrorCode::dimension, "sampler returned the wrong dimension");
    const CMatrix up = tensor_power(u.matrix(), t);
    halves[s % 2] += kron(up, up.conjugate());
    ++counts[s % 2];
  }
  const CMatrix haar = haar_moment_operator(sampler.dim, t);
  const CMatrix full = (halves[0] + halves[1]) / static_cast<double>(samples);
  r.measured = operator_norm(full - haar);
  // the two half-sample averages differ by about twice the noise in `full`
  r.error = 0.5 * operator_norm(halves[0] / static_cast<double>(counts[0]) - halves[1] / static_cast<double>(counts[1]));
  if (t == 1) {
    // closed form: E[U (x) conj U] = |Omega><Omega|, Omega = sum_i |ii>/sqrt(d)
    CVector omega = CVector::Zero(D);
    for (std::size_t i = 0; i < sampler.dim; ++i) omega(static_cast<Eigen::Index>(i * sampler.dim + i)) = 1.0;
    omega /= std::sqrt(static_cast<double>(sampler.dim));
    r.extra["haar_reference_vs_closed_form"] = (haar - omega * omega.adjoint()).cwiseAbs().maxCoeff();
  }
  return r;
}

// ---- oracle learning ----

nlohmann::json SimulatedWorld::to_json() const {
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : learned) {
    double min_overlap = 1.0;
    for (double o : l.column_overlaps) min_overlap = std::min(min_overlap, o);
    lv.push_back({{"level", l.level},
                  {"sg_calls", l.sg_calls},
                  {"mix_calls", l.mix_calls},
                  {"copies_per_key", l.copies_per_key},
                  {"column_overlaps", l.column_overlaps},
                  {"min_overlap", min_overlap},
                  {"table_exact", l.table_exact}});
  }
  return {{"cutoff", cutoff}, {"learned", lv}, {"substituted", substituted}, {"world", world.descriptor().to_json()}};
}

SimulatedWorld learn_small_world(KEWorld& real, unsigned cutoff, RngStream& rng, const LearnOptions& opts) {
  require(opts.delta > 0 && opts.T >= 1, ErrorCode::invalid_argument, "need delta > 0 and T >= 1");
  const double eps = opts.delta / opts.T;
  const bool canonical = real.descriptor().canonical_order;
  std::map<unsigned, KELevel> levels;
  std::vector<LearnedLevel> learned;
  std::vector<unsigned> substituted;
  std::uint64_t sg_left = opts.sg_budget;

  for (unsigned l : real.level_list()) {
    if (l > cutoff) {
      check_dimension(2 * l, "design substitute");
      RngStream sub = rng.child(l);
      const Unitary u = brickwork_unitary(2 * l, opts.design_depth, sub);
      auto states = std::make_shared<StateFamily>(StateFamily::from_unitary(u, l));
      auto fn = std::make_shared<TwiseFunction>(TwiseFamily::sample(2 * opts.T, 2 * l, sub), l);
      levels.emplace(l, KELevel{std::move(states), std::move(fn)});
      substituted.push_back(l);
      continue;
    }
    const std::uint64_t keys = pow2(l);
    const std::size_t dim = static_cast<std::size_t>(pow2(2 * l));
    const std::size_t copies = tomography_copies_required(dim + 1, eps);
    const std::size_t need = copies + static_cast<std::size_t>(keys);
    LearnedLevel info;
    info.level = l;
    info.copies_per_key = copies;

    // coupon collection
    std::vector<std::vector<PureState>> pool(keys);
    std::uint64_t missing = keys;
    while (missing > 0) {
      if (sg_left == 0) {
        fail(ErrorCode::resource, "SG budget of " + std::to_string(opts.sg_budget) +
                                      " ran out before every key at level " + std::to_string(l) + " had " +
                                      std::to_string(need) + " copies");
      }
      --sg_left;
      ++info.sg_calls;
      auto out = real.sg(l, rng);
      require(out.has_value(), ErrorCode::contract, "SG returned BOT while learning");
      auto& bucket = pool[out->key.value()];
      if (bucket.size() < need) {
        bucket.push_back(std::move(out->state));
        if (bucket.size() == need) --missing;
      }
    }

    CMatrix estimates(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(keys));
    for (std::uint64_t k = 0; k < keys; ++k) {
      std::span<const PureState> tomo(pool[k].data(), copies);
      estimates.col(static_cast<Eigen::Index>(k)) = state_tomography(tomo, dim + 1, eps, rng).amplitudes();
    }
    auto states = std::make_shared<StateFamily>(StateFamily::orthonormalized(l, 2 * l, estimates));

    // learn f from Mix on own states; every pair uses one spare copy of phi_x
    std::vector<std::uint64_t> table(static_cast<std::size_t>(keys * keys), 0);
    std::vector<std::size_t> spare(keys, copies);
    for (std::uint64_t x = 0; x < keys; ++x) {
      for (std::uint64_t y = canonical ? x : 0; y < keys; ++y) {
        const KeyOutput v = real.mix(l, BitString(x, l), BitString(y, l), pool[x][spare[x]++], rng);
        ++info.mix_calls;
        require(v.has_value(), ErrorCode::contract, "Mix rejected an own-key query while learning");
        table[(x << l) | y] = v->value();
        if (canonical) table[(y << l) | x] = v->value();
      }
    }
    auto fn = std::make_shared<RandomFunction>(RandomFunction::from_table(2 * l, l, table));

    // audit against the real components (introspection only)
    const KELevel& truth = real.level(l);
    for (std::uint64_t k = 0; k < keys; ++k) info.column_overlaps.push_back(truth.states->weight(k, states->state(k)));
    info.table_exact = true;
    for (std::uint64_t x = 0; x < keys; ++x) {
      for (std::uint64_t y = canonical ? x : 0; y < keys; ++y) {
        info.table_exact &= (*truth.function)((x << l) | y) == table[(x << l) | y];
      }
    }
    levels.emplace(l, KELevel{std::move(states), std::move(fn)});
    learned.push_back(std::move(info));
  }
  return SimulatedWorld{cutoff, KEWorld(real.descriptor(), std::move(levels)), std::move(learned),
                        std::move(substituted)};
}

bool three_query_tester(KEWorld& world, ChoiceSource& choices) {
  const auto j = world.sg(1, choices);
  const auto k = world.sg(2, choices);
  if (!j || !k) return false;
  CVector c = k->state.amplitudes();
  c(static_cast<Eigen::Index>(k->key.value() << 2)) += 1.0;
  const BitString jj(j->key.value() ? 3 : 0, 2);
  const KeyOutput v = world.mix(2, k->key, jj, PureState::normalized(std::move(c)), choices);
  return v.has_value() && (v->value() & 1) == j->key.value();
}

unsigned simulation_cutoff(double q, double T) {
  require(q > 0 && T > 0, ErrorCode::invalid_argument, "q and T must be positive");
  return static_cast<unsigned>(std::ceil(std::log2(3456.0 * q * q * T * T * T * T + 2.0)));
}

// ---- birthday and union bounds ----

std::vector<LemmaReport> verify_birthday_and_union_bounds(const KEWorld& world, unsigned n, unsigned T,
                                                          std::uint64_t trials, RngStream& rng) {
  require(n >= 2 && T >= 1 && trials >= 1, ErrorCode::invalid_argument, "need n >= 2, T >= 1, trials >= 1");
  require(world.has_level(n), ErrorCode::invalid_argument, "world has no level n=" + std::to_string(n));
  std::uint64_t collide = 0, redraw = 0, hit = 0;
  const std::uint64_t suffix_mask = pow2(n - 1) - 1;
  for (std::uint64_t t = 0; t < trials; ++t) {
    KEWorld w = world.fresh_copy();
    const auto x = w.sg(n, rng)->key.value();
    const auto y = w.sg(n, rng)->key.value();
    std::vector<std::uint64_t> suffixes;
    bool c = false, r = false, h = false;
    for (unsigned i = 0; i < T; ++i) {
      const auto k = w.sg(n, rng)->key.value();
      const auto s = k & suffix_mask;
      c |= std::find(suffixes.begin(), suffixes.end(), s) != suffixes.end();
      suffixes.push_back(s);
      r |= k == x;
      h |= k == x || k == y;
    }
    collide += c;
    redraw += r;
    hit += h;
  }
  const double K = static_cast<double>(pow2(n - 1));
  double none = 1.0;
  for (unsigned i = 0; i < T; ++i) none *= std::max(0.0, 1.0 - i / K);
  const double pn = 1.0 / static_cast<double>(pow2(n));
  const double two_keys = pn * (1 - std::pow(1 - pn, T)) + (1 - pn) * (1 - std::pow(1 - 2 * pn, T));

  auto make = [&](const std::string& id, std::uint64_t count, double bound, double exact) {
    LemmaReport rep;
    rep.lemma = id;
    rep.params = {{"n", n}, {"T", T}, {"trials", trials}, {"world", world.descriptor().to_json()}};
    rep.measured = static_cast<double>(count) / static_cast<double>(trials);
    rep.error = binomial_error(rep.measured, trials);
    rep.bound = bound;
    rep.method = "monte-carlo";
    rep.samples = trials;
    rep.seed = rng.seed();
    rep.extra["exact"] = exact;
    return rep;
  };
  return {make("suffix-collision", collide, T * static_cast<double>(T) / K, 1 - none),
          make("key-redraw", redraw, T * pn, 1 - std::pow(1 - pn, T)),
          make("transcript-hit", hit, 2 * T * pn, two_keys)};
}

}  // namespace qoracle
