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

#include "qoracle/randomness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qoracle/error.hpp"

namespace qoracle {

namespace {

std::uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~0ULL : ((std::uint64_t{1} << bits) - 1);
}

// Irreducible polynomials over GF(2), leading term included.
constexpr std::uint64_t kIrreducible[17] = {
    0,      0x3,    0x7,    0xB,    0x13,   0x25,   0x43,   0x83,    0x11B,
    0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
};

}  // namespace

BitFunction::BitFunction(unsigned domain_bits, unsigned range_bits)
    : domain_bits_(domain_bits), range_bits_(range_bits) {
  require(domain_bits >= 1 && domain_bits <= 62, ErrorCode::invalid_argument,
          "function domain must be 1..62 bits");
  require(range_bits >= 1 && range_bits <= 62, ErrorCode::invalid_argument,
          "function range must be 1..62 bits");
}

void BitFunction::check_input(std::uint64_t x) const {
  require(x <= low_mask(domain_bits_), ErrorCode::invalid_argument,
          "function input " + std::to_string(x) + " exceeds " + std::to_string(domain_bits_) + " bits");
}

// ---- RandomFunction ----

RandomFunction RandomFunction::sample(unsigned m, unsigned r, RngStream& rng) {
  RandomFunction f(m, r);
  if (m <= kEagerTableBits) {
    std::vector<std::uint64_t> table(std::size_t{1} << m);
    const std::uint64_t range = std::uint64_t{1} << r;
    for (auto& v : table) v = rng.uniform(range);
    f.table_ = std::make_shared<const std::vector<std::uint64_t>>(std::move(table));
  } else {
    f.key_ = rng.next_u64();
    f.cache_ = std::make_shared<LazyCache>();
  }
  return f;
}

RandomFunction RandomFunction::from_table(unsigned m, unsigned r, std::vector<std::uint64_t> table) {
  require(m <= kEagerTableBits, ErrorCode::invalid_argument, "explicit tables are limited to 20 input bits");
  require(table.size() == (std::size_t{1} << m), ErrorCode::dimension, "table size must be 2^m");
  for (std::uint64_t v : table) {
    require(v <= low_mask(r), ErrorCode::invalid_argument, "table value exceeds range bits");
  }
  RandomFunction f(m, r);
  f.table_ = std::make_shared<const std::vector<std::uint64_t>>(std::move(table));
  return f;
}

std::uint64_t RandomFunction::operator()(std::uint64_t x) const {
  check_input(x);
  if (overrides_) {
    if (auto it = overrides_->find(x); it != overrides_->end()) return it->second;
  }
  if (table_) return (*table_)[x];
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto [it, inserted] = cache_->values.try_emplace(x, 0);
  if (inserted) it->second = splitmix64(key_ ^ splitmix64(x)) & low_mask(range_bits());
  return it->second;
}

const std::vector<std::uint64_t>& RandomFunction::table() const {
  require(table_ != nullptr, ErrorCode::contract, "lazy functions have no explicit table");
  return *table_;
}

RandomFunction RandomFunction::with_fixed(
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points) const {
  RandomFunction f = *this;
  for (const auto& [x, y] : points) {
    check_input(x);
    require(y <= low_mask(range_bits()), ErrorCode::invalid_argument, "fixed output exceeds range bits");
  }
  if (table_) {
    auto table = *table_;
    for (const auto& [x, y] : points) table[x] = y;
    f.table_ = std::make_shared<const std::vector<std::uint64_t>>(std::move(table));
    return f;
  }
  auto merged = overrides_ ? *overrides_ : std::map<std::uint64_t, std::uint64_t>{};
  for (const auto& [x, y] : points) merged[x] = y;
  f.overrides_ = std::make_shared<const std::map<std::uint64_t, std::uint64_t>>(std::move(merged));
  return f;
}

nlohmann::json BitFixingSource::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [x, y] : fixed_points) pts.push_back({x, y});
  return {{"domain_bits", domain_bits}, {"range_bits", range_bits}, {"fixed_points", pts}};
}

RandomFunction sample_random_function(unsigned m, unsigned r, RngStream& rng) {
  return RandomFunction::sample(m, r, rng);
}

RandomFunction sample_bit_fixing(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& fixed,
                                 unsigned m, unsigned r, RngStream& rng) {
  std::map<std::uint64_t, std::uint64_t> seen;
  for (const auto& [x, y] : fixed) {
    auto [it, inserted] = seen.emplace(x, y);
    require(inserted || it->second == y, ErrorCode::invalid_argument,
            "fixed point " + std::to_string(x) + " has conflicting outputs");
  }
  return RandomFunction::sample(m, r, rng).with_fixed(fixed);
}

// ---- t-wise independence ----

std::uint64_t gf2m_multiply(std::uint64_t a, std::uint64_t b, unsigned m) {
  require(m >= 1 && m <= 16, ErrorCode::invalid_argument, "GF(2^m) supported for 1 <= m <= 16");
  const std::uint64_t poly = kIrreducible[m];
  std::uint64_t result = 0;
  while (b != 0) {
    if (b & 1U) result ^= a;
    b >>= 1;
    a <<= 1;
    if (a >> m) a ^= poly;
  }
  return result;
}

TwiseFamily::TwiseFamily(unsigned t, unsigned field_bits, std::vector<std::uint64_t> coefficients)
    : t_(t), m_(field_bits), coeffs_(std::move(coefficients)) {
  require(t >= 1, ErrorCode::invalid_argument, "independence t must be positive");
  require(field_bits >= 1 && field_bits <= 16, ErrorCode::invalid_argument,
          "field bits must be 1..16");
  require(coeffs_.size() == t, ErrorCode::invalid_argument, "need exactly t coefficients");
  for (std::uint64_t c : coeffs_) {
    require(c <= low_mask(m_), ErrorCode::invalid_argument, "coefficient outside the field");
  }
}

TwiseFamily TwiseFamily::sample(unsigned t, unsigned field_bits, RngStream& rng) {
  std::vector<std::uint64_t> c(t);
  for (auto& v : c) v = rng.uniform(std::uint64_t{1} << field_bits);
  return TwiseFamily(t, field_bits, std::move(c));
}

TwiseFamily TwiseFamily::from_seed(unsigned t, unsigned field_bits, std::uint64_t seed_index) {
  require(static_cast<unsigned long long>(field_bits) * t < 64, ErrorCode::invalid_argument,
          "seed space too large");
  require(seed_index < (std::uint64_t{1} << (field_bits * t)), ErrorCode::invalid_argument,
          "seed index out of range");
  std::vector<std::uint64_t> c(t);
  for (unsigned i = 0; i < t; ++i) c[i] = (seed_index >> (field_bits * (t - 1 - i))) & low_mask(field_bits);
  return TwiseFamily(t, field_bits, std::move(c));
}

std::uint64_t TwiseFamily::eval(std::uint64_t x) const {
  require(x <= low_mask(m_), ErrorCode::invalid_argument, "input outside the field");
  std::uint64_t acc = 0;
  for (std::uint64_t c : coeffs_) acc = gf2m_multiply(acc, x, m_) ^ c;
  return acc;
}

std::uint64_t twise_eval(const TwiseFamily& fam, std::uint64_t x) { return fam.eval(x); }

TwiseFunction::TwiseFunction(TwiseFamily family, unsigned range_bits)
    : BitFunction(family.field_bits(), range_bits), fam_(std::move(family)) {
  require(range_bits <= fam_.field_bits(), ErrorCode::invalid_argument,
          "range cannot exceed the field width");
}

std::uint64_t TwiseFunction::operator()(std::uint64_t x) const {
  check_input(x);
  return fam_.eval(x) & low_mask(range_bits());
}

// ---- census ----

FunctionCensus FunctionCensus::build(unsigned N, unsigned M, const Verifier& verifier) {
  require(N >= 1 && M >= 2, ErrorCode::invalid_argument, "census needs N >= 1 and M >= 2");
  const double cells = N * std::log2(static_cast<double>(M));
  require(cells <= 24.0 + 1e-9, ErrorCode::refused,
          "census of " + std::to_string(M) + "^" + std::to_string(N) + " functions exceeds 2^24");
  std::uint64_t count = 1;
  for (unsigned i = 0; i < N; ++i) count *= M;
  FunctionCensus c;
  c.N_ = N;
  c.M_ = M;
  c.verifier_id_ = verifier.id;
  c.verifier_queries_ = verifier.queries;
  c.acc_.resize(count);
  std::vector<std::uint32_t> table(N, 0);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    const double a = verifier.acceptance(table);
    require(a >= -1e-12 && a <= 1.0 + 1e-12, ErrorCode::numeric,
            "verifier " + verifier.id + " returned a non-probability");
    c.acc_[idx] = a;
    // odometer, last digit fastest
    for (unsigned i = N; i-- > 0;) {
      if (++table[i] < M) break;
      table[i] = 0;
    }
  }
  return c;
}

std::vector<std::uint32_t> FunctionCensus::table(std::uint64_t f_index) const {
  require(f_index < acc_.size(), ErrorCode::invalid_argument, "function index out of range");
  std::vector<std::uint32_t> t(N_);
  for (unsigned i = N_; i-- > 0;) {
    t[i] = static_cast<std::uint32_t>(f_index % M_);
    f_index /= M_;
  }
  return t;
}

std::uint64_t FunctionCensus::index_of(std::span<const std::uint32_t> table) const {
  require(table.size() == N_, ErrorCode::dimension, "table length must be N");
  std::uint64_t idx = 0;
  for (std::uint32_t v : table) {
    require(v < M_, ErrorCode::invalid_argument, "table value out of range");
    idx = idx * M_ + v;
  }
  return idx;
}

double FunctionCensus::log2_size() const { return N_ * std::log2(static_cast<double>(M_)); }

namespace {

constexpr double kWindowSlack = 1e-12;

std::size_t window_count(const std::vector<double>& sorted, double center, double alpha) {
  auto lo = std::lower_bound(sorted.begin(), sorted.end(), center - alpha - kWindowSlack);
  auto hi = std::upper_bound(sorted.begin(), sorted.end(), center + alpha + kWindowSlack);
  return static_cast<std::size_t>(hi - lo);
}

}  // namespace

double min_entropy_conditioned(const FunctionCensus& census, std::uint64_t f_index, double alpha) {
  require(alpha >= 0.0, ErrorCode::invalid_argument, "alpha must be nonnegative");
  const double center = census.acceptance(f_index);
  std::size_t count = 0;
  for (double a : census.acceptances()) {
    if (std::abs(a - center) <= alpha + kWindowSlack) ++count;
  }
  require(count > 0, ErrorCode::numeric, "empty conditioning set");
  return std::log2(static_cast<double>(count));
}

nlohmann::json BitfixCheck::to_json() const {
  return {{"verifier", verifier_id}, {"N", N}, {"M", M}, {"alpha", alpha}, {"beta", beta},
          {"threshold", threshold}, {"good_fraction", good_fraction}, {"required", required},
          {"h_inf_min", min_h_inf}, {"h_inf_max", max_h_inf}, {"holds", holds}};
}

BitfixCheck check_bitfix_lemma(const FunctionCensus& census, double alpha, double beta) {
  require(alpha > 0.0 && beta > 0.0, ErrorCode::invalid_argument, "alpha and beta must be positive");
  BitfixCheck r;
  r.verifier_id = census.verifier_id();
  r.N = census.domain_size();
  r.M = census.range_size();
  r.alpha = alpha;
  r.beta = beta;
  r.threshold = census.log2_size() - std::log2(1.0 / beta);
  r.required = 1.0 - beta / alpha;
  std::vector<double> sorted = census.acceptances();
  std::sort(sorted.begin(), sorted.end());
  std::size_t good = 0;
  r.min_h_inf = census.log2_size();
  r.max_h_inf = 0.0;
  for (double a : census.acceptances()) {
    const double h = std::log2(static_cast<double>(window_count(sorted, a, alpha)));
    r.min_h_inf = std::min(r.min_h_inf, h);
    r.max_h_inf = std::max(r.max_h_inf, h);
    if (h >= r.threshold - 1e-12) ++good;
  }
  r.good_fraction = static_cast<double>(good) / static_cast<double>(census.size());
  r.holds = r.good_fraction >= r.required - 1e-12;
  return r;
}

std::vector<Verifier> standard_verifier_battery(unsigned N, unsigned M) {
  require(N >= 2 && M >= 2, ErrorCode::invalid_argument, "battery needs N, M >= 2");
  const double top = static_cast<double>(M - 1);
  std::vector<Verifier> v;
  v.push_back({"ignore-oracle", 0, [](std::span<const std::uint32_t>) { return 0.5; }});
  v.push_back({"read-first", 1, [top](std::span<const std::uint32_t> f) { return f[0] / top; }});
  v.push_back({"first-is-zero", 1, [](std::span<const std::uint32_t> f) { return f[0] == 0 ? 1.0 : 0.0; }});
  v.push_back({"collision-01", 2, [](std::span<const std::uint32_t> f) { return f[0] == f[1] ? 1.0 : 0.0; }});
  v.push_back({"sum-parity", N, [](std::span<const std::uint32_t> f) {
                 std::uint64_t s = 0;
                 for (auto x : f) s += x;
                 return s % 2 == 0 ? 1.0 : 0.0;
               }});
  v.push_back({"random-point-zero", 1, [](std::span<const std::uint32_t> f) {
                 double z = 0;
                 for (auto x : f) z += (x == 0);
                 return z / static_cast<double>(f.size());
               }});
  v.push_back({"random-pair-equal", 2, [](std::span<const std::uint32_t> f) {
                 double eq = 0, pairs = 0;
                 for (std::size_t i = 0; i < f.size(); ++i) {
                   for (std::size_t j = i + 1; j < f.size(); ++j) {
                     pairs += 1;
                     eq += (f[i] == f[j]);
                   }
                 }
                 return eq / pairs;
               }});
  v.push_back({"max-high", N, [M](std::span<const std::uint32_t> f) {
                 std::uint32_t mx = 0;
                 for (auto x : f) mx = std::max(mx, x);
                 return 2 * mx >= M ? 1.0 : 0.0;
               }});
  v.push_back({"mean-value", 2, [top](std::span<const std::uint32_t> f) {
                 return (f[0] + f[1]) / (2.0 * top);
               }});
  return v;
}

// ---- presampling witness ----

nlohmann::json PresamplingWitness::to_json() const {
  return {{"source", source.to_json()}, {"gap", gap}, {"search_mode", search_mode},
          {"budget_exhausted", budget_exhausted}, {"delta", delta}, {"dense_gap", dense_gap},
          {"dense_bound", dense_bound}, {"dense_bound_holds", dense_bound_holds}};
}

namespace {

struct Candidate {
  std::vector<unsigned> points;
  double gap = 0.0;
};

bool agrees(const std::vector<std::uint32_t>& g, const std::vector<std::uint32_t>& f,
            const std::vector<unsigned>& points) {
  for (unsigned p : points) {
    if (g[p] != f[p]) return false;
  }
  return true;
}

}  // namespace

PresamplingWitness build_presampling_witness(const FunctionCensus& census, std::uint64_t f_index,
                                             const WitnessParams& params) {
  require(census.size() <= (std::size_t{1} << 16), ErrorCode::refused,
          "presampling witness search is limited to 2^16 functions");
  const unsigned N = census.domain_size();
  const unsigned M = census.range_size();
  const std::vector<std::uint32_t> f = census.table(f_index);
  const double acc_f = census.acceptance(f_index);

  std::vector<std::vector<std::uint32_t>> tables(census.size());
  for (std::uint64_t i = 0; i < census.size(); ++i) tables[i] = census.table(i);

  constexpr std::size_t kSearchBudget = 100000;
  std::size_t evaluated = 0;
  bool exhausted = false;
  auto gap_of = [&](const std::vector<unsigned>& points) {
    ++evaluated;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::uint64_t i = 0; i < census.size(); ++i) {
      if (agrees(tables[i], f, points)) {
        sum += census.acceptance(i);
        ++n;
      }
    }
    return std::abs(acc_f - sum / static_cast<double>(n));
  };

  Candidate best{{}, gap_of({})};
  auto consider = [&](const std::vector<unsigned>& pts) {
    if (evaluated >= kSearchBudget) {
      exhausted = true;
      return;
    }
    const double g = gap_of(pts);
    if (g < best.gap - 1e-15) best = {pts, g};
  };
  const unsigned exhaustive_limit = std::min(2U, std::min(params.max_fixed, N));
  if (exhaustive_limit >= 1) {
    for (unsigned a = 0; a < N; ++a) consider({a});
  }
  if (exhaustive_limit >= 2) {
    for (unsigned a = 0; a < N; ++a) {
      for (unsigned b = a + 1; b < N; ++b) consider({a, b});
    }
  }
  std::string mode = "exhaustive";
  if (params.max_fixed > 2 && N > 2) {
    mode = "exhaustive<=2+greedy";
    Candidate cur = best;
    while (cur.points.size() < std::min(params.max_fixed, N) && cur.gap > 0.0 && !exhausted) {
      Candidate step{{}, 2.0};
      for (unsigned p = 0; p < N; ++p) {
        if (std::find(cur.points.begin(), cur.points.end(), p) != cur.points.end()) continue;
        auto pts = cur.points;
        pts.push_back(p);
        std::sort(pts.begin(), pts.end());
        if (evaluated >= kSearchBudget) {
          exhausted = true;
          break;
        }
        const double g = gap_of(pts);
        if (g < step.gap) step = {pts, g};
      }
      if (step.points.empty()) break;
      cur = step;
      if (cur.gap < best.gap - 1e-15) best = cur;
    }
  }

  PresamplingWitness w;
  w.source.domain_bits = 0;
  while ((1U << w.source.domain_bits) < N) ++w.source.domain_bits;
  w.source.range_bits = 0;
  while ((1U << w.source.range_bits) < M) ++w.source.range_bits;
  for (unsigned p : best.points) w.source.fixed_points.emplace_back(p, f[p]);
  w.gap = best.gap;
  w.search_mode = mode;
  w.budget_exhausted = exhausted;

  // Dense source X': alpha-window of f restricted to the fixed points.
  std::vector<std::uint64_t> members;
  double sum_x = 0.0, sum_y = 0.0;
  std::size_t count_y = 0;
  for (std::uint64_t i = 0; i < census.size(); ++i) {
    if (!agrees(tables[i], f, best.points)) continue;
    sum_y += census.acceptance(i);
    ++count_y;
    if (std::abs(census.acceptance(i) - acc_f) <= params.alpha + 1e-12) {
      members.push_back(i);
      sum_x += census.acceptance(i);
    }
  }
  std::vector<unsigned> free_points;
  for (unsigned p = 0; p < N; ++p) {
    if (std::find(best.points.begin(), best.points.end(), p) == best.points.end()) free_points.push_back(p);
  }
  const double log_m = std::log2(static_cast<double>(M));
  double delta = 0.0;
  const std::size_t subsets = std::size_t{1} << free_points.size();
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    std::map<std::vector<std::uint32_t>, std::size_t> counts;
    std::size_t width = 0;
    for (std::size_t j = 0; j < free_points.size(); ++j) width += (mask >> j) & 1U;
    for (std::uint64_t i : members) {
      std::vector<std::uint32_t> proj;
      for (std::size_t j = 0; j < free_points.size(); ++j) {
        if ((mask >> j) & 1U) proj.push_back(tables[i][free_points[j]]);
      }
      ++counts[proj];
    }
    std::size_t top = 0;
    for (const auto& [k, c] : counts) top = std::max(top, c);
    const double h = -std::log2(static_cast<double>(top) / static_cast<double>(members.size()));
    delta = std::max(delta, 1.0 - h / (static_cast<double>(width) * log_m));
  }
  w.delta = delta;
  w.dense_gap = std::abs(sum_x / static_cast<double>(members.size()) - sum_y / static_cast<double>(count_y));
  w.dense_bound = census.verifier_queries() * delta * log_m;
  w.dense_bound_holds = w.dense_gap <= w.dense_bound + 1e-12;
  return w;
}

}  // namespace qoracle
