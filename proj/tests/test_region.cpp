// Copyright 2026 The lsshadow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace lsshadow;
using namespace lsshadow::testing;
using Catch::Approx;

namespace {

double sum_def_fusion(Mask a, Mask b, Mask c, int d, int n) {
  const double dd = d;
  double acc = 0.0;
  for (Mask dm = 0; dm <= full_mask(n); ++dm)
    if (b == (a & dm)) acc += std::pow(dd, -popcount(dm)) * std::pow(-1.0 / dd, popcount(c ^ dm));
  return std::pow(dd * dd * dd / (dd * dd - 1.0), n) * acc;
}

/// First line of the definition, with the Weingarten function explicit.
double wg_def_fusion(Mask a, Mask b, Mask c, int d, int n) {
  double acc = 0.0;
  for (Mask dm = 0; dm <= full_mask(n); ++dm) {
    if (b != (a & dm)) continue;
    const int expo = 2 * n + popcount(a) - popcount(b) + popcount(full_mask(n) & ~a & ~dm);
    acc += std::pow(static_cast<double>(d), expo) * weingarten({dm, n}, {c, n}, d, n);
  }
  return acc;
}

LatticeVector brute_subset(const LatticeVector& v) {
  LatticeVector out(v.n_sites());
  for (Mask a = 0; a < v.size(); ++a)
    for (Mask s = 0; s < v.size(); ++s)
      if (is_subset(s, a)) out[a] += v[s];
  return out;
}

LatticeVector brute_superset(const LatticeVector& v) {
  LatticeVector out(v.n_sites());
  for (Mask a = 0; a < v.size(); ++a)
    for (Mask s = 0; s < v.size(); ++s)
      if (is_subset(a, s)) out[a] += v[s];
  return out;
}

}  // namespace

TEST_CASE("region basics", "[region]") {
  const Region a{0b0101, 4};
  CHECK(a.size() == 2);
  CHECK(a.complement().bits == 0b1010);
  CHECK(a.complement().size() == 4 - a.size());
  CHECK_THROWS_AS(Region(0b10000, 4), ParameterError);
  CHECK_THROWS_AS(Region(0, 15), ParameterError);
  Rng rng(1);
  std::uniform_int_distribution<Mask> pick(0, 63);
  for (int i = 0; i < 100; ++i) {
    const Mask x = pick(rng), y = pick(rng);
    CHECK(symdiff_size(x, y) == popcount(x) + popcount(y) - 2 * popcount(x & y));
  }
}

TEST_CASE("lattice vector validation", "[region]") {
  CHECK_THROWS_AS(LatticeVector(2, std::vector<double>(3)), ParameterError);
  LatticeVector v(2, 1.0);
  CHECK(v.all_finite());
  v[1] = std::nan("");
  CHECK_FALSE(v.all_finite());
}

TEST_CASE("weingarten examples", "[region]") {
  CHECK(weingarten({0, 1}, {0, 1}, 2, 1) == Approx(1.0 / 3));
  CHECK(weingarten({1, 1}, {0, 1}, 2, 1) == Approx(-1.0 / 6));
  CHECK(weingarten({0b01, 2}, {0b10, 2}, 2, 2) == Approx(1.0 / 36));
  CHECK_THROWS_AS(weingarten({0, 1}, {0, 1}, 1, 1), ParameterError);
}

TEST_CASE("weingarten depends only on the symmetric difference", "[region][property]") {
  const int n = 4;
  for (Mask a = 0; a < 16; ++a)
    for (Mask b = 0; b < 16; ++b) {
      CHECK(weingarten({a, n}, {b, n}, 3, n) == weingarten({b, n}, {a, n}, 3, n));
      CHECK(weingarten({a, n}, {b, n}, 3, n) == Approx(weingarten({a ^ b, n}, {0, n}, 3, n)).epsilon(1e-14));
    }
}

TEST_CASE("fusion coefficient examples", "[region]") {
  for (Mask c = 0; c < 2; ++c) CHECK(fusion_coeff({0, 1}, {1, 1}, {c, 1}, 2) == 0.0);
  CHECK(fusion_coeff({1, 1}, {1, 1}, {0, 1}, 2) == Approx(-2.0 / 3));
  CHECK(fusion_coeff({1, 1}, {1, 1}, {1, 1}, 2) == Approx(4.0 / 3));
  const int n = 3;
  for (Mask a = 0; a < 8; ++a)
    for (Mask b = 0; b < 8; ++b)
      if (!is_subset(b, a))
        for (Mask c = 0; c < 8; ++c) CHECK(fusion_coeff({a, n}, {b, n}, {c, n}, 2) == 0.0);
}

TEST_CASE("fusion per-site product equals the sum definition (exhaustive N <= 3)", "[region][property]") {
  for (int d : {2, 3}) {
    for (int n = 1; n <= 3; ++n) {
      for (Mask a = 0; a <= full_mask(n); ++a)
        for (Mask b = 0; b <= full_mask(n); ++b)
          for (Mask c = 0; c <= full_mask(n); ++c) {
            const double f = fusion_coeff({a, n}, {b, n}, {c, n}, d);
            CHECK(f == Approx(sum_def_fusion(a, b, c, d, n)).margin(1e-12));
            CHECK(f == Approx(wg_def_fusion(a, b, c, d, n)).margin(1e-9));
          }
    }
  }
}

TEST_CASE("subset and superset sums", "[region]") {
  LatticeVector v(1, std::vector<double>{2.0, 5.0});
  const LatticeVector s = superset_sum(v);
  CHECK(s[0] == 7.0);
  CHECK(s[1] == 5.0);

  Rng rng(7);
  const LatticeVector r3 = random_lattice(3, rng);
  const LatticeVector sub = subset_sum(r3), sup = superset_sum(r3);
  const LatticeVector bsub = brute_subset(r3), bsup = brute_superset(r3);
  for (Mask a = 0; a < 8; ++a) {
    CHECK(sub[a] == Approx(bsub[a]).margin(1e-12));
    CHECK(sup[a] == Approx(bsup[a]).margin(1e-12));
  }

  const LatticeVector r6 = random_lattice(6, rng);
  const LatticeVector a1 = subset_sum_inverse(subset_sum(r6));
  const LatticeVector a2 = superset_sum_inverse(superset_sum(r6));
  const LatticeVector a3 = subset_sum(subset_sum_inverse(r6));
  const LatticeVector a4 = superset_sum(superset_sum_inverse(r6));
  for (Mask a = 0; a < 64; ++a) {
    CHECK(a1[a] == Approx(r6[a]).epsilon(1e-12).margin(1e-12));
    CHECK(a2[a] == Approx(r6[a]).epsilon(1e-12).margin(1e-12));
    CHECK(a3[a] == Approx(r6[a]).epsilon(1e-12).margin(1e-12));
    CHECK(a4[a] == Approx(r6[a]).epsilon(1e-12).margin(1e-12));
  }
}

TEST_CASE("transforms round-trip exactly on integer inputs", "[region][property]") {
  Rng rng(11);
  std::uniform_int_distribution<int> pick(-50, 50);
  LatticeVector v(8);
  for (Mask a = 0; a < v.size(); ++a) v[a] = pick(rng);
  const LatticeVector a1 = subset_sum_inverse(subset_sum(v));
  const LatticeVector a2 = superset_sum_inverse(superset_sum(v));
  for (Mask a = 0; a < v.size(); ++a) {
    CHECK(a1[a] == v[a]);
    CHECK(a2[a] == v[a]);
  }
}

TEST_CASE("weighted symmetric-difference transform", "[region]") {
  const LatticeVector one = weighted_symdiff_transform(LatticeVector(1, std::vector<double>{1, 1}), 2);
  CHECK(one[0] == Approx(0.5));
  CHECK(one[1] == Approx(0.5));

  const LatticeVector zero = weighted_symdiff_transform(LatticeVector(4), 2);
  for (Mask a = 0; a < 16; ++a) CHECK(zero[a] == 0.0);

  Rng rng(3);
  for (int d : {2, 3}) {
    const LatticeVector v = random_lattice(3, rng);
    const LatticeVector fast = weighted_symdiff_transform(v, d);
    for (Mask c = 0; c < 8; ++c) {
      double brute = 0.0;
      for (Mask dm = 0; dm < 8; ++dm) brute += std::pow(-1.0 / d, popcount(c ^ dm)) * v[dm];
      CHECK(fast[c] == Approx(brute).margin(1e-12));
    }
  }
}

TEST_CASE("transforms are linear", "[region][property]") {
  Rng rng(5);
  const LatticeVector u = random_lattice(5, rng), v = random_lattice(5, rng);
  const double al = 0.7, be = -1.3;
  const LatticeVector comb = al * u + be * v;
  using Fn = LatticeVector (*)(LatticeVector);
  const std::vector<std::pair<const char*, std::function<LatticeVector(LatticeVector)>>> fns = {
      {"subset", static_cast<Fn>(subset_sum)},
      {"subset_inv", static_cast<Fn>(subset_sum_inverse)},
      {"superset", static_cast<Fn>(superset_sum)},
      {"superset_inv", static_cast<Fn>(superset_sum_inverse)},
      {"symdiff", [](LatticeVector x) { return weighted_symdiff_transform(std::move(x), 2); }}};
  for (const auto& [name, f] : fns) {
    INFO(name);
    const LatticeVector lhs = f(comb), rhs = al * f(u) + be * f(v);
    for (Mask a = 0; a < lhs.size(); ++a) CHECK(lhs[a] == Approx(rhs[a]).margin(1e-11));
  }
}
