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

#include <set>

#include "test_util.hpp"

using namespace lsshadow;
using namespace lsshadow::testing;
using Catch::Approx;

namespace {

CircuitInstance random_clifford_circuit(int n, int depth, Rng& rng) {
  CircuitInstance c(n);
  std::uniform_int_distribution<int> site(0, n - 1), kind(0, 3);
  for (int i = 0; i < depth; ++i) {
    const int q = site(rng);
    switch (kind(rng)) {
      case 0: c.add_clifford_gate({CliffordGateKind::h, {q}}); break;
      case 1: c.add_clifford_gate({CliffordGateKind::s, {q}}); break;
      case 2: c.add_clifford1(q, sample_single_qubit_clifford(rng)); break;
      default: {
        if (n == 1) break;
        int t = site(rng);
        if (t == q) t = (q + 1) % n;
        c.add_clifford_gate({CliffordGateKind::cnot, {q, t}});
      }
    }
  }
  return c;
}

double overlap(const CVector& a, const CVector& b) { return std::norm(a.dot(b)); }

/// Whether +-p lies in the group generated by gens (brute-force span).
bool in_span(const std::vector<PauliString>& gens, const PauliString& p) {
  const std::size_t g = gens.size();
  for (std::size_t m = 0; m < (std::size_t{1} << g); ++m) {
    PauliString acc = PauliString::identity(p.n_sites);
    for (std::size_t i = 0; i < g; ++i)
      if ((m >> i) & 1U) acc = acc * gens[i];
    if (acc.x == p.x && acc.z == p.z) return true;
  }
  return false;
}

StabilizerTableau ghz_tableau(int n) {
  StabilizerTableau t(n, 0);
  t.h(0);
  for (int q = 0; q + 1 < n; ++q) t.cnot(q, q + 1);
  return t;
}

}  // namespace

TEST_CASE("single-qubit Clifford group", "[stabilizer]") {
  const auto& g = single_qubit_cliffords();
  REQUIRE(g.size() == 24);
  const std::vector<CMatrix> paulis = {pauli_matrix(PauliString::parse("X")), pauli_matrix(PauliString::parse("Y")),
                                       pauli_matrix(PauliString::parse("Z"))};
  std::set<std::vector<int>> images;
  for (const auto& el : g) {
    CHECK(unitarity_defect(el.matrix) < 1e-12);
    std::vector<int> key;
    for (int k : {0, 2}) {
      const CMatrix img = el.matrix * paulis[static_cast<std::size_t>(k)] * el.matrix.adjoint();
      int found = 0;
      for (int j = 0; j < 3; ++j)
        for (int s : {1, -1})
          if (max_abs(img - static_cast<double>(s) * paulis[static_cast<std::size_t>(j)]) < 1e-12) {
            found = s * (j + 1);
          }
      CHECK(found != 0);
      key.push_back(found);
    }
    images.insert(key);
  }
  CHECK(images.size() == 24);

  Rng rng(1);
  const int per = 1000, total = 24 * per;
  std::vector<int> hist(24, 0);
  for (int i = 0; i < total; ++i) hist[static_cast<std::size_t>(sample_single_qubit_clifford(rng))]++;
  const double sd = std::sqrt(total * (1.0 / 24) * (23.0 / 24));
  for (int h : hist) CHECK(std::abs(h - per) < 5 * sd);

  Rng a(5), b(5);
  CHECK(sample_single_qubit_clifford(a) == sample_single_qubit_clifford(b));
}

TEST_CASE("clifford snapshots", "[stabilizer]") {
  const CircuitInstance id(2);
  const StabilizerTableau t = id.snapshot_tableau(0);
  CHECK(t.stabilizer(0) == PauliString::parse("+ZI"));
  CHECK(t.stabilizer(1) == PauliString::parse("+IZ"));

  CircuitInstance h(1);
  h.add_clifford_gate({CliffordGateKind::h, {0}});
  CHECK(h.snapshot_tableau(0).stabilizer(0) == PauliString::parse("+X"));
  CHECK(h.snapshot_tableau(1).stabilizer(0) == PauliString::parse("-X"));

  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Ensemble ens(EnsembleSpec::cnot_sandwich(6));
    const CircuitInstance c = ens.member(static_cast<std::uint64_t>(trial));
    REQUIRE(c.is_clifford());
    const Mask b = static_cast<Mask>(trial * 11 % 64);
    const StabilizerTableau st = c.snapshot_tableau(b);
    CHECK(st.is_valid());
    CHECK(std::abs(overlap(st.to_vector(), c.snapshot_vector(b)) - 1.0) < 1e-10);
  }

  CircuitInstance haar(2);
  haar.add_single(0, sample_haar_unitary(2, rng));
  CHECK_THROWS_AS(haar.snapshot_tableau(0), TypeError);
  const Ensemble bw(EnsembleSpec::brickwall_circuit(4, 1));
  CHECK_THROWS_AS(bw.member(1).snapshot_tableau(0), TypeError);
  CHECK_THROWS_AS(gate_kind_from_string("t"), TypeError);
}

TEST_CASE("reduced stabilizer generators", "[stabilizer]") {
  Rng rng(3);
  const CircuitInstance c = random_clifford_circuit(5, 40, rng);
  const StabilizerTableau t = c.snapshot_tableau(3);
  const auto all = reduced_stabilizer_generators(t, Region::full(5));
  CHECK(all.size() == 5);
  for (const auto& s : t.stabilizers()) CHECK(in_span(all, s));

  const StabilizerTableau ghz = ghz_tableau(2);
  CHECK(reduced_stabilizer_generators(ghz, {0b01, 2}).empty());
  // Brute force over the 4-element GHZ group: only I and ZZ, XX, -YY exist, none on {1} alone.
  for (Mask m = 0; m < 4; ++m) {
    PauliString acc = PauliString::identity(2);
    for (int i = 0; i < 2; ++i)
      if ((m >> i) & 1U) acc = acc * ghz.stabilizer(i);
    if (m) CHECK_FALSE(is_subset(acc.support(), 0b01));
  }

  const StabilizerTableau prod(3, 0b010);
  const auto red = reduced_stabilizer_generators(prod, {0b001, 3});
  REQUIRE(red.size() == 1);
  CHECK(red[0].unsigned_copy() == PauliString::parse("ZII"));
}

TEST_CASE("stabilizer pauli expectations", "[stabilizer]") {
  const StabilizerTableau zero(1, 0);
  CHECK(stab_pauli_expectation(zero, PauliString::parse("Z")) == 1);
  CHECK(stab_pauli_expectation(zero, PauliString::parse("-Z")) == -1);
  CHECK(stab_pauli_expectation(zero, PauliString::parse("X")) == 0);
  CHECK_THROWS_AS(stab_pauli_expectation(zero, PauliString::parse("iZ")), ParameterError);

  const StabilizerTableau ghz = ghz_tableau(2);
  CHECK(stab_pauli_expectation(ghz, PauliString::parse("XX")) == 1);
  CHECK(stab_pauli_expectation(ghz, PauliString::parse("ZI")) == 0);
  CHECK(stab_pauli_expectation(ghz, PauliString::parse("YY")) == -1);

  Rng rng(4);
  std::uniform_int_distribution<Mask> pick(0, 15);
  for (int trial = 0; trial < 30; ++trial) {
    const CircuitInstance c = random_clifford_circuit(4, 30, rng);
    const StabilizerTableau t = c.snapshot_tableau(pick(rng));
    const CVector v = t.to_vector();
    for (Mask x = 0; x < 16; ++x)
      for (Mask z = 0; z < 16; ++z) {
        const PauliString p(4, x, z, 0);
        const double dense = (v.adjoint() * pauli_matrix(p) * v)(0, 0).real();
        CHECK(std::abs(stab_pauli_expectation(t, p) - dense) < 1e-10);
      }
  }
}

TEST_CASE("stabilizer purities", "[stabilizer]") {
  const StabilizerTableau prod(4, 0b0110);
  for (Mask c = 0; c < 16; ++c) CHECK(stab_purity(prod, {c, 4}) == 1.0);
  CHECK(stab_purity(ghz_tableau(2), {0b01, 2}) == Approx(0.5));
  CHECK(stab_purity(ghz_tableau(4), {0b0011, 4}) == Approx(0.5));
}

TEST_CASE("tableau invariants hold after every gate", "[stabilizer][property]") {
  Rng rng(5);
  const int n = 6;
  StabilizerTableau t(n, 0b101101);
  std::uniform_int_distribution<int> site(0, n - 1), kind(0, 4);
  for (int i = 0; i < 300; ++i) {
    const int q = site(rng);
    switch (kind(rng)) {
      case 0: t.h(q); break;
      case 1: t.s(q); break;
      case 2: t.sdg(q); break;
      case 3: t.clifford1(q, sample_single_qubit_clifford(rng)); break;
      default: t.cnot(q, (q + 1 + site(rng) % (n - 1)) % n);
    }
    REQUIRE(t.is_valid());
    CHECK(restricted_rank(t, full_mask(n)) == n);
  }
}

TEST_CASE("stab_purity equals dense purity on every region", "[stabilizer][property]") {
  Rng rng(6);
  for (int n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 8; ++trial) {
      const CircuitInstance c = random_clifford_circuit(n, 8 * n, rng);
      const Mask b = static_cast<Mask>(trial) & full_mask(n);
      const StabilizerTableau t = c.snapshot_tableau(b);
      const CVector v = c.snapshot_vector(b);
      const LatticeVector fast = stab_all_purities(t);
      for (Mask r = 0; r <= full_mask(n); ++r) {
        CHECK(fast[r] == Approx(purity_oracle(v, n, r)).margin(1e-10));
        CHECK(stab_purity(t, {r, n}) == std::ldexp(1.0, static_cast<int>(reduced_stabilizer_generators(t, {r, n}).size()) - popcount(r)));
      }
    }
  }
}

TEST_CASE("expectation squared is 0 or 1, and 1 exactly when P lies in S_supp(P)", "[stabilizer][property]") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const CircuitInstance c = random_clifford_circuit(4, 25, rng);
    const StabilizerTableau t = c.snapshot_tableau(static_cast<Mask>(trial));
    for (Mask x = 0; x < 16; ++x)
      for (Mask z = 0; z < 16; ++z) {
        const PauliString p(4, x, z, 0);
        if (p.is_identity()) continue;
        const int e = stab_pauli_expectation(t, p);
        CHECK(e * e <= 1);
        const bool member = in_span(reduced_stabilizer_generators(t, {p.support(), 4}), p);
        CHECK((e * e == 1) == member);
      }
  }
}
