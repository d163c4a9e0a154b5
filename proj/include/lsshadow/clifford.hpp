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

// Stabilizer tableaux with destabilizers, single-qubit Clifford group.

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "lsshadow/core.hpp"
#include "lsshadow/dense.hpp"
#include "lsshadow/pauli.hpp"
#include "lsshadow/rng.hpp"

namespace lsshadow {

enum class CliffordGateKind { h, s, sdg, cnot };

// ---------------------------------------------------------------- single-qubit group

/// One element of the 24-element single-qubit Clifford group (modulo phase),
/// stored as a word in H and S (applied left to right) and as a matrix.
struct SingleQubitClifford {
  std::string word;
  Mat2 matrix;
};

namespace detail {

struct PauliImage {
  int x, z, sign;
  auto operator<=>(const PauliImage&) const = default;
};

// Conjugation action of a 1q Clifford on (X, Z), used as the group key.
inline std::pair<PauliImage, PauliImage> conj_images(const std::string& word) {
  // Track images of X and Z under G P G^dagger, applying word letters in order.
  PauliString px(1, 1, 0), pz(1, 0, 1);
  auto apply = [](PauliString& p, char g) {
    int x = p.x & 1, z = p.z & 1, ph = p.phase;
    if (g == 'H') {
      if (x && z) ph += 2;
      std::swap(x, z);
    } else {  // S: X -> Y, Y -> -X
      if (x && z) ph += 2;
      z ^= x;
    }
    p = PauliString(1, static_cast<Mask>(x), static_cast<Mask>(z), ph);
  };
  for (char g : word) {
    apply(px, g);
    apply(pz, g);
  }
  return {{static_cast<int>(px.x), static_cast<int>(px.z), px.phase},
          {static_cast<int>(pz.x), static_cast<int>(pz.z), pz.phase}};
}

inline std::vector<SingleQubitClifford> build_clifford_group() {
  std::map<std::pair<PauliImage, PauliImage>, std::string> seen;
  std::vector<std::string> queue{""};
  seen[conj_images("")] = "";
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (char g : {'H', 'S'}) {
      const std::string w = queue[head] + g;
      const auto key = conj_images(w);
      if (seen.emplace(key, w).second) queue.push_back(w);
    }
  }
  std::vector<SingleQubitClifford> out;
  for (const auto& w : queue) {
    Mat2 m = Mat2::Identity();
    for (char g : w) m = (g == 'H' ? hadamard_matrix() : phase_matrix()) * m;
    out.push_back({w, m});
  }
  return out;
}

}  // namespace detail

inline const std::vector<SingleQubitClifford>& single_qubit_cliffords() {
  static const std::vector<SingleQubitClifford> group = detail::build_clifford_group();
  return group;
}

inline int sample_single_qubit_clifford(Rng& rng) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(single_qubit_cliffords().size()) - 1);
  return pick(rng);
}

// ---------------------------------------------------------------- tableau

/// Aaronson-Gottesman tableau. Rows 0..N-1 are destabilizers, N..2N-1
/// stabilizers; each row is (-1)^r times a Hermitian Pauli string.
class StabilizerTableau {
 public:
  StabilizerTableau() = default;

  /// Computational basis state |b>.
  StabilizerTableau(int n_sites, Mask b) : n_(n_sites), x_(2 * n_sites), z_(2 * n_sites), r_(2 * n_sites) {
    require_sites(n_sites);
    for (int i = 0; i < n_; ++i) {
      x_[i] = Mask{1} << i;
      z_[n_ + i] = Mask{1} << i;
      r_[n_ + i] = (b >> i) & 1U;
    }
  }

  int n_sites() const noexcept { return n_; }

  void h(int q) {
    const Mask bit = Mask{1} << q;
    for (int i = 0; i < 2 * n_; ++i) {
      const bool xi = x_[i] & bit, zi = z_[i] & bit;
      r_[i] ^= static_cast<std::uint8_t>(xi && zi);
      set(x_[i], bit, zi);
      set(z_[i], bit, xi);
    }
  }

  void s(int q) {
    const Mask bit = Mask{1} << q;
    for (int i = 0; i < 2 * n_; ++i) {
      const bool xi = x_[i] & bit, zi = z_[i] & bit;
      r_[i] ^= static_cast<std::uint8_t>(xi && zi);
      set(z_[i], bit, zi != xi);
    }
  }

  void sdg(int q) {
    s(q);
    s(q);
    s(q);
  }

  void cnot(int control, int target) {
    require(control != target, "CNOT needs distinct sites");
    const Mask cb = Mask{1} << control, tb = Mask{1} << target;
    for (int i = 0; i < 2 * n_; ++i) {
      const bool xc = x_[i] & cb, zc = z_[i] & cb, xt = x_[i] & tb, zt = z_[i] & tb;
      r_[i] ^= static_cast<std::uint8_t>(xc && zt && (xt == zc));
      set(x_[i], tb, xt != xc);
      set(z_[i], cb, zc != zt);
    }
  }

  /// Applies the 1q Clifford element with index `element` (its word left to right).
  void clifford1(int q, int element) {
    for (char g : single_qubit_cliffords().at(static_cast<std::size_t>(element)).word) g == 'H' ? h(q) : s(q);
  }

  /// Inverse of clifford1: letters reversed, S replaced by S^dagger.
  void clifford1_inverse(int q, int element) {
    const auto& w = single_qubit_cliffords().at(static_cast<std::size_t>(element)).word;
    for (auto it = w.rbegin(); it != w.rend(); ++it) *it == 'H' ? h(q) : sdg(q);
  }

  PauliString stabilizer(int i) const { return {n_, x_[n_ + i], z_[n_ + i], r_[n_ + i] ? 2 : 0}; }
  PauliString destabilizer(int i) const { return {n_, x_[i], z_[i], r_[i] ? 2 : 0}; }
  std::vector<PauliString> stabilizers() const {
    std::vector<PauliString> out;
    for (int i = 0; i < n_; ++i) out.push_back(stabilizer(i));
    return out;
  }

  /// Pairwise commutation of stabilizers and full symplectic rank of all rows.
  bool is_valid() const {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        if (!commutes(stabilizer(i), stabilizer(j))) return false;
        if (!commutes(destabilizer(i), destabilizer(j))) return false;
        if (commutes(destabilizer(i), stabilizer(j)) != (i != j)) return false;
      }
    return true;
  }

  /// Dense state vector (up to global phase) by projecting a random-ish start.
  CVector to_vector() const {
    const Eigen::Index dim = Eigen::Index{1} << n_;
    // Product of (1 + g_i)/2 applied to a basis state with nonzero overlap.
    for (Eigen::Index seed = 0; seed < dim; ++seed) {
      CVector v = CVector::Zero(dim);
      v[seed] = 1.0;
      for (int i = 0; i < n_; ++i) {
        const CVector gv = pauli_matrix(stabilizer(i)) * v;
        v = 0.5 * (v + gv);
      }
      const double nrm = v.norm();
      if (nrm > 1e-6) return v / nrm;
    }
    throw StateError("tableau projection vanished");
  }

 private:
  static void set(Mask& m, Mask bit, bool v) { m = v ? (m | bit) : (m & ~bit); }

  int n_ = 0;
  std::vector<Mask> x_, z_;
  std::vector<std::uint8_t> r_;
};

/// <P> in the stabilizer state: +-1 if +-P is in the group, else 0.
inline int stab_pauli_expectation(const StabilizerTableau& t, const PauliString& p) {
  require(p.n_sites == t.n_sites(), "tableau/Pauli size mismatch");
  require(p.is_hermitian(), "expectation requires a Hermitian Pauli string");
  const int n = t.n_sites();
  for (int i = 0; i < n; ++i)
    if (!commutes(t.stabilizer(i), p)) return 0;
  PauliString acc = PauliString::identity(n);
  for (int i = 0; i < n; ++i)
    if (!commutes(t.destabilizer(i), p)) acc = acc * t.stabilizer(i);
  if (acc.x != p.x || acc.z != p.z) throw StateError("stabilizer decomposition failed");
  const int rel = ((p.phase - acc.phase) % 4 + 4) % 4;
  if (rel == 0) return 1;
  if (rel == 2) return -1;
  throw StateError("non-real stabilizer phase");
}

/// Independent generators of {g in S : supp(g) within A}.
inline std::vector<PauliString> reduced_stabilizer_generators(const StabilizerTableau& t, Region a) {
  require(a.n_sites == t.n_sites(), "region/tableau size mismatch");
  const Mask comp = full_mask(t.n_sites()) & ~a.bits;
  std::vector<PauliString> rows = t.stabilizers();
  std::vector<bool> used(rows.size(), false);
  for (int q = 0; q < t.n_sites(); ++q) {
    if (!((comp >> q) & 1U)) continue;
    const Mask bit = Mask{1} << q;
    for (int part = 0; part < 2; ++part) {
      auto has = [&](const PauliString& p) { return part == 0 ? (p.x & bit) != 0 : (p.z & bit) != 0; };
      std::size_t pivot = rows.size();
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (!used[i] && has(rows[i])) {
          pivot = i;
          break;
        }
      if (pivot == rows.size()) continue;
      used[pivot] = true;
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (i != pivot && has(rows[i])) rows[i] = rows[i] * rows[pivot];
    }
  }
  std::vector<PauliString> out;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!used[i]) out.push_back(rows[i]);
  return out;
}

/// Rank over GF(2) of the stabilizer rows restricted to the sites in `cols`.
inline int restricted_rank(const StabilizerTableau& t, Mask cols) {
  const int n = t.n_sites();
  std::vector<std::uint32_t> v;
  for (int i = 0; i < n; ++i) {
    const PauliString s = t.stabilizer(i);
    // Pack the restricted x and z bits into one word of <= 28 bits.
    v.push_back((s.x & cols) | ((s.z & cols) << kMaxSites));
  }
  int rank = 0;
  for (int bit = 0; bit < 2 * kMaxSites; ++bit) {
    const std::uint32_t m = std::uint32_t{1} << bit;
    std::size_t piv = v.size();
    for (std::size_t i = static_cast<std::size_t>(rank); i < v.size(); ++i)
      if (v[i] & m) {
        piv = i;
        break;
      }
    if (piv == v.size()) continue;
    std::swap(v[piv], v[static_cast<std::size_t>(rank)]);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (i != static_cast<std::size_t>(rank) && (v[i] & m)) v[i] ^= v[static_cast<std::size_t>(rank)];
    ++rank;
  }
  return rank;
}

/// Tr rho_C^2 = 2^{g_C - |C|}.
inline double stab_purity(const StabilizerTableau& t, Region c) {
  require(c.n_sites == t.n_sites(), "region/tableau size mismatch");
  const Mask comp = full_mask(t.n_sites()) & ~c.bits;
  const int g = t.n_sites() - restricted_rank(t, comp);
  return std::ldexp(1.0, g - c.size());
}

inline LatticeVector stab_all_purities(const StabilizerTableau& t) {
  const int n = t.n_sites();
  LatticeVector out(n);
  for (Mask c = 0; c <= full_mask(n); ++c) out[c] = stab_purity(t, {c, n});
  return out;
}

}  // namespace lsshadow
