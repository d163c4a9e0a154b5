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

#pragma once

#include <string>
#include <string_view>

#include "lsshadow/core.hpp"

namespace lsshadow {

/// i^phase times a tensor product of single-site Paulis. Site j carries
/// I, X, Z or Y according to (x_j, z_j) = (0,0), (1,0), (0,1), (1,1).
struct PauliString {
  int n_sites = 0;
  Mask x = 0;
  Mask z = 0;
  int phase = 0;  // exponent of i, mod 4

  PauliString() = default;
  PauliString(int n, Mask xs, Mask zs, int ph = 0) : n_sites(n), x(xs), z(zs), phase(((ph % 4) + 4) % 4) {
    require_sites(n);
    require(xs <= full_mask(n) && zs <= full_mask(n), "Pauli masks exceed N sites");
  }

  static PauliString identity(int n) { return {n, 0, 0, 0}; }

  /// Parses "+ZZII", "-XYZ", "+iX", "-iZ" or a bare "ZZI" (first character is site 1).
  static PauliString parse(std::string_view text) {
    int ph = 0;
    std::size_t pos = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      ph = text[pos] == '-' ? 2 : 0;
      ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
      ph += 1;
      ++pos;
    }
    const std::string_view body = text.substr(pos);
    require(!body.empty(), "empty Pauli string");
    const int n = static_cast<int>(body.size());
    require_sites(n);
    Mask xs = 0, zs = 0;
    for (int j = 0; j < n; ++j) {
      const Mask bit = Mask{1} << j;
      switch (body[static_cast<std::size_t>(j)]) {
        case 'I': case '_': break;
        case 'X': xs |= bit; break;
        case 'Z': zs |= bit; break;
        case 'Y': xs |= bit; zs |= bit; break;
        default: throw ParameterError("invalid Pauli character in '" + std::string(text) + "'");
      }
    }
    return {n, xs, zs, ph};
  }

  std::string str() const {
    static constexpr const char* kPrefix[4] = {"+", "+i", "-", "-i"};
    std::string out = kPrefix[phase];
    for (int j = 0; j < n_sites; ++j) out.push_back("IXZY"[((x >> j) & 1U) + 2 * ((z >> j) & 1U)]);
    return out;
  }

  Mask support() const noexcept { return x | z; }
  int weight() const noexcept { return popcount(support()); }
  bool is_identity() const noexcept { return support() == 0; }
  bool is_hermitian() const noexcept { return (phase & 1) == 0; }
  /// +1 or -1 for Hermitian strings.
  int sign() const noexcept { return phase == 2 ? -1 : 1; }
  PauliString unsigned_copy() const { return {n_sites, x, z, 0}; }
  bool operator==(const PauliString&) const = default;
};

inline bool commutes(const PauliString& a, const PauliString& b) noexcept {
  return ((popcount(a.x & b.z) + popcount(a.z & b.x)) & 1) == 0;
}

/// Exponent g with sigma(x1,z1) sigma(x2,z2) = i^g sigma(x1^x2, z1^z2).
inline int pauli_product_exponent(int x1, int z1, int x2, int z2) noexcept {
  if (x1 == 0 && z1 == 0) return 0;
  if (x1 == 1 && z1 == 1) return z2 - x2;
  if (x1 == 1) return z2 * (2 * x2 - 1);
  return x2 * (1 - 2 * z2);
}

inline PauliString operator*(const PauliString& a, const PauliString& b) {
  require(a.n_sites == b.n_sites, "Pauli size mismatch");
  int g = a.phase + b.phase;
  for (int j = 0; j < a.n_sites; ++j) {
    g += pauli_product_exponent((a.x >> j) & 1, (a.z >> j) & 1, (b.x >> j) & 1, (b.z >> j) & 1);
  }
  return {a.n_sites, a.x ^ b.x, a.z ^ b.z, g};
}

}  // namespace lsshadow
