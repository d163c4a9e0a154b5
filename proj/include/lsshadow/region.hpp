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

// Subset-lattice arithmetic over the power set of N sites.
//
// A region is an N-bit mask; bit i set means site i+1 belongs to the region.
// Vectors indexed by regions (entanglement features, reconstruction
// coefficients) are stored densely with index == mask. Every transform here is
// a tensor product of 2x2 per-site kernels and runs in O(N 2^N).

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "lsshadow/core.hpp"

namespace lsshadow {

struct Region {
  Mask bits = 0;
  int n_sites = 0;

  Region() = default;
  Region(Mask b, int n) : bits(b), n_sites(n) {
    require_sites(n);
    require(b <= full_mask(n), "region mask exceeds 2^N");
  }

  static Region empty(int n) { return {0, n}; }
  static Region full(int n) { return {full_mask(n), n}; }

  int size() const noexcept { return popcount(bits); }
  bool contains(int site) const noexcept { return (bits >> site) & 1U; }
  Region complement() const { return {full_mask(n_sites) & ~bits, n_sites}; }
  bool operator==(const Region&) const = default;
};

inline int symdiff_size(Mask a, Mask b) noexcept { return popcount(a ^ b); }
inline bool is_subset(Mask a, Mask b) noexcept { return (a & ~b) == 0; }

/// Real vector with one entry per region of an N-site system.
class LatticeVector {
 public:
  LatticeVector() = default;
  explicit LatticeVector(int n_sites, double fill = 0.0)
      : n_sites_(n_sites), values_((require_sites(n_sites), std::size_t{1} << n_sites), fill) {}
  LatticeVector(int n_sites, std::vector<double> values) : n_sites_(n_sites), values_(std::move(values)) {
    require_sites(n_sites);
    require(values_.size() == (std::size_t{1} << n_sites), "LatticeVector length must be 2^N");
  }

  int n_sites() const noexcept { return n_sites_; }
  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](Mask m) { return values_[m]; }
  double operator[](Mask m) const { return values_[m]; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& raw() const noexcept { return values_; }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  LatticeVector& operator+=(const LatticeVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  LatticeVector& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }
  friend LatticeVector operator+(LatticeVector a, const LatticeVector& b) { return a += b; }
  friend LatticeVector operator*(double s, LatticeVector a) { return a *= s; }

  double dot(const LatticeVector& o) const {
    check_same(o);
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * o.values_[i];
    return s;
  }
  double sum() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
  }

 private:
  void check_same(const LatticeVector& o) const {
    require(o.n_sites_ == n_sites_, "LatticeVector size mismatch");
  }

  int n_sites_ = 0;
  std::vector<double> values_;
};

/// 2x2 kernel K[out][in] acting on the membership bit of one site.
using SiteKernel = std::array<std::array<double, 2>, 2>;

/// out[..c..] = sum_{c'} K_i[c][c'] v[..c'..] for every site i.
inline LatticeVector apply_site_kernels(LatticeVector v, std::span<const SiteKernel> kernels) {
  const int n = v.n_sites();
  require(static_cast<int>(kernels.size()) == n, "one kernel per site required");
  auto vals = v.values();
  for (int site = 0; site < n; ++site) {
    const Mask bit = Mask{1} << site;
    const SiteKernel& k = kernels[site];
    for (Mask m = 0; m < vals.size(); ++m) {
      if (m & bit) continue;
      const double lo = vals[m];
      const double hi = vals[m | bit];
      vals[m] = k[0][0] * lo + k[0][1] * hi;
      vals[m | bit] = k[1][0] * lo + k[1][1] * hi;
    }
  }
  return v;
}

inline LatticeVector apply_site_kernel(LatticeVector v, const SiteKernel& kernel) {
  std::vector<SiteKernel> ks(static_cast<std::size_t>(v.n_sites()), kernel);
  return apply_site_kernels(std::move(v), ks);
}

/// out[A] = sum_{S subset of A} v[S].
inline LatticeVector subset_sum(LatticeVector v) { return apply_site_kernel(std::move(v), {{{1, 0}, {1, 1}}}); }
/// Inverse of subset_sum.
inline LatticeVector subset_sum_inverse(LatticeVector v) {
  return apply_site_kernel(std::move(v), {{{1, 0}, {-1, 1}}});
}
/// out[A] = sum_{S superset of A} v[S].
inline LatticeVector superset_sum(LatticeVector v) { return apply_site_kernel(std::move(v), {{{1, 1}, {0, 1}}}); }
/// Inverse of superset_sum.
inline LatticeVector superset_sum_inverse(LatticeVector v) {
  return apply_site_kernel(std::move(v), {{{1, -1}, {0, 1}}});
}

/// out[C] = sum_D (-1/d)^{|C xor D|} v[D].
inline LatticeVector weighted_symdiff_transform(LatticeVector v, int d) {
  require(d >= 2, "local dimension d must be >= 2");
  const double x = -1.0 / d;
  return apply_site_kernel(std::move(v), {{{1, x}, {x, 1}}});
}

/// Weingarten function of two regions, (d^2-1)^{-N} (-1/d)^{|A xor B|}.
inline double weingarten(Region a, Region b, int d, int n_sites) {
  require(d >= 2, "local dimension d must be >= 2");
  require_sites(n_sites);
  require(a.bits <= full_mask(n_sites) && b.bits <= full_mask(n_sites), "region outside 2^N");
  const double dd = static_cast<double>(d);
  return std::pow(dd * dd - 1.0, -n_sites) * ipow(-1.0 / dd, symdiff_size(a.bits, b.bits));
}

/// Per-site fusion tensor f[a][b][c].
inline std::array<std::array<std::array<double, 2>, 2>, 2> fusion_site_tensor(int d) {
  require(d >= 2, "local dimension d must be >= 2");
  const double dd = d;
  const double s = dd * dd - 1.0;
  std::array<std::array<std::array<double, 2>, 2>, 2> f{};
  f[0][0] = {dd, 0.0};
  f[0][1] = {0.0, 0.0};
  f[1][0] = {dd * dd * dd / s, -dd * dd / s};
  f[1][1] = {-dd / s, dd * dd / s};
  return f;
}

/// Fusion coefficient f_{A,B,C} as the product of per-site factors.
inline double fusion_coeff(Region a, Region b, Region c, int d) {
  require(a.n_sites == b.n_sites && b.n_sites == c.n_sites, "regions must share N");
  const auto f = fusion_site_tensor(d);
  double out = 1.0;
  for (int i = 0; i < a.n_sites; ++i) {
    out *= f[a.contains(i)][b.contains(i)][c.contains(i)];
    if (out == 0.0) return 0.0;
  }
  return out;
}

/// Kernel mapping W (indexed by C) to the B-indexed row for fixed a_i.
inline SiteKernel fusion_kernel(int d, bool a_bit) {
  const auto f = fusion_site_tensor(d);
  const int a = a_bit ? 1 : 0;
  return {{{f[a][0][0], f[a][0][1]}, {f[a][1][0], f[a][1][1]}}};
}

}  // namespace lsshadow
