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

// Dense state-vector simulation of qubit registers.
//
// Basis index convention: bit i of the integer index is the computational
// value of site i+1. Two-site gate matrices act on the local index a0 + 2 a1
// where a0 is the bit of the first listed site.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lsshadow/core.hpp"
#include "lsshadow/pauli.hpp"
#include "lsshadow/region.hpp"
#include "lsshadow/rng.hpp"

namespace lsshadow {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

inline constexpr double kNormTolerance = 1e-10;

struct PureState {
  int n_sites = 0;
  CVector amps;

  PureState() = default;
  PureState(int n, CVector a) : n_sites(n), amps(std::move(a)) {
    require_sites(n);
    require(amps.size() == (Eigen::Index{1} << n), "amplitude vector must have length 2^N");
  }
  Eigen::Index dim() const noexcept { return amps.size(); }
  void check_normalized(double tol = kNormTolerance) const {
    const double norm2 = amps.squaredNorm();
    if (!(std::abs(norm2 - 1.0) <= tol)) throw StateError("state norm^2 = " + std::to_string(norm2) + " != 1");
  }
};

/// Operator on N qudits of local dimension local_dim. Reconstructed matrices
/// need not be positive.
struct DensityMatrix {
  int n_sites = 0;
  int local_dim = 2;
  CMatrix m;

  DensityMatrix() = default;
  DensityMatrix(int n, CMatrix mat, int d = 2) : n_sites(n), local_dim(d), m(std::move(mat)) {
    require_sites(n);
    require(d >= 2, "local dimension must be >= 2");
    const double dim = std::pow(static_cast<double>(d), n);
    require(m.rows() == m.cols() && static_cast<double>(m.rows()) == dim, "density matrix must be d^N x d^N");
  }
  static DensityMatrix from_pure(const PureState& s) { return {s.n_sites, s.amps * s.amps.adjoint()}; }
  Complex trace() const { return m.trace(); }
  bool is_hermitian(double tol = kNormTolerance) const { return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol; }
};

// ---------------------------------------------------------------- gates

inline void apply_single(CVector& psi, int q, const Mat2& g) {
  const Eigen::Index bit = Eigen::Index{1} << q;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (i & bit) continue;
    const Complex a0 = psi[i];
    const Complex a1 = psi[i | bit];
    psi[i] = g(0, 0) * a0 + g(0, 1) * a1;
    psi[i | bit] = g(1, 0) * a0 + g(1, 1) * a1;
  }
}

inline void apply_two(CVector& psi, int q0, int q1, const Mat4& g) {
  const Eigen::Index b0 = Eigen::Index{1} << q0;
  const Eigen::Index b1 = Eigen::Index{1} << q1;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if ((i & b0) || (i & b1)) continue;
    const Eigen::Index idx[4] = {i, i | b0, i | b1, i | b0 | b1};
    const Complex a[4] = {psi[idx[0]], psi[idx[1]], psi[idx[2]], psi[idx[3]]};
    for (int r = 0; r < 4; ++r) {
      psi[idx[r]] = g(r, 0) * a[0] + g(r, 1) * a[1] + g(r, 2) * a[2] + g(r, 3) * a[3];
    }
  }
}

inline void apply_cnot(CVector& psi, int control, int target) {
  const Eigen::Index c = Eigen::Index{1} << control;
  const Eigen::Index t = Eigen::Index{1} << target;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if ((i & c) && !(i & t)) std::swap(psi[i], psi[i | t]);
  }
}

inline Mat2 hadamard_matrix() {
  const double s = 1.0 / std::sqrt(2.0);
  Mat2 h;
  h << s, s, s, -s;
  return h;
}

inline Mat2 phase_matrix() {
  Mat2 m;
  m << 1, 0, 0, Complex(0, 1);
  return m;
}

/// Dense matrix of a Pauli string including its phase.
inline CMatrix pauli_matrix(const PauliString& p) {
  const Eigen::Index dim = Eigen::Index{1} << p.n_sites;
  CMatrix out = CMatrix::Zero(dim, dim);
  static const Complex kI[4] = {1.0, Complex(0, 1), -1.0, Complex(0, -1)};
  const int base = p.phase + popcount(p.x & p.z);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const int sgn = popcount(p.z & static_cast<Mask>(b)) & 1;
    out(b ^ p.x, b) = kI[(base + 2 * sgn) % 4];
  }
  return out;
}

// ---------------------------------------------------------------- random matrices

inline CMatrix ginibre(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix a(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) a(i, j) = Complex(normal(rng), normal(rng));
  return a;
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of the
/// R diagonal divided out.
inline CMatrix sample_haar_unitary(int dim, Rng& rng) {
  require(dim >= 1, "unitary dimension must be >= 1");
  const CMatrix a = ginibre(dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(a);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    q.col(j) *= mag > 0 ? rjj / mag : Complex(1.0);
  }
  return q;
}

/// GUE sample (A + A^dagger) / sqrt(8) with A standard complex Gaussian.
inline CMatrix sample_gue(int dim, Rng& rng) {
  const CMatrix a = ginibre(dim, rng);
  return (a + a.adjoint()) / std::sqrt(8.0);
}

// ---------------------------------------------------------------- Hamiltonians

/// Embeds a 4x4 operator acting on sites (q0, q1) into the full 2^N space.
inline CMatrix embed_two_site(const CMatrix& h, int q0, int q1, int n_sites) {
  require(h.rows() == 4 && h.cols() == 4, "two-site operator must be 4x4");
  require(q0 != q1, "two-site operator needs distinct sites");
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  const Mask m0 = Mask{1} << q0, m1 = Mask{1} << q1;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Mask c = static_cast<Mask>(col);
    const int lc = ((c & m0) ? 1 : 0) + ((c & m1) ? 2 : 0);
    const Mask rest = c & ~(m0 | m1);
    for (int lr = 0; lr < 4; ++lr) {
      const Mask r = rest | ((lr & 1) ? m0 : 0) | ((lr & 2) ? m1 : 0);
      out(r, col) += h(lr, lc);
    }
  }
  return out;
}

/// H = sum_i H_{i,i+1}, each term an independent 4x4 GUE sample.
inline CMatrix build_gue2_hamiltonian(int n_sites, bool periodic, Rng& rng) {
  require(n_sites >= 2, "GUE2 needs at least two sites");
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  CMatrix h = CMatrix::Zero(dim, dim);
  const int bonds = (periodic && n_sites > 2) ? n_sites : n_sites - 1;
  for (int i = 0; i < bonds; ++i) h += embed_two_site(sample_gue(4, rng), i, (i + 1) % n_sites, n_sites);
  return h;
}

/// Frozen nearest-neighbour couplings of one disordered Ising instance,
/// J_ij ~ Uni[J/2, 3J/2] on a periodic chain.
struct IsingCouplings {
  int n_sites = 0;
  std::vector<double> bond;  // bond i couples (i, i+1 mod N)

  static IsingCouplings sample(int n_sites, double mean_j, Rng& rng) {
    require(n_sites >= 2, "Ising chain needs at least two sites");
    require(std::isfinite(mean_j), "J must be finite");
    std::uniform_real_distribution<double> uni(0.5 * mean_j, 1.5 * mean_j);
    IsingCouplings c{n_sites, {}};
    const int bonds = n_sites > 2 ? n_sites : 1;
    for (int i = 0; i < bonds; ++i) c.bond.push_back(mean_j == 0.0 ? 0.0 : uni(rng));
    return c;
  }
};

/// H_t = sum J_ij X_i X_j + h sum_i (cos(theta) X_i + sin(theta) Y_i).
inline CMatrix build_dqim_hamiltonian(const IsingCouplings& c, double field, double theta) {
  const int n = c.n_sites;
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix h = CMatrix::Zero(dim, dim);
  const Complex e_minus = std::polar(1.0, -theta);
  const Complex e_plus = std::polar(1.0, theta);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Mask b = static_cast<Mask>(col);
    for (std::size_t i = 0; i < c.bond.size(); ++i) {
      const int j = (static_cast<int>(i) + 1) % n;
      h(b ^ (Mask{1} << i) ^ (Mask{1} << j), col) += c.bond[i];
    }
    // cos X + sin Y maps |0> -> e^{i theta}|1>, |1> -> e^{-i theta}|0>.
    for (int q = 0; q < n; ++q) {
      const bool up = (b >> q) & 1U;
      h(b ^ (Mask{1} << q), col) += field * (up ? e_minus : e_plus);
    }
  }
  return h;
}

struct RydbergParams {
  double omega = 2.75;
  double delta = 1.0;
  double blockade_radius = 1.0;
  double spacing = 1.0;
};

/// H = Omega/2 sum X_i - Delta sum Z_i + Omega sum_{i<j} (R_b / (a|i-j|))^6 Z_i Z_j,
/// open chain, full 1/r^6 tail.
inline CMatrix build_rydberg_hamiltonian(int n_sites, const RydbergParams& p) {
  require(std::isfinite(p.omega) && std::isfinite(p.delta) && std::isfinite(p.blockade_radius) &&
              std::isfinite(p.spacing) && p.spacing > 0,
          "Rydberg parameters must be finite with a > 0");
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Mask b = static_cast<Mask>(col);
    double diag = 0.0;
    for (int i = 0; i < n_sites; ++i) {
      const double zi = ((b >> i) & 1U) ? -1.0 : 1.0;
      diag -= p.delta * zi;
      for (int j = i + 1; j < n_sites; ++j) {
        const double zj = ((b >> j) & 1U) ? -1.0 : 1.0;
        const double r = p.blockade_radius / (p.spacing * (j - i));
        diag += p.omega * std::pow(r, 6) * zi * zj;
      }
      h(b ^ (Mask{1} << i), col) += 0.5 * p.omega;
    }
    h(col, col) += diag;
  }
  return h;
}

// ---------------------------------------------------------------- time evolution

inline double hermiticity_defect(const CMatrix& h) { return (h - h.adjoint()).cwiseAbs().maxCoeff(); }

/// Eigendecomposition of a Hermitian generator, reusable for many times T.
class HermitianEvolution {
 public:
  explicit HermitianEvolution(const CMatrix& h, double tol = kNormTolerance) {
    require(h.rows() == h.cols(), "Hamiltonian must be square");
    const double defect = hermiticity_defect(h);
    if (defect > tol * std::max(1.0, h.cwiseAbs().maxCoeff()))
      throw StateError("Hamiltonian is not Hermitian (defect " + std::to_string(defect) + ")");
    const CMatrix herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
    if (es.info() != Eigen::Success) throw StateError("Hermitian eigensolver failed");
    values_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
  }

  /// e^{-iHT}; eigenphases have unit modulus so the result is unitary to rounding.
  CMatrix unitary(double t) const {
    CVector phases(values_.size());
    for (Eigen::Index k = 0; k < values_.size(); ++k) phases[k] = std::polar(1.0, -values_[k] * t);
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
  }

  const Eigen::VectorXd& eigenvalues() const noexcept { return values_; }
  const CMatrix& eigenvectors() const noexcept { return vectors_; }

 private:
  Eigen::VectorXd values_;
  CMatrix vectors_;
};

inline CMatrix evolve(const CMatrix& h, double t) {
  require(std::isfinite(t), "evolution time must be finite");
  return HermitianEvolution(h).unitary(t);
}

inline double unitarity_defect(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------- states

inline PureState basis_state(int n_sites, Mask b) {
  require_sites(n_sites);
  require(b <= full_mask(n_sites), "basis index exceeds 2^N");
  CVector a = CVector::Zero(Eigen::Index{1} << n_sites);
  a[b] = 1.0;
  return {n_sites, std::move(a)};
}

/// (|0...0> + sign |1...1>) / sqrt(2).
inline PureState ghz_state(int n_sites, int sign = +1) {
  require_sites(n_sites);
  CVector a = CVector::Zero(Eigen::Index{1} << n_sites);
  a[0] = 1.0 / std::sqrt(2.0);
  a[full_mask(n_sites)] += static_cast<double>(sign) / std::sqrt(2.0);
  return {n_sites, std::move(a)};
}

inline PureState random_haar_state(int n_sites, Rng& rng) {
  require_sites(n_sites);
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector a(Eigen::Index{1} << n_sites);
  for (auto& v : a) v = Complex(normal(rng), normal(rng));
  a.normalize();
  return {n_sites, std::move(a)};
}

/// rho = (1-p) |GHZ+><GHZ+| + p |GHZ-><GHZ-|.
inline DensityMatrix z_error_ghz_density(int n_sites, double p) {
  require(p >= 0.0 && p <= 1.0, "error probability must lie in [0, 1]");
  const PureState plus = ghz_state(n_sites, +1), minus = ghz_state(n_sites, -1);
  return {n_sites, (1.0 - p) * plus.amps * plus.amps.adjoint() + p * minus.amps * minus.amps.adjoint()};
}

/// Born-rule sample of a computational basis outcome.
inline Mask sample_outcome(const CVector& psi, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double total = psi.squaredNorm();
  double u = uni(rng) * total;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    u -= std::norm(psi[i]);
    if (u < 0.0) return static_cast<Mask>(i);
  }
  for (Eigen::Index i = psi.size() - 1; i >= 0; --i)
    if (std::norm(psi[i]) > 0.0) return static_cast<Mask>(i);
  return 0;
}

// ---------------------------------------------------------------- subsystem purity

/// Tr(rho_C^2) for a pure state, from the Gram matrix of the smaller side.
inline double subsystem_purity(const CVector& psi, int n_sites, Mask region) {
  const int k = popcount(region);
  if (k == 0 || k == n_sites) return psi.squaredNorm() * psi.squaredNorm();
  const Mask comp = full_mask(n_sites) & ~region;
  CMatrix x(Eigen::Index{1} << k, Eigen::Index{1} << (n_sites - k));
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    Eigen::Index row = 0, col = 0;
    int ri = 0, ci = 0;
    for (int s = 0; s < n_sites; ++s) {
      const Eigen::Index bit = (b >> s) & 1;
      if ((region >> s) & 1U) row |= bit << ri++;
      else col |= bit << ci++;
    }
    x(row, col) = psi[b];
  }
  (void)comp;
  if (x.rows() <= x.cols()) {
    const CMatrix g = x * x.adjoint();
    return g.squaredNorm();
  }
  const CMatrix g = x.adjoint() * x;
  return g.squaredNorm();
}

inline double subsystem_purity(const PureState& s, Region c) {
  require(c.n_sites == s.n_sites, "region/state size mismatch");
  return subsystem_purity(s.amps, s.n_sites, c.bits);
}

/// Purities of every region, using Tr rho_C^2 = Tr rho_{C-bar}^2.
inline LatticeVector all_subsystem_purities(const CVector& psi, int n_sites) {
  LatticeVector out(n_sites);
  const Mask full = full_mask(n_sites);
  for (Mask c = 0; c <= full; ++c) {
    const Mask comp = full & ~c;
    const int k = popcount(c);
    const bool compute_here = 2 * k < n_sites || (2 * k == n_sites && c < comp);
    if (!compute_here) continue;
    const double p = subsystem_purity(psi, n_sites, c);
    out[c] = p;
    out[comp] = p;
  }
  return out;
}

// ---------------------------------------------------------------- Pauli expectations

/// In-place Walsh-Hadamard transform: out[z] = sum_b (-1)^{z.b} in[b].
template <typename T>
void walsh_hadamard(std::vector<T>& v) {
  for (std::size_t h = 1; h < v.size(); h <<= 1) {
    for (std::size_t i = 0; i < v.size(); i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const T a = v[j], b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

/// <psi| sigma(x, z) |psi> for every z at fixed X-mask x, where sigma is the
/// Hermitian Pauli with Y = iXZ on sites in x & z. Cost O(N 2^N).
inline std::vector<double> x_class_expectations(const CVector& psi, int n_sites, Mask x) {
  const std::size_t dim = std::size_t{1} << n_sites;
  std::vector<Complex> f(dim);
  for (std::size_t b = 0; b < dim; ++b) f[b] = std::conj(psi[static_cast<Eigen::Index>(b ^ x)]) * psi[static_cast<Eigen::Index>(b)];
  walsh_hadamard(f);
  static const Complex kI[4] = {1.0, Complex(0, 1), -1.0, Complex(0, -1)};
  std::vector<double> out(dim);
  for (std::size_t z = 0; z < dim; ++z) out[z] = (kI[popcount(x & static_cast<Mask>(z)) % 4] * f[z]).real();
  return out;
}

inline double pauli_expectation(const CVector& psi, const PauliString& p) {
  require(psi.size() == (Eigen::Index{1} << p.n_sites), "state/Pauli size mismatch");
  require(p.is_hermitian(), "expectation requires a Hermitian Pauli string");
  Complex acc = 0.0;
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    const Mask bm = static_cast<Mask>(b);
    const double sgn = (popcount(p.z & bm) & 1) ? -1.0 : 1.0;
    acc += std::conj(psi[bm ^ p.x]) * psi[b] * sgn;
  }
  static const Complex kI[4] = {1.0, Complex(0, 1), -1.0, Complex(0, -1)};
  return (kI[(p.phase + popcount(p.x & p.z)) % 4] * acc).real();
}

/// All 4^N Pauli expectations, index x * 2^N + z.
inline std::vector<double> pauli_spectrum(const CVector& psi, int n_sites) {
  require(n_sites <= 12, "full Pauli spectrum limited to N <= 12");
  const std::size_t dim = std::size_t{1} << n_sites;
  std::vector<double> out(dim * dim);
  for (Mask x = 0; x < dim; ++x) {
    const auto row = x_class_expectations(psi, n_sites, x);
    std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(x * dim));
  }
  return out;
}

// ---------------------------------------------------------------- reduced operators

/// rho_B = (Tr_{B-bar} rho) (x) 1_{B-bar} / d^{|B-bar|}, embedded in the full space.
inline CMatrix reduce_embed(const CMatrix& rho, int n_sites, int d, Mask region) {
  const Eigen::Index dim = rho.rows();
  // Split each index into (digits on B, digits on B-bar) packed as integers.
  std::vector<Eigen::Index> in_part(static_cast<std::size_t>(dim)), out_part(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::Index rem = i, a = 0, k = 0, wa = 1, wk = 1;
    for (int s = 0; s < n_sites; ++s) {
      const Eigen::Index digit = rem % d;
      rem /= d;
      if ((region >> s) & 1U) {
        a += digit * wa;
        wa *= d;
      } else {
        k += digit * wk;
        wk *= d;
      }
    }
    in_part[static_cast<std::size_t>(i)] = a;
    out_part[static_cast<std::size_t>(i)] = k;
  }
  const int kin = popcount(region);
  Eigen::Index din = 1;
  for (int s = 0; s < kin; ++s) din *= d;
  const Eigen::Index dout = dim / din;
  CMatrix reduced = CMatrix::Zero(din, din);
  std::vector<std::vector<Eigen::Index>> classes(static_cast<std::size_t>(dout));
  for (Eigen::Index i = 0; i < dim; ++i) classes[static_cast<std::size_t>(out_part[static_cast<std::size_t>(i)])].push_back(i);
  for (const auto& cls : classes)
    for (Eigen::Index i : cls)
      for (Eigen::Index j : cls)
        reduced(in_part[static_cast<std::size_t>(i)], in_part[static_cast<std::size_t>(j)]) += rho(i, j);
  CMatrix out = CMatrix::Zero(dim, dim);
  const double scale = 1.0 / static_cast<double>(dout);
  for (const auto& cls : classes)
    for (Eigen::Index i : cls)
      for (Eigen::Index j : cls)
        out(i, j) = scale * reduced(in_part[static_cast<std::size_t>(i)], in_part[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace lsshadow
