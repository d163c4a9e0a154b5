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

// Reconstruction coefficients, the measurement channel and its inverse.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lsshadow/core.hpp"
#include "lsshadow/dense.hpp"
#include "lsshadow/region.hpp"

namespace lsshadow {

enum class ReconSource { dense_solve, closed_form, analytic_two_qudit, limit };

inline std::string to_string(ReconSource s) {
  switch (s) {
    case ReconSource::dense_solve: return "dense-solve";
    case ReconSource::closed_form: return "closed-form";
    case ReconSource::analytic_two_qudit: return "analytic-two-qudit";
    case ReconSource::limit: return "limit";
  }
  return "?";
}

inline constexpr double kMaxCondition = 1e10;

struct ReconVector {
  LatticeVector r;
  int d = 2;
  ReconSource source = ReconSource::dense_solve;
  double residual = 0.0;
  double condition = std::numeric_limits<double>::quiet_NaN();

  int n_sites() const noexcept { return r.n_sites(); }
  /// |sum_A r_A - d^{-N}|.
  double trace_defect() const { return std::abs(r.sum() - std::pow(static_cast<double>(d), -n_sites())); }
};

inline void check_ef(const LatticeVector& w) {
  require(w.all_finite(), "entanglement feature has non-finite entries");
  const Mask full = full_mask(w.n_sites());
  require(std::abs(w[0] - 1.0) < 1e-6 && std::abs(w[full] - 1.0) < 1e-6,
          "entanglement feature must satisfy W[empty] = W[all] = 1");
}

/// Column A of M is the site-kernel transform of W with kernels f[a_i][.][.].
inline Eigen::MatrixXd recon_matrix(const LatticeVector& w, int d) {
  const int n = w.n_sites();
  const std::size_t len = w.size();
  const SiteKernel k0 = fusion_kernel(d, false), k1 = fusion_kernel(d, true);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(len));
  std::vector<SiteKernel> ks(static_cast<std::size_t>(n));
  for (Mask a = 0; a < len; ++a) {
    for (int i = 0; i < n; ++i) ks[static_cast<std::size_t>(i)] = ((a >> i) & 1U) ? k1 : k0;
    const LatticeVector col = apply_site_kernels(w, ks);
    for (Mask b = 0; b < len; ++b) m(b, a) = col[b];
  }
  return m;
}

/// max_B |(M r)_B - delta_{B, all}|.
inline double recon_residual(const LatticeVector& w, const LatticeVector& r, int d) {
  const Eigen::MatrixXd m = recon_matrix(w, d);
  Eigen::VectorXd rv = Eigen::Map<const Eigen::VectorXd>(r.raw().data(), static_cast<Eigen::Index>(r.size()));
  Eigen::VectorXd res = m * rv;
  res[res.size() - 1] -= 1.0;
  return res.cwiseAbs().maxCoeff();
}

inline ReconVector solve_recon_dense(const LatticeVector& w, int d) {
  require(d >= 2, "local dimension d must be >= 2");
  check_ef(w);
  const Eigen::MatrixXd m = recon_matrix(w, d);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double rcond = lu.rcond();
  // The rcond estimator can miss exact zero pivots; the pivot spread catches them.
  const Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
  const double spread = piv.minCoeff() > 0 ? piv.maxCoeff() / piv.minCoeff() : std::numeric_limits<double>::infinity();
  const double cond = rcond > 0 ? std::max(1.0 / rcond, spread) : std::numeric_limits<double>::infinity();
  if (!std::isfinite(cond) || cond > kMaxCondition)
    throw SingularEnsembleError("reconstruction system is singular (condition estimate " + std::to_string(cond) +
                                    "); the ensemble is not tomographically complete",
                                cond);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.rows());
  rhs[rhs.size() - 1] = 1.0;
  const Eigen::VectorXd sol = lu.solve(rhs);
  ReconVector out;
  out.r = LatticeVector(w.n_sites(), std::vector<double>(sol.data(), sol.data() + sol.size()));
  out.d = d;
  out.source = ReconSource::dense_solve;
  out.residual = (m * sol - rhs).cwiseAbs().maxCoeff();
  out.condition = cond;
  return out;
}

/// Qubit closed form r_A = ((-1)^{|A|} / 2^N) sum_{S >= A} 3^{|S|} / den_S,
/// den_S = sum_{B <= S} (-2)^{|B|} W_B.
inline ReconVector solve_recon_closed_form(const LatticeVector& w, bool with_residual = true) {
  check_ef(w);
  const int n = w.n_sites();
  LatticeVector signed_w(n);
  for (Mask b = 0; b < w.size(); ++b) signed_w[b] = ipow(-2.0, popcount(b)) * w[b];
  const LatticeVector den = subset_sum(signed_w);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  LatticeVector term(n);
  for (Mask s = 0; s < w.size(); ++s) {
    const double a = std::abs(den[s]);
    if (!(a > 1e-12))
      throw SingularEnsembleError("closed-form denominator vanishes for region mask " + std::to_string(s),
                                  std::numeric_limits<double>::infinity());
    lo = std::min(lo, a);
    hi = std::max(hi, a);
    term[s] = ipow(3.0, popcount(s)) / den[s];
  }
  LatticeVector r = superset_sum(term);
  const double scale = std::ldexp(1.0, -n);
  for (Mask a = 0; a < r.size(); ++a) r[a] *= ((popcount(a) & 1) ? -scale : scale);
  ReconVector out;
  out.r = std::move(r);
  out.d = 2;
  out.source = ReconSource::closed_form;
  out.condition = hi / lo;
  out.residual = with_residual && n <= 12 ? recon_residual(w, out.r, 2) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

/// Two-qudit closed form for W = (1, w, w, 1).
inline ReconVector two_qudit_analytic_r(double w, int d) {
  require(d >= 2, "local dimension d must be >= 2");
  const double dd = d;
  const double s1 = dd * w - 1.0;
  const double s2 = dd * dd - 2.0 * dd * w + 1.0;
  if (std::abs(s1) < 1e-12 || std::abs(s2) < 1e-12)
    throw SingularEnsembleError("two-qudit coefficients singular at w = " + std::to_string(w),
                                std::numeric_limits<double>::infinity());
  const double r0 = (dd * dd * dd * w - 3 * dd * dd + 3 * dd * w - 2 * w * w + 1) / (s1 * s2);
  const double r1 = (-dd * dd * dd * dd * w + 2 * dd * dd * dd - 2 * dd + w) / (dd * s1 * s2);
  const double r3 = (dd * dd - 1) * (dd * dd - 1) / (dd * dd * s2);
  ReconVector out;
  out.r = LatticeVector(2, {r0, r1, r1, r3});
  out.d = d;
  out.source = ReconSource::analytic_two_qudit;
  out.residual = recon_residual(LatticeVector(2, {1.0, w, w, 1.0}), out.r, d);
  return out;
}

/// Global 2-design map (d^N + 1) sigma - 1.
inline ReconVector global_haar_r(int n, int d = 2) {
  const double dim = std::pow(static_cast<double>(d), n);
  LatticeVector r(n);
  r[0] = -1.0;
  r[full_mask(n)] += (dim + 1.0) / dim;
  return {r, d, ReconSource::limit, 0.0, 1.0};
}

/// On-site 2-design map, tensor product of (d+1) sigma_i - 1.
inline ReconVector local_haar_r(int n, int d = 2) {
  LatticeVector r(n);
  for (Mask a = 0; a <= full_mask(n); ++a) {
    const int k = popcount(a);
    r[a] = (((n - k) & 1) ? -1.0 : 1.0) * ipow((d + 1.0) / d, k);
  }
  return {r, d, ReconSource::limit, 0.0, 1.0};
}

// ---------------------------------------------------------------- channel and inverse

/// sigma = sum_B c_B rho_B with c_B = d^{2N-|B|} (d^2-1)^{-N} sum_C (-1/d)^{|B xor C|} W_C.
inline DensityMatrix apply_measurement_channel(const DensityMatrix& rho, const LatticeVector& w) {
  const int n = rho.n_sites, d = rho.local_dim;
  require(w.n_sites() == n, "EF/state size mismatch");
  require(n <= 8, "dense channel limited to N <= 8");
  const LatticeVector g = weighted_symdiff_transform(w, d);
  const double pref = std::pow(static_cast<double>(d) * d - 1.0, -n);
  CMatrix out = CMatrix::Zero(rho.m.rows(), rho.m.cols());
  for (Mask b = 0; b <= full_mask(n); ++b) {
    const double c = pref * ipow(d, 2 * n - popcount(b)) * g[b];
    if (c != 0.0) out += c * reduce_embed(rho.m, n, d, b);
  }
  return {n, out, d};
}

/// Same channel by the explicit double sum over (B, C) of Weingarten weights.
inline DensityMatrix apply_measurement_channel_naive(const DensityMatrix& rho, const LatticeVector& w) {
  const int n = rho.n_sites, d = rho.local_dim;
  require(n <= 4, "naive channel limited to N <= 4");
  CMatrix out = CMatrix::Zero(rho.m.rows(), rho.m.cols());
  for (Mask b = 0; b <= full_mask(n); ++b) {
    double c = 0.0;
    for (Mask cm = 0; cm <= full_mask(n); ++cm) c += weingarten({b, n}, {cm, n}, d, n) * w[cm];
    out += ipow(d, 2 * n - popcount(b)) * c * reduce_embed(rho.m, n, d, b);
  }
  return {n, out, d};
}

/// rho = d^N sum_A r_A sigma_A.
inline DensityMatrix apply_reconstruction(const DensityMatrix& sigma, const ReconVector& r) {
  const int n = sigma.n_sites, d = sigma.local_dim;
  require(r.n_sites() == n && r.d == d, "reconstruction/state size mismatch");
  const double dn = std::pow(static_cast<double>(d), n);
  CMatrix out = CMatrix::Zero(sigma.m.rows(), sigma.m.cols());
  for (Mask a = 0; a <= full_mask(n); ++a)
    if (r.r[a] != 0.0) out += dn * r.r[a] * reduce_embed(sigma.m, n, d, a);
  return {n, out, d};
}

inline DensityMatrix apply_reconstruction(const CVector& phi, int n_sites, const ReconVector& r) {
  return apply_reconstruction(DensityMatrix(n_sites, phi * phi.adjoint()), r);
}

enum class ProjectionMode { simplex, pure };

/// Euclidean projection of a real vector onto the probability simplex.
inline std::vector<double> project_to_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
  return v;
}

/// Closest physical state in Frobenius norm (simplex) or the top eigenvector (pure).
inline DensityMatrix project_physical(const DensityMatrix& rho, ProjectionMode mode) {
  const CMatrix herm = 0.5 * (rho.m + rho.m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  if (es.info() != Eigen::Success) throw StateError("eigensolver failed in projection");
  const Eigen::Index dim = herm.rows();
  if (mode == ProjectionMode::pure) {
    const CVector top = es.eigenvectors().col(dim - 1);
    return {rho.n_sites, top * top.adjoint(), rho.local_dim};
  }
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + dim);
  const auto p = project_to_simplex(ev);
  Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(p.data(), dim);
  const CMatrix out = es.eigenvectors() * pv.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  return {rho.n_sites, out, rho.local_dim};
}

inline Eigen::VectorXd eigenvalues(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho.m + rho.m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// <psi| rho |psi>.
inline double state_fidelity(const DensityMatrix& rho, const PureState& psi) {
  return (psi.amps.adjoint() * rho.m * psi.amps)(0, 0).real();
}

/// (1/2) sum |eigenvalues of (a - b)|.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  const CMatrix diff = a.m - b.m;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace lsshadow
