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

void check_recon(const ReconVector& r, const LatticeVector& w) {
  CHECK(r.trace_defect() < 1e-8);
  CHECK(recon_residual(w, r.r, r.d) < 1e-6);
}

void check_lattice(const LatticeVector& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (Mask a = 0; a < got.size(); ++a) CHECK(got[a] == Approx(want[a]).margin(tol));
}

CMatrix local_unitary(int n, Rng& rng) {
  std::vector<CMatrix> vs;
  for (int i = 0; i < n; ++i) vs.push_back(sample_haar_unitary(2, rng));
  return kron_sites(vs);
}

double trace_product(const CMatrix& a, const CMatrix& b) { return (a * b).trace().real(); }

}  // namespace

TEST_CASE("dense solve examples", "[reconstruction]") {
  const LatticeVector ones(2, {1, 1, 1, 1});
  const ReconVector a = solve_recon_dense(ones, 2);
  check_lattice(a.r, {1, -1.5, -1.5, 2.25}, 1e-10);
  check_recon(a, ones);
  CHECK(a.source == ReconSource::dense_solve);
  CHECK(a.condition >= 1.0);

  const LatticeVector page(2, {1, 0.8, 0.8, 1});
  const ReconVector b = solve_recon_dense(page, 2);
  check_lattice(b.r, {-1, 0, 0, 1.25}, 1e-10);
  check_recon(b, page);

  const ReconVector c = solve_recon_dense(LatticeVector(2, {1, 0.9, 0.9, 1}), 3);
  const ReconVector ca = two_qudit_analytic_r(0.9, 3);
  for (Mask m = 0; m < 4; ++m) CHECK(std::abs(c.r[m] - ca.r[m]) < 1e-10);
  CHECK(c.trace_defect() < 1e-10);
}

TEST_CASE("closed form examples", "[reconstruction]") {
  const LatticeVector ones(2, {1, 1, 1, 1});
  check_lattice(solve_recon_closed_form(ones).r, {1, -1.5, -1.5, 2.25}, 1e-12);
  check_lattice(solve_recon_closed_form(LatticeVector(2, {1, 0.8, 0.8, 1})).r, {-1, 0, 0, 1.25}, 1e-12);

  for (int n = 1; n <= 6; ++n) {
    const LatticeVector w(n, std::vector<double>(std::size_t{1} << n, 1.0));
    const ReconVector cf = solve_recon_closed_form(w);
    const ReconVector lh = local_haar_r(n);
    for (Mask a = 0; a <= full_mask(n); ++a)
      CHECK(cf.r[a] == Approx(ipow(-1.0, n - popcount(a)) * ipow(1.5, popcount(a))).margin(1e-10));
    for (Mask a = 0; a <= full_mask(n); ++a) CHECK(cf.r[a] == Approx(lh.r[a]).margin(1e-10));
  }

  Rng rng(1);
  for (int n = 2; n <= 6; ++n)
    for (int trial = 0; trial < 5; ++trial) {
      const LatticeVector w = random_valid_ef(n, rng);
      const ReconVector dense = solve_recon_dense(w, 2);
      const ReconVector cf = solve_recon_closed_form(w);
      double scale = 0.0;
      for (Mask a = 0; a <= full_mask(n); ++a) scale = std::max(scale, std::abs(dense.r[a]));
      for (Mask a = 0; a <= full_mask(n); ++a) CHECK(std::abs(dense.r[a] - cf.r[a]) / scale < 1e-8);
      check_recon(dense, w);
      check_recon(cf, w);
    }
}

TEST_CASE("two-qudit analytic coefficients", "[reconstruction]") {
  check_lattice(two_qudit_analytic_r(1.0, 2).r, {1, -1.5, -1.5, 2.25}, 1e-12);
  check_lattice(two_qudit_analytic_r(0.8, 2).r, {-1, 0, 0, 1.25}, 1e-12);
  const ReconVector a = two_qudit_analytic_r(0.9, 2);
  const ReconVector b = solve_recon_dense(LatticeVector(2, {1, 0.9, 0.9, 1}), 2);
  for (Mask m = 0; m < 4; ++m) CHECK(std::abs(a.r[m] - b.r[m]) < 1e-10);
  for (int d = 2; d <= 4; ++d) {
    const ReconVector lo = two_qudit_analytic_r(2.0 * d / (d * d + 1.0), d);
    const double dd = d;
    check_lattice(lo.r, {-1, 0, 0, (dd * dd + 1) / (dd * dd)}, 1e-10);
    const ReconVector hi = two_qudit_analytic_r(1.0, d);
    check_lattice(hi.r, {1, -(dd + 1) / dd, -(dd + 1) / dd, (dd + 1) * (dd + 1) / (dd * dd)}, 1e-10);
  }
  CHECK_THROWS_AS(two_qudit_analytic_r(0.5, 2), SingularEnsembleError);
  CHECK_THROWS_AS(two_qudit_analytic_r(1.25, 2), SingularEnsembleError);
}

TEST_CASE("singular ensembles raise with a condition estimate", "[reconstruction]") {
  // den_{1} = 1 - 2 W_{1} vanishes at W_{1} = 1/2.
  const LatticeVector w(2, {1, 0.5, 0.5, 1});
  CHECK_THROWS_AS(solve_recon_closed_form(w), SingularEnsembleError);
  try {
    solve_recon_dense(w, 2);
    FAIL("expected singular error");
  } catch (const SingularEnsembleError& e) {
    CHECK(e.condition() > kMaxCondition);
  }
  CHECK_THROWS_AS(solve_recon_dense(LatticeVector(2, {1, 0.9, 0.9, 0.7}), 2), ParameterError);

  EFEstimate ef;
  ef.W = LatticeVector(2, {1, 0.501, 0.6, 1});
  ef.stderr_ = LatticeVector(2, {0, 0.01, 0.001, 0});
  const auto flagged = near_singular_regions(ef);
  CHECK(std::find(flagged.begin(), flagged.end(), Mask{1}) != flagged.end());
  ef.W = LatticeVector(2, {1, 1, 1, 1});
  CHECK(near_singular_regions(ef).empty());
}

TEST_CASE("measurement channel examples", "[reconstruction]") {
  Rng rng(2);
  const DensityMatrix rho = random_density(1, rng);
  const DensityMatrix sigma = apply_measurement_channel(rho, LatticeVector(1, {1, 1}));
  const CMatrix want = (rho.m + CMatrix::Identity(2, 2)) / 3.0;
  CHECK(max_abs(sigma.m - want) < 1e-12);
  CHECK(max_abs(apply_reconstruction(sigma, local_haar_r(1)).m - rho.m) < 1e-10);
  CHECK(max_abs((3.0 * sigma.m - CMatrix::Identity(2, 2)) - rho.m) < 1e-10);

  for (int n = 1; n <= 4; ++n) {
    const CMatrix mixed = CMatrix::Identity(1 << n, 1 << n) / std::ldexp(1.0, n);
    const DensityMatrix out = apply_measurement_channel({n, mixed}, random_valid_ef(n, rng));
    CHECK(max_abs(out.m - mixed) < 1e-12);
  }

  for (int n = 1; n <= 3; ++n)
    for (int trial = 0; trial < 4; ++trial) {
      const DensityMatrix r = random_density(n, rng);
      const LatticeVector w = random_lattice(n, rng);
      CHECK(max_abs(apply_measurement_channel(r, w).m - apply_measurement_channel_naive(r, w).m) < 1e-10);
    }
  // qutrits
  const CMatrix g = ginibre(9, rng);
  CMatrix q = g * g.adjoint();
  q /= q.trace().real();
  const DensityMatrix r3(2, q, 3);
  const LatticeVector w3(2, {1, 0.7, 0.75, 1});
  CHECK(max_abs(apply_measurement_channel(r3, w3).m - apply_measurement_channel_naive(r3, w3).m) < 1e-10);
  const ReconVector rv3 = solve_recon_dense(w3, 3);
  CHECK(max_abs(apply_reconstruction(apply_measurement_channel(r3, w3), rv3).m - q) < 1e-8);
}

TEST_CASE("channel from Monte Carlo EF matches direct sampling", "[reconstruction]") {
  Rng rng(3);
  const DensityMatrix rho = random_density(2, rng);
  const Ensemble ens(EnsembleSpec::brickwall_circuit(2, 1));
  const std::size_t m = 4000;
  std::vector<std::vector<double>> re(16, std::vector<double>(m)), im(16, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const CircuitInstance c = ens.member(derive_seed(99, Stream::misc, i));
    CMatrix acc = CMatrix::Zero(4, 4);
    for (Mask b = 0; b < 4; ++b) {
      const CVector phi = c.snapshot_vector(b);
      const CMatrix s = phi * phi.adjoint();
      // uniform b with weight d^N Tr(sigma rho)
      acc += s * trace_product(s, rho.m);
    }
    for (int k = 0; k < 16; ++k) {
      re[static_cast<std::size_t>(k)][i] = acc(k % 4, k / 4).real();
      im[static_cast<std::size_t>(k)][i] = acc(k % 4, k / 4).imag();
    }
  }
  const EFEstimate ef = estimate_ef(ens, 4000, BMode::enumerate, 5);
  const DensityMatrix sigma = apply_measurement_channel(rho, ef.W);
  // Linear response of sigma to each EF entry bounds the EF contribution.
  std::vector<CMatrix> dsig;
  for (Mask c = 0; c < 4; ++c) {
    LatticeVector e(2);
    e[c] = 1.0;
    dsig.push_back(apply_measurement_channel(rho, e).m);
  }
  for (int k = 0; k < 16; ++k) {
    const int i = k % 4, j = k / 4;
    double ef_err = 0.0;
    for (Mask c = 0; c < 4; ++c) ef_err += std::abs(dsig[c](i, j)) * ef.stderr()[c];
    const auto& rv = re[static_cast<std::size_t>(k)];
    const auto& iv = im[static_cast<std::size_t>(k)];
    const double se_re = std::sqrt(sample_variance(rv) / static_cast<double>(m));
    const double se_im = std::sqrt(sample_variance(iv) / static_cast<double>(m));
    CHECK(std::abs(mean_of(rv) - sigma.m(i, j).real()) <= 3 * std::hypot(se_re, ef_err) + 1e-12);
    CHECK(std::abs(mean_of(iv) - sigma.m(i, j).imag()) <= 3 * std::hypot(se_im, ef_err) + 1e-12);
  }
}

TEST_CASE("inverse channel identities", "[reconstruction]") {
  Rng rng(4);
  for (int n = 1; n <= 4; ++n) {
    const DensityMatrix s = random_density(n, rng);
    const double dim = std::ldexp(1.0, n);
    const CMatrix want = (dim + 1.0) * s.m - CMatrix::Identity(s.m.rows(), s.m.cols());
    CHECK(max_abs(apply_reconstruction(s, global_haar_r(n)).m - want) < 1e-10);

    std::vector<CMatrix> sites, inv;
    for (int i = 0; i < n; ++i) {
      sites.push_back(random_density(1, rng).m);
      inv.push_back(3.0 * sites.back() - CMatrix::Identity(2, 2));
    }
    CHECK(max_abs(apply_reconstruction({n, kron_sites(sites)}, local_haar_r(n)).m - kron_sites(inv)) < 1e-10);
  }
  for (int n = 1; n <= 5; ++n) {
    CHECK(global_haar_r(n).trace_defect() < 1e-12);
    CHECK(local_haar_r(n).trace_defect() < 1e-12);
  }
}

TEST_CASE("projection to physical states", "[reconstruction]") {
  Rng rng(5);
  const DensityMatrix phys = random_density(3, rng);
  CHECK(max_abs(project_physical(phys, ProjectionMode::simplex).m - phys.m) < 1e-10);

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.2;
  d(1, 1) = -0.2;
  const DensityMatrix p = project_physical({1, d}, ProjectionMode::simplex);
  CHECK(p.m(0, 0).real() == Approx(1.0).margin(1e-12));
  CHECK(std::abs(p.m(1, 1)) < 1e-12);
  CHECK(std::abs(p.m(0, 1)) < 1e-12);

  for (int trial = 0; trial < 20; ++trial) {
    CMatrix h = random_hermitian(8, rng);
    h += (1.0 - h.trace().real()) / 8.0 * CMatrix::Identity(8, 8);
    for (auto mode : {ProjectionMode::simplex, ProjectionMode::pure}) {
      const DensityMatrix out = project_physical({3, h}, mode);
      CHECK(eigenvalues(out).minCoeff() >= -1e-12);
      CHECK(out.trace().real() == Approx(1.0).margin(1e-10));
      CHECK(out.is_hermitian(1e-12));
    }
    const DensityMatrix pure = project_physical({3, h}, ProjectionMode::pure);
    CHECK(max_abs(pure.m * pure.m - pure.m) < 1e-10);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const CVector top = es.eigenvectors().col(7);
    CHECK(std::abs((top.adjoint() * pure.m * top)(0, 0).real() - 1.0) < 1e-10);
  }
  const std::vector<double> s = project_to_simplex({0.5, 0.5, 0.5});
  for (double x : s) CHECK(x == Approx(1.0 / 3));
}

TEST_CASE("reconstruction invariants", "[reconstruction][property]") {
  Rng rng(6);
  for (int n = 1; n <= 4; ++n)
    for (int trial = 0; trial < 4; ++trial) {
      const LatticeVector w = random_valid_ef(n, rng);
      const ReconVector r = solve_recon_dense(w, 2);
      check_recon(r, w);
      const DensityMatrix rho = random_density(n, rng);

      // trace preservation and Hermiticity on arbitrary inputs
      const DensityMatrix back = apply_reconstruction(apply_measurement_channel(rho, w), r);
      CHECK(max_abs(back.m - rho.m) < 1e-8);
      const DensityMatrix snap = apply_reconstruction(random_haar_state(n, rng).amps, n, r);
      CHECK(snap.trace().real() == Approx(1.0).margin(1e-8));
      CHECK(snap.is_hermitian(1e-10));

      // self-adjointness
      const int dim = 1 << n;
      const CMatrix o = random_hermitian(dim, rng), s = random_hermitian(dim, rng);
      const double lhs = trace_product(o, apply_reconstruction({n, s}, r).m);
      const double rhs = trace_product(apply_reconstruction({n, o}, r).m, s);
      CHECK(std::abs(lhs - rhs) < 1e-9);

      // on-site covariance
      const CMatrix v = local_unitary(n, rng);
      const CMatrix lhs_m = apply_reconstruction({n, v.adjoint() * s * v}, r).m;
      const CMatrix rhs_m = v.adjoint() * apply_reconstruction({n, s}, r).m * v;
      CHECK(max_abs(lhs_m - rhs_m) < 1e-9);
    }

  // exact analytic features: product and two-qudit Page
  for (int n = 1; n <= 4; ++n) {
    const DensityMatrix rho = random_density(n, rng);
    const LatticeVector ones(n, std::vector<double>(std::size_t{1} << n, 1.0));
    CHECK(max_abs(apply_reconstruction(apply_measurement_channel(rho, ones), local_haar_r(n)).m - rho.m) < 1e-8);
  }
  const DensityMatrix rho2 = random_density(2, rng);
  const LatticeVector page(2, {1, 0.8, 0.8, 1});
  CHECK(max_abs(apply_reconstruction(apply_measurement_channel(rho2, page), global_haar_r(2)).m - rho2.m) < 1e-8);
}
