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

LatticeVector page_ef(int n) {
  const double dim = std::ldexp(1.0, n);
  LatticeVector w(n);
  for (Mask c = 0; c <= full_mask(n); ++c)
    w[c] = (std::ldexp(1.0, popcount(c)) + std::ldexp(1.0, n - popcount(c))) / (dim + 1);
  return w;
}

bool within(double a, double b, double se) { return std::abs(a - b) <= 3 * se + 1e-12; }

GapPoint synthetic(double t, double delta) { return {t, delta, 0.0, {}, {}}; }

}  // namespace

TEST_CASE("frame potential examples", "[frame]") {
  for (int n : {2, 3}) {
    const double dim = std::ldexp(1.0, n);
    const Ensemble gh(EnsembleSpec::make(EnsembleKind::global_haar, n));
    for (BMode mode : {BMode::sample, BMode::enumerate}) {
      const MCValue f1 = estimate_frame_potential(gh, 1, 3000, mode, 1);
      CHECK(within(f1.value, 1.0 / dim, f1.stderr_));
      const MCValue f2 = estimate_frame_potential(gh, 2, 3000, mode, 2);
      CHECK(within(f2.value, 2.0 / (dim * (dim + 1)), f2.stderr_));
    }
  }
  // A single fixed snapshot: every pair overlaps perfectly.
  const MCValue fixed = frame_potential_from([](std::size_t) { return 1.0; }, 50);
  CHECK(fixed.value == 1.0);
  CHECK(fixed.stderr_ == 0.0);
  CircuitInstance c(3);
  c.add_clifford1(1, 5);
  const CMatrix u = c.unitary();
  CHECK(frame_potential_from([&](std::size_t) { return std::pow(std::norm(c.snapshot_vector(2).dot(c.snapshot_vector(2))), 2); }, 10).value == Approx(1.0));
  CHECK(pair_overlap_moment(u, u, 2) == Approx(1.0 / 8));

  const Ensemble ens(EnsembleSpec::brickwall_circuit(2, 1));
  CHECK_THROWS_AS(estimate_frame_potential(ens, 2, 1, BMode::sample, 1), ParameterError);
  CHECK_THROWS_AS(estimate_frame_potential(ens, 3, 10, BMode::sample, 1), ParameterError);

  // Global Haar N = 2 saturates the locally scrambled limit.
  const MCValue f2 = estimate_frame_potential(Ensemble(EnsembleSpec::make(EnsembleKind::global_haar, 2)), 2, 4000,
                                              BMode::enumerate, 3);
  CHECK(within(f2.value, ls_frame_potential(page_ef(2)), f2.stderr_));
}

TEST_CASE("locally scrambled frame potential", "[frame]") {
  CHECK(ls_frame_potential(LatticeVector(1, {1, 1})) == Approx(1.0 / 3));
  for (int n = 1; n <= 5; ++n) {
    const double dim = std::ldexp(1.0, n);
    const LatticeVector ones(n, std::vector<double>(std::size_t{1} << n, 1.0));
    CHECK(ls_frame_potential(ones) == Approx(std::pow(3.0, -n)));
    CHECK(ls_frame_potential(page_ef(n)) == Approx(2.0 / (dim * (dim + 1))));
  }
  // product ensemble: direct pairs of Haar product states
  const MCValue f2 = estimate_frame_potential(Ensemble(EnsembleSpec::make(EnsembleKind::onsite_haar, 3)), 2, 4000,
                                              BMode::sample, 4);
  CHECK(within(f2.value, ls_frame_potential(LatticeVector(3, std::vector<double>(8, 1.0))), f2.stderr_));

  Rng rng(5);
  for (int n = 1; n <= 3; ++n)
    for (int d : {2, 3})
      for (int t = 0; t < 3; ++t) {
        const LatticeVector w = random_lattice(n, rng);
        CHECK(std::abs(ls_frame_potential(w, d) - ls_frame_potential_naive(w, d)) < 1e-12);
      }
}

TEST_CASE("LS estimate is the distinct-pair U-statistic", "[frame]") {
  const Ensemble ens(EnsembleSpec::brickwall_circuit(3, 1));
  const EFEstimate ef = estimate_ef(ens, 6, BMode::sample, 7, 1, true);
  double acc = 0.0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      if (i == j) continue;
      const auto a = ef.sample(i), b = ef.sample(j);
      for (Mask x = 0; x < 8; ++x)
        for (Mask y = 0; y < 8; ++y) acc += a[x] * weingarten({x, 3}, {y, 3}, 2, 3) * b[y];
    }
  const MCValue est = ls_frame_potential_estimate(ef);
  CHECK(est.value == Approx(acc / 30.0).epsilon(1e-12));
  CHECK(est.stderr_ > 0);
  EFEstimate no_samples = ef;
  no_samples.per_sample.clear();
  CHECK(ls_frame_potential_estimate(no_samples).value == Approx(ls_frame_potential(ef.W)));
}

TEST_CASE("frame gap examples", "[frame]") {
  const GapPoint bw = frame_gap(Ensemble(EnsembleSpec::brickwall_circuit(4, 2)), 2000, 2000, BMode::enumerate, 8);
  CHECK(std::abs(bw.delta) < 3 * bw.stderr_);

  const std::vector<double> times = {0.1, 0.3, 0.6, 1.0};
  const auto gue = frame_gap_series(Ensemble(EnsembleSpec::gue2_quench(3, 1.0)), times, 600, 600, BMode::enumerate, 9);
  REQUIRE(gue.size() == times.size());
  CHECK(gue[0].delta > 3 * gue[0].stderr_);
  for (std::size_t k = 1; k < gue.size(); ++k) {
    INFO("T=" << gue[k].t << " delta=" << gue[k].delta);
    CHECK(gue[k].delta < gue[k - 1].delta + 3 * std::hypot(gue[k].stderr_, gue[k - 1].stderr_));
  }

  // A single frozen-coupling DQIM instance decays with the ensemble curve and
  // stays within a decade of it.
  const std::vector<double> steps = {1, 2, 3};
  const auto ens_curve = frame_gap_series(Ensemble(EnsembleSpec::dqim_quench(4, 3, 1.0, false, 0)), steps, 600, 600,
                                          BMode::enumerate, 10);
  for (std::uint64_t inst : {11, 12}) {
    const auto one = frame_gap_series(Ensemble(EnsembleSpec::dqim_quench(4, 3, 1.0, true, inst)), steps, 600, 600,
                                      BMode::enumerate, 12);
    CHECK(one.back().delta < one.front().delta);
    for (std::size_t k = 0; k < steps.size(); ++k) {
      INFO("step " << steps[k] << ": ensemble " << ens_curve[k].delta << " single " << one[k].delta);
      REQUIRE(ens_curve[k].delta > 3 * ens_curve[k].stderr_);
      REQUIRE(one[k].delta > 3 * one[k].stderr_);
      CHECK(std::abs(std::log10(one[k].delta / ens_curve[k].delta)) < 1.0);
    }
  }
}

TEST_CASE("scrambling-time fit", "[frame]") {
  std::vector<GapPoint> pts;
  for (int i = 0; i <= 6; ++i) pts.push_back(synthetic(0.5 * i, std::exp(-0.5 * i / 2.0)));
  const ScramblingFit f = fit_scrambling_time(pts, 0.0, 3.0);
  CHECK(f.t_th == Approx(2.0).epsilon(1e-6));
  CHECK(f.r2 == Approx(1.0).epsilon(1e-12));
  CHECK(f.n_used == 7);
  CHECK_FALSE(f.heuristic);

  std::vector<GapPoint> with_bad = pts;
  with_bad.push_back(synthetic(3.2, -1e-3));
  with_bad.push_back(synthetic(3.4, 0.0));
  const ScramblingFit g = fit_scrambling_time(with_bad, 0.0, 4.0);
  CHECK(g.n_dropped == 2);
  CHECK(g.t_th == Approx(2.0).epsilon(1e-6));

  CHECK_THROWS_AS(fit_scrambling_time(pts, 0.0, 0.6), ParameterError);
  const std::vector<GapPoint> bad = {synthetic(0, 1), synthetic(1, -1), synthetic(2, 0.5), synthetic(3, -0.1)};
  CHECK_THROWS_AS(fit_scrambling_time(bad, 0.0, 3.0), ParameterError);

  // exponential decay onto a plateau: the heuristic window stops early
  std::vector<GapPoint> plateau;
  for (int i = 0; i < 20; ++i) plateau.push_back(synthetic(i, std::exp(-i / 1.5) + 0.05));
  const ScramblingFit a = fit_scrambling_time_auto(plateau);
  CHECK(a.heuristic);
  CHECK(a.r2 > 0.9);
  CHECK(a.t_hi < 19.0);
  CHECK(a.t_th > 1.5);
  CHECK(a.t_th < 4.0);
}

TEST_CASE("frame potential invariants", "[frame][property]") {
  const std::vector<EnsembleSpec> specs = {EnsembleSpec::brickwall_circuit(3, 1), EnsembleSpec::cnot_sandwich(3),
                                           EnsembleSpec::make(EnsembleKind::onsite_clifford, 3),
                                           EnsembleSpec::gue2_quench(3, 0.4),
                                           EnsembleSpec::dqim_quench(3, 1, 1.0, false, 0),
                                           EnsembleSpec::rydberg_sandwich(3, 1.0)};
  std::uint64_t seed = 100;
  for (const auto& s : specs) {
    INFO(canonical_json(s));
    const GapPoint g = frame_gap(Ensemble(s), 800, 800, BMode::enumerate, ++seed);
    CHECK(g.f2.value >= g.f2_ls.value - 3 * g.stderr_);
    CHECK(g.delta + 3 * g.stderr_ >= 0);
  }

  // site relabeling leaves the LS value unchanged
  Rng rng(6);
  const int n = 4;
  const LatticeVector w = random_valid_ef(n, rng);
  std::vector<int> perm = {0, 1, 2, 3};
  for (int t = 0; t < 6; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    LatticeVector pw(n);
    for (Mask c = 0; c <= full_mask(n); ++c) {
      Mask img = 0;
      for (int i = 0; i < n; ++i)
        if ((c >> i) & 1U) img |= Mask{1} << perm[static_cast<std::size_t>(i)];
      pw[img] = w[c];
    }
    CHECK(ls_frame_potential(pw) == Approx(ls_frame_potential(w)).epsilon(1e-12));
  }

  const Ensemble ens(EnsembleSpec::brickwall_circuit(3, 2));
  const MCValue a = estimate_frame_potential(ens, 2, 40, BMode::sample, 9, 1);
  const MCValue b = estimate_frame_potential(ens, 2, 40, BMode::sample, 9, 3);
  CHECK(a.value == b.value);
}
