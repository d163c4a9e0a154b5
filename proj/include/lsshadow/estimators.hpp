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

// Single-shot estimators, uncertainty quantification and shadow norms.
//
// With sigma = 2^{-N} sum_P Tr(P sigma) P, the reduced snapshot sigma_A keeps
// exactly the Pauli terms supported in A, so
//   M^{-1}[sigma] = sum_P Tr(P sigma) R(supp P) P,  R = superset_sum(r).
// Every qubit estimator below is a contraction of this expansion.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lsshadow/clifford.hpp"
#include "lsshadow/dense.hpp"
#include "lsshadow/reconstruction.hpp"
#include "lsshadow/region.hpp"
#include "lsshadow/rng.hpp"

namespace lsshadow {

struct EstimateReport {
  double value = 0.0;
  double stderr_ = 0.0;
  double level = 0.997;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n_samples = 0;
  std::string estimator;
  std::uint64_t snapshot_hash = 0;
  /// Set when a negative mean was passed through the signed square root.
  bool biased = false;
};

// ---------------------------------------------------------------- statistics

inline double mean_of(const std::vector<double>& v) {
  require(!v.empty(), "empty sample");
  return pairwise_sum(v) / static_cast<double>(v.size());
}

/// Unbiased sample variance.
inline double sample_variance(const std::vector<double>& v) {
  require(v.size() >= 2, "variance needs at least two values");
  const double mu = mean_of(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mu) * (v[i] - mu);
  return pairwise_sum(sq) / static_cast<double>(v.size() - 1);
}

inline double signed_sqrt(double x) { return x < 0 ? -std::sqrt(-x) : std::sqrt(x); }

enum class Statistic { mean, signed_sqrt_mean };

inline double quantile_sorted(const std::vector<double>& s, double q) {
  if (s.size() == 1) return s.front();
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

/// Resampling distribution of the statistic; stderr is its standard
/// deviation, the CI its central percentile interval at `level`.
inline EstimateReport bootstrap(const std::vector<double>& values, Statistic stat, std::size_t n_resamples,
                                Rng& rng, double level = 0.997) {
  if (values.size() < 2) throw ParameterError("bootstrap needs at least two values");
  require(n_resamples >= 2, "bootstrap needs at least two resamples");
  auto apply = [stat](double m) { return stat == Statistic::mean ? m : signed_sqrt(m); };
  const std::size_t n = values.size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> reps(n_resamples);
  for (std::size_t k = 0; k < n_resamples; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[pick(rng)];
    reps[k] = apply(s / static_cast<double>(n));
  }
  const double mu = mean_of(values);
  EstimateReport rep;
  rep.value = apply(mu);
  rep.biased = stat == Statistic::signed_sqrt_mean && mu < 0;
  rep.stderr_ = std::sqrt(sample_variance(reps));
  std::sort(reps.begin(), reps.end());
  rep.level = level;
  rep.ci_lo = quantile_sorted(reps, 0.5 * (1.0 - level));
  rep.ci_hi = quantile_sorted(reps, 1.0 - 0.5 * (1.0 - level));
  rep.n_samples = n;
  rep.estimator = stat == Statistic::mean ? "bootstrap-mean" : "bootstrap-sqrt-mean";
  return rep;
}

/// Median of the means of floor(n / n_groups)-sized consecutive groups.
inline EstimateReport median_of_means(const std::vector<double>& values, std::size_t n_groups) {
  if (values.empty()) throw ParameterError("median_of_means needs values");
  require(n_groups >= 1 && n_groups <= values.size(), "n_groups must lie in [1, n]");
  const std::size_t size = values.size() / n_groups;
  std::vector<double> means(n_groups);
  for (std::size_t g = 0; g < n_groups; ++g) {
    double s = 0.0;
    for (std::size_t i = 0; i < size; ++i) s += values[g * size + i];
    means[g] = s / static_cast<double>(size);
  }
  std::vector<double> sorted = means;
  std::sort(sorted.begin(), sorted.end());
  EstimateReport rep;
  rep.value = n_groups % 2 ? sorted[n_groups / 2] : 0.5 * (sorted[n_groups / 2 - 1] + sorted[n_groups / 2]);
  rep.stderr_ = n_groups >= 2 ? std::sqrt(sample_variance(means) / static_cast<double>(n_groups)) : 0.0;
  rep.ci_lo = sorted.front();
  rep.ci_hi = sorted.back();
  rep.level = 1.0;
  rep.n_samples = values.size();
  rep.estimator = "median-of-means";
  return rep;
}

enum class FidelityMode { sqrt_mean, mean };

/// Fidelity from single-shot overlaps: signed sqrt of the mean (sqrt_mean)
/// or the mean overlap itself.
inline EstimateReport estimate_fidelity(const std::vector<double>& overlaps, FidelityMode mode, Rng& rng,
                                        std::size_t n_resamples = 1000, double level = 0.997) {
  if (overlaps.empty()) throw ParameterError("no snapshots");
  EstimateReport r = bootstrap(overlaps, mode == FidelityMode::mean ? Statistic::mean : Statistic::signed_sqrt_mean,
                               n_resamples, rng, level);
  r.estimator = mode == FidelityMode::mean ? "fidelity-mean" : "fidelity-sqrt-mean";
  return r;
}

inline std::int64_t sample_complexity_bound(double shadow_norm_sq, double eps, double delta) {
  require(eps > 0 && delta > 0, "epsilon and delta must be positive");
  require(shadow_norm_sq >= 0 && std::isfinite(shadow_norm_sq), "shadow norm must be finite and >= 0");
  // Guard against 1000.0000000000001 from the division.
  const double raw = shadow_norm_sq / (eps * eps * delta);
  return static_cast<std::int64_t>(std::ceil(raw * (1.0 - 1e-12)));
}

// ---------------------------------------------------------------- single-shot estimators

/// <Psi| M^{-1}[|phi><phi|] |Psi> for qubits, grouped by X-mask of the Pauli
/// expansion. Cost O(N 2^N) per nonzero X-class of the target.
class OverlapEstimator {
 public:
  OverlapEstimator(const ReconVector& r, const PureState& target) : n_(target.n_sites), target_(target) {
    require(r.d == 2, "Pauli-grouped overlap requires qubits");
    require(r.n_sites() == n_, "reconstruction/target size mismatch");
    target.check_normalized();
    weight_ = superset_sum(r.r);
    for (Mask x = 0; x <= full_mask(n_); ++x) {
      auto e = x_class_expectations(target.amps, n_, x);
      bool any = false;
      for (double v : e)
        if (std::abs(v) > 1e-14) any = true;
      if (any) classes_.push_back({x, std::move(e)});
    }
  }

  double operator()(const CVector& phi) const {
    require(phi.size() == (Eigen::Index{1} << n_), "snapshot/target size mismatch");
    double acc = 0.0;
    for (const auto& [x, e_target] : classes_) {
      const auto e_phi = x_class_expectations(phi, n_, x);
      for (Mask z = 0; z < e_phi.size(); ++z)
        if (e_target[z] != 0.0) acc += e_target[z] * e_phi[z] * weight_[x | z];
    }
    return acc;
  }

  std::size_t n_classes() const noexcept { return classes_.size(); }

 private:
  int n_;
  PureState target_;
  LatticeVector weight_;
  std::vector<std::pair<Mask, std::vector<double>>> classes_;
};

/// Dense oracle: d^N sum_A r_A <Psi|sigma_A|Psi> through explicit reduced matrices.
inline double single_shot_overlap_dense(const CVector& phi, const ReconVector& r, const PureState& target) {
  require(phi.size() == target.amps.size(), "snapshot/target size mismatch");
  return state_fidelity(apply_reconstruction(phi, target.n_sites, r), target);
}

/// kappa_P Tr(P sigma) with kappa_P = d^N sum_{A >= supp P} r_A.
class PauliEstimator {
 public:
  PauliEstimator(const ReconVector& r, const PauliString& p) : p_(p) {
    require(r.n_sites() == p.n_sites, "reconstruction/Pauli size mismatch");
    if (p.is_identity()) throw ParameterError("Pauli estimation requires a traceless (non-identity) string");
    require(p.is_hermitian(), "Pauli estimation requires a Hermitian string");
    kappa_ = std::pow(static_cast<double>(r.d), p.n_sites) * superset_sum(r.r)[p.support()];
  }
  double kappa() const noexcept { return kappa_; }
  double operator()(const CVector& phi) const { return kappa_ * pauli_expectation(phi, p_); }
  double operator()(const StabilizerTableau& t) const { return kappa_ * stab_pauli_expectation(t, p_); }

 private:
  PauliString p_;
  double kappa_ = 0.0;
};

/// Dense oracle for Tr(P M^{-1}[sigma]) through reduced matrices.
inline double single_shot_pauli_dense(const CVector& phi, const ReconVector& r, const PauliString& p) {
  const DensityMatrix rho = apply_reconstruction(phi, p.n_sites, r);
  return (pauli_matrix(p) * rho.m).trace().real();
}

/// Tr(P0 M^{-1}[sigma]) for P0 = |0..0><0..0| = 2^{-N} sum_z Z^z, which is
/// sum_z R(z) Tr(Z^z sigma).
inline double single_shot_zero_projector(const CVector& phi, const LatticeVector& superset_r) {
  const int n = superset_r.n_sites();
  const auto e = x_class_expectations(phi, n, 0);
  double acc = 0.0;
  for (Mask z = 0; z < e.size(); ++z) acc += e[z] * superset_r[z];
  return acc;
}

// ---------------------------------------------------------------- shadow norms

/// rho-averaged squared shadow norm from entanglement features. Cost O(4^N).
inline double shadow_norm(const ReconVector& r, const LatticeVector& w_sigma, const LatticeVector& w_op) {
  const int n = r.n_sites(), d = r.d;
  require(w_sigma.n_sites() == n && w_op.n_sites() == n, "EF size mismatch");
  const LatticeVector g = weighted_symdiff_transform(w_op, d);
  LatticeVector sup = superset_sum(r.r);
  for (Mask e = 0; e < sup.size(); ++e) sup[e] *= sup[e];
  const LatticeVector t = superset_sum_inverse(sup);
  const Mask full = full_mask(n);
  std::vector<double> dpow(static_cast<std::size_t>(2 * n + 1));
  for (int k = -n; k <= n; ++k) dpow[static_cast<std::size_t>(k + n)] = std::pow(static_cast<double>(d), k);
  double total = 0.0;
  for (Mask e = 0; e <= full; ++e) {
    if (t[e] == 0.0) continue;
    double h = 0.0;
    for (Mask c = 0; c <= full; ++c) {
      const Mask ec = e & c;
      h += dpow[static_cast<std::size_t>(popcount(ec) - popcount(c) + n)] * w_sigma[ec] * g[c];
    }
    total += t[e] * h;
  }
  const double dd = static_cast<double>(d) * d;
  return std::pow(dd / (dd - 1.0), n) * total;
}

/// Literal quadruple sum over (A, B, C, D); N <= 3.
inline double shadow_norm_naive(const ReconVector& r, const LatticeVector& w_sigma, const LatticeVector& w_op) {
  const int n = r.n_sites(), d = r.d;
  require(n <= 3, "naive shadow norm limited to N <= 3");
  const Mask full = full_mask(n);
  const double dd = static_cast<double>(d) * d;
  const double pref = std::pow(dd / (dd - 1.0), n);
  double total = 0.0;
  for (Mask a = 0; a <= full; ++a)
    for (Mask b = 0; b <= full; ++b)
      for (Mask c = 0; c <= full; ++c)
        for (Mask dm = 0; dm <= full; ++dm) {
          const double v = r.r[a] * r.r[b] * pref * std::pow(static_cast<double>(d), popcount(a & b & c) - popcount(c)) *
                           ipow(-1.0 / d, popcount(c ^ dm));
          total += v * w_sigma[a & b & c] * w_op[dm];
        }
  return total;
}

/// Two-qudit closed form per unit Tr O^2.
inline double two_qudit_shadow_norm(double w, double k_tot, int d) {
  require(d >= 2, "local dimension d must be >= 2");
  const double dd = d;
  const double s1 = dd * w - 1.0, s2 = dd * dd - 2.0 * dd * w + 1.0;
  if (std::abs(s1) < 1e-12 || std::abs(s2) < 1e-12) throw SingularEnsembleError("two-qudit shadow norm singular", 0);
  return (dd * dd - 1.0) / (dd * dd * dd) * (k_tot / s1 + (dd * dd - 1.0) * (dd - k_tot) / s2);
}

}  // namespace lsshadow
