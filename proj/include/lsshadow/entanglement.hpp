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

// Second entanglement features of prior snapshot ensembles.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lsshadow/clifford.hpp"
#include "lsshadow/dense.hpp"
#include "lsshadow/ensemble.hpp"
#include "lsshadow/region.hpp"
#include "lsshadow/rng.hpp"

namespace lsshadow {

enum class BMode { automatic, sample, enumerate };

inline std::string to_string(BMode m) {
  switch (m) {
    case BMode::automatic: return "auto";
    case BMode::sample: return "sample";
    case BMode::enumerate: return "enumerate";
  }
  return "?";
}

inline BMode bmode_from_string(const std::string& s) {
  if (s == "auto") return BMode::automatic;
  if (s == "sample") return BMode::sample;
  if (s == "enumerate") return BMode::enumerate;
  throw ParameterError("unknown b-mode '" + s + "'");
}

/// Outcome enumeration multiplies the cost per member by 2^N; it is the
/// default only while that stays cheap.
inline constexpr int kEnumerateMaxSites = 6;

inline BMode resolve_bmode(BMode m, int n_sites) {
  if (m != BMode::automatic) return m;
  return n_sites <= kEnumerateMaxSites ? BMode::enumerate : BMode::sample;
}

struct EFEstimate {
  LatticeVector W;
  LatticeVector stderr_;
  std::size_t n_samples = 0;
  EnsembleSpec ensemble;
  std::uint64_t seed = 0;
  BMode mode = BMode::sample;
  /// Per-sample purity vectors, row-major n_samples x 2^N (kept on request).
  std::vector<double> per_sample;

  int n_sites() const noexcept { return W.n_sites(); }
  const LatticeVector& stderr() const noexcept { return stderr_; }
  std::span<const double> sample(std::size_t i) const {
    const std::size_t len = W.size();
    return {per_sample.data() + i * len, len};
  }
};

/// Mean and standard error per region from row-major per-sample data.
inline std::pair<LatticeVector, LatticeVector> lattice_mean_stderr(const std::vector<double>& rows, int n_sites,
                                                                   std::size_t n) {
  const std::size_t len = std::size_t{1} << n_sites;
  LatticeVector mean(n_sites), se(n_sites);
  std::vector<double> col(n);
  for (std::size_t c = 0; c < len; ++c) {
    for (std::size_t i = 0; i < n; ++i) col[i] = rows[i * len + c];
    const double mu = pairwise_sum(col) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = (col[i] - mu) * (col[i] - mu);
    const double var = n > 1 ? pairwise_sum(col) / static_cast<double>(n - 1) : 0.0;
    mean[static_cast<Mask>(c)] = mu;
    se[static_cast<Mask>(c)] = std::sqrt(var / static_cast<double>(n));
  }
  return {mean, se};
}

/// Averaged purities of one ensemble member over outcomes (enumerate) or for
/// one uniform outcome (sample).
inline std::vector<double> member_purities(const CircuitInstance& c, BMode mode, Rng& outcome_rng) {
  const int n = c.n_sites();
  const std::size_t len = std::size_t{1} << n;
  std::vector<double> acc(len, 0.0);
  auto add_state = [&](Mask b, double weight) {
    if (c.is_clifford()) {
      const StabilizerTableau t = c.snapshot_tableau(b);
      for (Mask r = 0; r < len; ++r) acc[r] += weight * stab_purity(t, {r, n});
    } else {
      const LatticeVector p = all_subsystem_purities(c.snapshot_vector(b), n);
      for (Mask r = 0; r < len; ++r) acc[r] += weight * p[r];
    }
  };
  if (mode == BMode::enumerate) {
    for (Mask b = 0; b < len; ++b) add_state(b, 1.0 / static_cast<double>(len));
  } else {
    std::uniform_int_distribution<Mask> pick(0, full_mask(n));
    add_state(pick(outcome_rng), 1.0);
  }
  return acc;
}

/// Monte Carlo estimate of W_C = E Tr(rho_C^2) over the prior snapshot
/// ensemble (uniform b). Uses the ef_member/ef_outcome streams only.
inline EFEstimate estimate_ef(const Ensemble& ens, std::size_t n_samples, BMode mode, std::uint64_t seed,
                              int workers = 1, bool keep_samples = false) {
  if (n_samples < 2) throw ParameterError("estimate_ef needs n_samples >= 2 to form a standard error");
  const int n = ens.n_sites();
  mode = resolve_bmode(mode, n);
  const std::size_t len = std::size_t{1} << n;
  std::vector<double> rows(n_samples * len);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    const CircuitInstance c = ens.member(derive_seed(seed, Stream::ef_member, i));
    Rng out_rng = make_rng(seed, Stream::ef_outcome, i);
    const auto p = member_purities(c, mode, out_rng);
    std::copy(p.begin(), p.end(), rows.begin() + static_cast<std::ptrdiff_t>(i * len));
  });
  auto [mean, se] = lattice_mean_stderr(rows, n, n_samples);
  EFEstimate out{mean, se, n_samples, ens.spec(), seed, mode, {}};
  if (keep_samples) out.per_sample = std::move(rows);
  return out;
}

/// EF of the unitary series U(T) of a GUE2/DQIM member set, one estimate per
/// time, all times sharing the same members.
inline std::vector<EFEstimate> estimate_ef_series(const Ensemble& ens, const std::vector<double>& times,
                                                  std::size_t n_samples, BMode mode, std::uint64_t seed,
                                                  int workers = 1, bool keep_samples = false) {
  if (n_samples < 2) throw ParameterError("estimate_ef needs n_samples >= 2 to form a standard error");
  const int n = ens.n_sites();
  mode = resolve_bmode(mode, n);
  const std::size_t len = std::size_t{1} << n;
  std::vector<std::vector<double>> rows(times.size(), std::vector<double>(n_samples * len));
  parallel_for(n_samples, workers, [&](std::size_t i) {
    const auto us = ens.member_unitaries(derive_seed(seed, Stream::ef_member, i), times);
    Rng out_rng = make_rng(seed, Stream::ef_outcome, i);
    std::uniform_int_distribution<Mask> pick(0, full_mask(n));
    for (std::size_t k = 0; k < times.size(); ++k) {
      std::vector<double> acc(len, 0.0);
      auto add = [&](Mask b, double w) {
        // U^dagger |b> is the conjugated b-th row of U.
        const CVector phi = us[k].row(b).adjoint();
        const LatticeVector p = all_subsystem_purities(phi, n);
        for (Mask r = 0; r < len; ++r) acc[r] += w * p[r];
      };
      if (mode == BMode::enumerate) {
        for (Mask b = 0; b < len; ++b) add(b, 1.0 / static_cast<double>(len));
      } else {
        add(pick(out_rng), 1.0);
      }
      std::copy(acc.begin(), acc.end(), rows[k].begin() + static_cast<std::ptrdiff_t>(i * len));
    }
  });
  std::vector<EFEstimate> out;
  for (std::size_t k = 0; k < times.size(); ++k) {
    auto [mean, se] = lattice_mean_stderr(rows[k], n, n_samples);
    EnsembleSpec spec = ens.spec();
    if (spec.kind == EnsembleKind::dqim) spec.steps = static_cast<int>(times[k]);
    else spec.time = times[k];
    EFEstimate e{mean, se, n_samples, spec, seed, mode, {}};
    if (keep_samples) e.per_sample = std::move(rows[k]);
    out.push_back(std::move(e));
  }
  return out;
}

/// Operator EF of a Pauli string, unnormalized: [supp P within D] d^{2N-|D|}.
inline LatticeVector pauli_operator_ef(const PauliString& p, int d = 2) {
  if (p.is_identity()) throw ParameterError("operator EF requires a traceless (non-identity) Pauli string");
  const int n = p.n_sites;
  LatticeVector w(n);
  for (Mask dm = 0; dm <= full_mask(n); ++dm)
    if (is_subset(p.support(), dm)) w[dm] = ipow(d, 2 * n - popcount(dm));
  return w;
}

/// Flags EF estimates whose closed-form denominators sum_{B in S} (-2)^{|B|} W_B
/// come within 3 standard errors of zero (qubits only).
inline std::vector<Mask> near_singular_regions(const EFEstimate& ef, double n_sigma = 3.0) {
  const int n = ef.n_sites();
  LatticeVector signed_w(n), var(n);
  for (Mask b = 0; b <= full_mask(n); ++b) {
    signed_w[b] = ipow(-2.0, popcount(b)) * ef.W[b];
    var[b] = ipow(4.0, popcount(b)) * ef.stderr()[b] * ef.stderr()[b];
  }
  const LatticeVector den = subset_sum(signed_w);
  const LatticeVector den_var = subset_sum(var);
  std::vector<Mask> out;
  for (Mask s = 0; s <= full_mask(n); ++s)
    if (std::abs(den[s]) <= n_sigma * std::sqrt(den_var[s])) out.push_back(s);
  return out;
}

}  // namespace lsshadow
