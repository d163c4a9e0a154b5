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

// Frame potentials of prior snapshot ensembles and the local-scrambling gap.

#pragma once

#include <cmath>
#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lsshadow/entanglement.hpp"
#include "lsshadow/ensemble.hpp"
#include "lsshadow/estimators.hpp"
#include "lsshadow/region.hpp"
#include "lsshadow/rng.hpp"

namespace lsshadow {

struct MCValue {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

inline MCValue mc_mean(const std::vector<double>& v) {
  require(v.size() >= 2, "need at least two samples");
  return {mean_of(v), std::sqrt(sample_variance(v) / static_cast<double>(v.size())), v.size()};
}

/// D^{-2} sum_{b, b'} |<b| U U'^dagger |b'>|^{2k}: the pair value averaged over
/// both outcomes exactly.
inline double pair_overlap_moment(const CMatrix& u, const CMatrix& u_prime, int k) {
  const CMatrix q = u * u_prime.adjoint();
  const double dim = static_cast<double>(q.rows());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < q.cols(); ++j)
    for (Eigen::Index i = 0; i < q.rows(); ++i) acc += std::pow(std::norm(q(i, j)), k);
  return acc / (dim * dim);
}

/// Mean of pair_value(i) over i < n_pairs; pair i must use disjoint samples.
inline MCValue frame_potential_from(const std::function<double(std::size_t)>& pair_value, std::size_t n_pairs,
                                    int workers = 1) {
  if (n_pairs < 2) throw ParameterError("frame potential needs n_pairs >= 2");
  std::vector<double> v(n_pairs);
  parallel_for(n_pairs, workers, [&](std::size_t i) { v[i] = pair_value(i); });
  return mc_mean(v);
}

/// F^(k) = E (Tr sigma sigma')^k over independent prior snapshot pairs.
inline MCValue estimate_frame_potential(const Ensemble& ens, int k, std::size_t n_pairs, BMode mode,
                                        std::uint64_t seed, int workers = 1) {
  require(k == 1 || k == 2, "frame potential order must be 1 or 2");
  const int n = ens.n_sites();
  mode = resolve_bmode(mode, n);
  return frame_potential_from(
      [&](std::size_t i) {
        const CircuitInstance a = ens.member(derive_seed(seed, Stream::pair, 2 * i));
        const CircuitInstance b = ens.member(derive_seed(seed, Stream::pair, 2 * i + 1));
        if (mode == BMode::enumerate) return pair_overlap_moment(a.unitary(), b.unitary(), k);
        Rng rng = make_rng(seed, Stream::outcome, i);
        std::uniform_int_distribution<Mask> pick(0, full_mask(n));
        const Mask ba = pick(rng), bb = pick(rng);
        const double ov = std::norm(a.snapshot_vector(ba).dot(b.snapshot_vector(bb)));
        return std::pow(ov, k);
      },
      n_pairs, workers);
}

/// Same estimator for every time of a GUE2/DQIM series, sharing pair members.
inline std::vector<MCValue> estimate_frame_potential_series(const Ensemble& ens, const std::vector<double>& times,
                                                            int k, std::size_t n_pairs, std::uint64_t seed,
                                                            int workers = 1) {
  require(k == 1 || k == 2, "frame potential order must be 1 or 2");
  if (n_pairs < 2) throw ParameterError("frame potential needs n_pairs >= 2");
  std::vector<std::vector<double>> v(times.size(), std::vector<double>(n_pairs));
  parallel_for(n_pairs, workers, [&](std::size_t i) {
    const auto ua = ens.member_unitaries(derive_seed(seed, Stream::pair, 2 * i), times);
    const auto ub = ens.member_unitaries(derive_seed(seed, Stream::pair, 2 * i + 1), times);
    for (std::size_t t = 0; t < times.size(); ++t) v[t][i] = pair_overlap_moment(ua[t], ub[t], k);
  });
  std::vector<MCValue> out;
  for (const auto& col : v) out.push_back(mc_mean(col));
  return out;
}

/// Locally scrambled limit sum_{A,B} W_A Wg_{A,B} W_B.
inline double ls_frame_potential(const LatticeVector& w, int d = 2) {
  const LatticeVector g = weighted_symdiff_transform(w, d);
  return std::pow(static_cast<double>(d) * d - 1.0, -w.n_sites()) * w.dot(g);
}

inline double ls_frame_potential_naive(const LatticeVector& w, int d = 2) {
  const int n = w.n_sites();
  double acc = 0.0;
  for (Mask a = 0; a <= full_mask(n); ++a)
    for (Mask b = 0; b <= full_mask(n); ++b) acc += w[a] * weingarten({a, n}, {b, n}, d, n) * w[b];
  return acc;
}

/// Unbiased estimate of the LS frame potential from per-sample EF vectors:
/// the quadratic form over distinct sample pairs. The standard error is the
/// delta-method value 2 sd(w_i . G(W-bar)) / sqrt(n) scaled by (d^2-1)^{-N}.
inline MCValue ls_frame_potential_estimate(const EFEstimate& ef, int d = 2) {
  const int n = ef.n_sites();
  const double pref = std::pow(static_cast<double>(d) * d - 1.0, -n);
  if (ef.per_sample.empty()) return {ls_frame_potential(ef.W, d), 0.0, ef.n_samples};
  const std::size_t m = ef.n_samples;
  LatticeVector total(n);
  for (std::size_t i = 0; i < m; ++i) {
    const auto s = ef.sample(i);
    for (Mask c = 0; c < total.size(); ++c) total[c] += s[c];
  }
  double diag = 0.0;
  std::vector<double> lin(m);
  const LatticeVector g_mean = weighted_symdiff_transform((1.0 / static_cast<double>(m)) * total, d);
  for (std::size_t i = 0; i < m; ++i) {
    const auto s = ef.sample(i);
    const LatticeVector wi(n, std::vector<double>(s.begin(), s.end()));
    diag += wi.dot(weighted_symdiff_transform(wi, d));
    lin[i] = wi.dot(g_mean);
  }
  const double full = total.dot(weighted_symdiff_transform(total, d));
  const double md = static_cast<double>(m);
  const double value = pref * (full - diag) / (md * (md - 1.0));
  const double se = 2.0 * pref * std::sqrt(sample_variance(lin) / md);
  return {value, se, m};
}

struct GapPoint {
  double t = 0.0;
  double delta = 0.0;
  double stderr_ = 0.0;
  MCValue f2;
  MCValue f2_ls;
};

inline GapPoint make_gap(double t, const MCValue& f2, const MCValue& ls) {
  return {t, f2.value - ls.value, std::hypot(f2.stderr_, ls.stderr_), f2, ls};
}

/// Delta = F^(2) - F^(2)_LS from independent pair and EF sample sets.
inline GapPoint frame_gap(const Ensemble& ens, std::size_t n_pairs, std::size_t ef_samples, BMode mode,
                          std::uint64_t seed, int workers = 1) {
  const MCValue f2 = estimate_frame_potential(ens, 2, n_pairs, mode, seed, workers);
  const EFEstimate ef = estimate_ef(ens, ef_samples, mode, seed, workers, true);
  return make_gap(0.0, f2, ls_frame_potential_estimate(ef));
}

inline std::vector<GapPoint> frame_gap_series(const Ensemble& ens, const std::vector<double>& times,
                                              std::size_t n_pairs, std::size_t ef_samples, BMode mode,
                                              std::uint64_t seed, int workers = 1) {
  const auto f2 = estimate_frame_potential_series(ens, times, 2, n_pairs, seed, workers);
  const auto efs = estimate_ef_series(ens, times, ef_samples, mode, seed, workers, true);
  std::vector<GapPoint> out;
  for (std::size_t k = 0; k < times.size(); ++k) out.push_back(make_gap(times[k], f2[k], ls_frame_potential_estimate(efs[k])));
  return out;
}

struct ScramblingFit {
  double t_th = 0.0;
  double t_th_stderr = 0.0;
  double r2 = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  std::size_t n_used = 0;
  std::size_t n_dropped = 0;
  bool heuristic = false;
};

/// Least-squares line through (T, ln Delta) over points with T in [t_lo, t_hi]
/// and Delta > 0; T_Th = -1/slope. The slope error is the larger of the
/// residual-based and the propagated point-error estimates.
inline ScramblingFit fit_scrambling_time(const std::vector<GapPoint>& pts, double t_lo, double t_hi) {
  std::vector<double> t, y, sy;
  std::size_t dropped = 0;
  for (const auto& p : pts) {
    if (p.t < t_lo || p.t > t_hi) continue;
    if (!(p.delta > 0)) {
      ++dropped;
      continue;
    }
    t.push_back(p.t);
    y.push_back(std::log(p.delta));
    sy.push_back(p.stderr_ / p.delta);
  }
  if (t.size() < 3) throw ParameterError("scrambling-time fit needs >= 3 points with Delta > 0 in the window");
  const double n = static_cast<double>(t.size());
  const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxx += (t[i] - tm) * (t[i] - tm);
    sxy += (t[i] - tm) * (y[i] - ym);
    syy += (y[i] - ym) * (y[i] - ym);
  }
  require(sxx > 0, "fit window needs distinct times");
  ScramblingFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * tm;
  double ssr = 0, prop = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double res = y[i] - (f.intercept + f.slope * t[i]);
    ssr += res * res;
    const double wgt = (t[i] - tm) / sxx;
    prop += wgt * wgt * sy[i] * sy[i];
  }
  f.r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
  const double se_res = t.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
  const double se_slope = std::max(se_res, std::sqrt(prop));
  f.t_th = -1.0 / f.slope;
  f.t_th_stderr = se_slope / (f.slope * f.slope);
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  f.n_used = t.size();
  f.n_dropped = dropped;
  return f;
}

/// Heuristic window: the longest prefix (from the first point) whose fit keeps
/// R^2 > 0.9 with at least three usable points.
inline ScramblingFit fit_scrambling_time_auto(const std::vector<GapPoint>& pts, double min_r2 = 0.9) {
  require(pts.size() >= 3, "need at least three points");
  std::optional<ScramblingFit> best;
  for (std::size_t end = 2; end < pts.size(); ++end) {
    try {
      const ScramblingFit f = fit_scrambling_time(pts, pts.front().t, pts[end].t);
      if (f.r2 > min_r2 && f.slope < 0) best = f;
      else if (best) break;
    } catch (const ParameterError&) {
      if (best) break;
    }
  }
  if (!best) throw ParameterError("no window with R^2 > " + std::to_string(min_r2));
  best->heuristic = true;
  return *best;
}

}  // namespace lsshadow
