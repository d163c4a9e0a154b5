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

// Experiment suite. Each run reads one JSON config, writes
//   <out>/<experiment>.csv   report rows (kReportHeader columns)
//   <out>/<experiment>.json  summary with the config, its hash and fits
// plus experiment-specific files. Every point uses its own seed derived from
// the config seed; EF estimation and snapshot collection draw from disjoint
// streams of that seed.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "lsshadow/entanglement.hpp"
#include "lsshadow/ensemble.hpp"
#include "lsshadow/estimators.hpp"
#include "lsshadow/frame_potential.hpp"
#include "lsshadow/io.hpp"
#include "lsshadow/reconstruction.hpp"

namespace lsshadow {

// ---------------------------------------------------------------- building blocks

/// EF estimate followed by the closed-form solve.
inline ReconVector reconstruction_for(const Ensemble& ens, std::size_t ef_samples, std::uint64_t seed, int workers,
                                      BMode mode = BMode::automatic, EFEstimate* ef_out = nullptr) {
  EFEstimate ef = estimate_ef(ens, ef_samples, mode, seed, workers);
  ReconVector r = solve_recon_closed_form(ef.W);
  if (ef_out) *ef_out = std::move(ef);
  return r;
}

inline std::vector<double> collect_overlaps(const Ensemble& ens, const StateSource& state, const ReconVector& r,
                                            const PureState& target, std::size_t m, std::uint64_t seed,
                                            int workers) {
  const OverlapEstimator est(r, target);
  std::vector<double> v(m);
  for_each_snapshot(ens, state, seed, m, workers,
                    [&](std::size_t i, const SnapshotRecord&, const CVector& phi) { v[i] = est(phi); });
  return v;
}

inline std::vector<double> collect_pauli(const Ensemble& ens, const StateSource& state, const ReconVector& r,
                                         const PauliString& p, std::size_t m, std::uint64_t seed, int workers) {
  const PauliEstimator est(r, p);
  std::vector<double> v(m);
  for_each_snapshot(ens, state, seed, m, workers,
                    [&](std::size_t i, const SnapshotRecord&, const CVector& phi) { v[i] = est(phi); });
  return v;
}

/// M^{-1} applied to the mean snapshot of m posterior snapshots (dense).
inline DensityMatrix reconstruct_state(const Ensemble& ens, const StateSource& state, const ReconVector& r,
                                       std::size_t m, std::uint64_t seed, int workers) {
  const int n = ens.n_sites();
  require(n <= 8, "dense state reconstruction limited to N <= 8");
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix phis(dim, static_cast<Eigen::Index>(m));
  for_each_snapshot(ens, state, seed, m, workers,
                    [&](std::size_t i, const SnapshotRecord&, const CVector& phi) { phis.col(static_cast<Eigen::Index>(i)) = phi; });
  DensityMatrix sigma;
  sigma.n_sites = n;
  sigma.m = (phis * phis.adjoint()) / static_cast<double>(m);
  return apply_reconstruction(sigma, r);
}

/// Z on sites 0..k-1.
inline PauliString z_string(int n, int k) {
  require(k >= 1 && k <= n, "Z-string length must lie in [1, N]");
  PauliString p;
  p.n_sites = n;
  p.z = full_mask(k);
  return p;
}

struct CollapseFit {
  double alpha = 0.0;
  double c = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares fit of ln Var = a + c N / (L+1)^alpha, alpha on a grid.
inline CollapseFit fit_variance_collapse(const std::vector<int>& n, const std::vector<int>& l,
                                         const std::vector<double>& var, double alpha_lo = 0.05,
                                         double alpha_hi = 2.0, double step = 1e-3) {
  require(n.size() == l.size() && n.size() == var.size() && n.size() >= 3, "collapse fit needs >= 3 points");
  std::vector<double> y(var.size());
  for (std::size_t i = 0; i < var.size(); ++i) {
    require(var[i] > 0, "collapse fit needs positive variances");
    y[i] = std::log(var[i]);
  }
  const double k = static_cast<double>(y.size());
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / k;
  double syy = 0;
  for (double v : y) syy += (v - ym) * (v - ym);
  CollapseFit best;
  double best_ssr = std::numeric_limits<double>::infinity();
  for (double a = alpha_lo; a <= alpha_hi + 1e-12; a += step) {
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = n[i] / std::pow(l[i] + 1.0, a);
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / k;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      sxx += (x[i] - xm) * (x[i] - xm);
      sxy += (x[i] - xm) * (y[i] - ym);
    }
    if (sxx <= 0) continue;
    const double c = sxy / sxx;
    const double ssr = syy - c * sxy;
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best = {a, c, ym - c * xm, syy > 0 ? 1.0 - ssr / syy : 1.0};
    }
  }
  return best;
}

/// Index of the minimum, and whether it lies strictly inside the sweep.
inline std::pair<std::size_t, bool> interior_minimum(const std::vector<double>& v) {
  require(!v.empty(), "empty sweep");
  const auto it = std::min_element(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(it - v.begin());
  return {idx, idx > 0 && idx + 1 < v.size()};
}

// ---------------------------------------------------------------- configuration

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {
      "ghz-fidelity-vs-depth", "bias-demo",        "variance-scaling",  "pauli-variance-vs-depth",
      "tomography-complexity", "sandwich-fidelity", "frame-gap-vs-T",   "approximate-ensemble-fidelity-vs-T",
      "z-error-fidelity",      "spectrum-and-projection"};
  return ids;
}

struct ExperimentConfig {
  std::string experiment;
  int n_sites = 6;
  std::vector<int> n_list;
  std::vector<int> l_list;
  std::vector<double> t_list;
  std::vector<int> k_list;
  std::vector<double> p_list;
  std::vector<double> j_list;
  std::optional<EnsembleSpec> ensemble;
  StateSpec state;
  std::size_t samples = 5000;
  std::size_t ef_samples = 1000;
  std::size_t pairs = 1000;
  std::size_t bootstrap = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  std::filesystem::path out = "results";
  std::optional<std::pair<double, double>> fit_window;
  bool periodic = true;

  json to_json() const {
    json j = {{"experiment", experiment}, {"n_sites", n_sites},     {"N_list", n_list},
              {"L_list", l_list},         {"T_list", t_list},       {"k_list", k_list},
              {"p_list", p_list},         {"J_list", j_list},       {"state", lsshadow::to_json(state)},
              {"samples", samples},       {"ef_samples", ef_samples}, {"pairs", pairs},
              {"bootstrap", bootstrap},   {"seed", seed},           {"periodic", periodic}};
    if (ensemble) j["ensemble"] = lsshadow::to_json(*ensemble);
    if (fit_window) j["fit_window"] = {fit_window->first, fit_window->second};
    return j;
  }

  /// Hash of the result-determining fields (output path and worker count excluded).
  std::uint64_t hash() const { return fnv1a(to_json().dump()); }
};

inline ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.experiment = j.at("experiment").get<std::string>();
    c.n_sites = j.value("n_sites", c.n_sites);
    c.n_list = j.value("N_list", std::vector<int>{});
    c.l_list = j.value("L_list", std::vector<int>{});
    c.t_list = j.value("T_list", std::vector<double>{});
    c.k_list = j.value("k_list", std::vector<int>{});
    c.p_list = j.value("p_list", std::vector<double>{});
    c.j_list = j.value("J_list", std::vector<double>{});
    if (j.contains("ensemble")) c.ensemble = ensemble_from_json(j["ensemble"]);
    if (j.contains("state")) c.state = state_from_json(j["state"]);
    c.samples = j.value("samples", c.samples);
    c.ef_samples = j.value("ef_samples", c.ef_samples);
    c.pairs = j.value("pairs", c.pairs);
    c.bootstrap = j.value("bootstrap", c.bootstrap);
    if (!j.contains("seed")) throw ParameterError("config must set an explicit seed");
    c.seed = j.at("seed").get<std::uint64_t>();
    c.workers = j.value("workers", c.workers);
    c.out = j.value("out", c.out.string());
    c.periodic = j.value("periodic", c.periodic);
    if (j.contains("fit_window")) {
      const auto w = j["fit_window"].get<std::vector<double>>();
      if (w.size() != 2) throw ParameterError("fit_window must be [T_lo, T_hi]");
      c.fit_window = std::pair{w[0], w[1]};
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad experiment config: ") + e.what());
  }
  return c;
}

namespace detail {

inline void require_nonempty(bool ok, const std::string& what) {
  if (!ok) throw ParameterError("invalid sweep: " + what);
}

inline void check_depths(const std::vector<int>& l) {
  require_nonempty(!l.empty(), "L_list is empty");
  for (int v : l) require_nonempty(v >= 0, "negative depth in L_list");
}

struct Output {
  std::string csv = kReportHeader;
  json summary;
  std::vector<std::pair<std::string, std::string>> extra;  // file name, contents
};

inline ReportRow row(const ExperimentConfig& c, int n, double axis, const std::string& estimator,
                     const EstimateReport& r, std::uint64_t seed) {
  return {c.experiment, n, axis, estimator, r.value, r.stderr_, r.ci_lo, r.ci_hi, r.n_samples, seed, c.hash()};
}

inline ReportRow scalar_row(const ExperimentConfig& c, int n, double axis, const std::string& estimator, double v,
                            double se, std::size_t count, std::uint64_t seed) {
  return {c.experiment, n, axis, estimator, v, se, v - 3 * se, v + 3 * se, count, seed, c.hash()};
}

inline std::uint64_t point_seed(const ExperimentConfig& c, std::uint64_t point) {
  return derive_seed(c.seed, Stream::misc, point);
}

/// Standard error of the sample variance, sqrt((m4 - s^4 (m-3)/(m-1)) / m).
inline double variance_stderr(const std::vector<double>& v) {
  const double mu = mean_of(v), s2 = sample_variance(v);
  double m4 = 0;
  for (double x : v) m4 += std::pow(x - mu, 4);
  m4 /= static_cast<double>(v.size());
  const double m = static_cast<double>(v.size());
  return std::sqrt(std::max(0.0, (m4 - s2 * s2 * (m - 3.0) / (m - 1.0)) / m));
}

inline EstimateReport fidelity_report(const std::vector<double>& ov, FidelityMode mode, const ExperimentConfig& c,
                                      std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::bootstrap, 0);
  return estimate_fidelity(ov, mode, rng, c.bootstrap);
}

inline PureState target_of(const StateSource& s) {
  return s.mixed() ? ghz_state(s.n_sites(), +1) : s.primary();
}

/// Fidelity rows (sqrt-mean, mean, overlap variance) for one sweep point.
inline std::vector<double> fidelity_point(Output& o, const ExperimentConfig& c, const EnsembleSpec& spec,
                                          double axis, std::uint64_t seed, const ReconVector* r_override = nullptr) {
  const Ensemble ens(spec);
  const StateSource state(c.state, spec.n_sites);
  const ReconVector r = r_override ? *r_override : reconstruction_for(ens, c.ef_samples, seed, c.workers);
  const auto ov = collect_overlaps(ens, state, r, target_of(state), c.samples, seed, c.workers);
  o.csv += report_csv_row(row(c, spec.n_sites, axis, "fidelity_sqrt_mean",
                              fidelity_report(ov, FidelityMode::sqrt_mean, c, seed), seed));
  o.csv += report_csv_row(row(c, spec.n_sites, axis, "fidelity_mean", fidelity_report(ov, FidelityMode::mean, c, seed), seed));
  o.csv += report_csv_row(
      scalar_row(c, spec.n_sites, axis, "var_overlap", sample_variance(ov), variance_stderr(ov), ov.size(), seed));
  return ov;
}

inline EnsembleSpec brickwall_for(const ExperimentConfig& c, int n, int l) {
  return EnsembleSpec::brickwall_circuit(n, l, c.periodic);
}

// ---------------------------------------------------------------- experiments

inline void run_fidelity_vs_depth(const ExperimentConfig& c, Output& o) {
  check_depths(c.l_list);
  for (std::size_t i = 0; i < c.l_list.size(); ++i)
    fidelity_point(o, c, brickwall_for(c, c.n_sites, c.l_list[i]), c.l_list[i], point_seed(c, i));
}

inline void run_bias_demo(const ExperimentConfig& c, Output& o) {
  const std::vector<int> ls = c.l_list.empty() ? std::vector<int>{1} : c.l_list;
  check_depths(ls);
  const int n = c.n_sites;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const std::uint64_t seed = point_seed(c, i);
    const Ensemble ens(brickwall_for(c, n, ls[i]));
    const StateSource state(c.state, n);
    const PureState target = target_of(state);
    const ReconVector r_ef = reconstruction_for(ens, c.ef_samples, seed, c.workers);
    const ReconVector r_gh = global_haar_r(n);
    const OverlapEstimator f_ef(r_ef, target), f_gh(r_gh, target);
    const LatticeVector s_ef = superset_sum(r_ef.r), s_gh = superset_sum(r_gh.r);
    std::vector<double> ov_ef(c.samples), ov_gh(c.samples), p0_ef(c.samples), p0_gh(c.samples);
    for_each_snapshot(ens, state, seed, c.samples, c.workers, [&](std::size_t k, const SnapshotRecord&, const CVector& phi) {
      ov_ef[k] = f_ef(phi);
      ov_gh[k] = f_gh(phi);
      p0_ef[k] = single_shot_zero_projector(phi, s_ef);
      p0_gh[k] = single_shot_zero_projector(phi, s_gh);
    });
    Rng rng = make_rng(seed, Stream::bootstrap, 0);
    o.csv += report_csv_row(row(c, n, ls[i], "fidelity_ef", estimate_fidelity(ov_ef, FidelityMode::sqrt_mean, rng, c.bootstrap), seed));
    o.csv += report_csv_row(row(c, n, ls[i], "fidelity_global_haar", estimate_fidelity(ov_gh, FidelityMode::sqrt_mean, rng, c.bootstrap), seed));
    o.csv += report_csv_row(row(c, n, ls[i], "p0_ef", bootstrap(p0_ef, Statistic::mean, c.bootstrap, rng), seed));
    o.csv += report_csv_row(row(c, n, ls[i], "p0_global_haar", bootstrap(p0_gh, Statistic::mean, c.bootstrap, rng), seed));
  }
}

inline void run_variance_scaling(const ExperimentConfig& c, Output& o) {
  check_depths(c.l_list);
  const std::vector<int> ns = c.n_list.empty() ? std::vector<int>{c.n_sites} : c.n_list;
  std::vector<int> fn, fl;
  std::vector<double> fv;
  std::uint64_t point = 0;
  for (int n : ns) {
    for (int l : c.l_list) {
      const std::uint64_t seed = point_seed(c, point++);
      const auto ov = fidelity_point(o, c, brickwall_for(c, n, l), l, seed);
      fn.push_back(n);
      fl.push_back(l);
      fv.push_back(sample_variance(ov));
    }
  }
  if (fv.size() >= 3) {
    const CollapseFit f = fit_variance_collapse(fn, fl, fv);
    o.summary["collapse_fit"] = {{"alpha", f.alpha}, {"c", f.c}, {"intercept", f.intercept}, {"r2", f.r2}};
  }
}

inline void run_pauli_variance(const ExperimentConfig& c, Output& o) {
  check_depths(c.l_list);
  const int n = c.n_sites;
  const std::vector<int> ks = c.k_list.empty() ? std::vector<int>{1, 2, 3, 4, 5, 6} : c.k_list;
  for (std::size_t i = 0; i < c.l_list.size(); ++i) {
    const std::uint64_t seed = point_seed(c, i);
    const Ensemble ens(brickwall_for(c, n, c.l_list[i]));
    const StateSource state(c.state, n);
    EFEstimate ef;
    const ReconVector r = reconstruction_for(ens, c.ef_samples, seed, c.workers, BMode::automatic, &ef);
    for (int k : ks) {
      const PauliString p = z_string(n, k);
      const auto v = collect_pauli(ens, state, r, p, c.samples, seed, c.workers);
      Rng rng = make_rng(seed, Stream::bootstrap, static_cast<std::uint64_t>(k));
      o.csv += report_csv_row(row(c, n, c.l_list[i], "mean_Z" + std::to_string(k), bootstrap(v, Statistic::mean, c.bootstrap, rng), seed));
      o.csv += report_csv_row(scalar_row(c, n, c.l_list[i], "var_Z" + std::to_string(k), sample_variance(v), variance_stderr(v), v.size(), seed));
      const double norm = shadow_norm(r, ef.W, pauli_operator_ef(p));
      o.csv += report_csv_row(scalar_row(c, n, c.l_list[i], "shadow_norm_Z" + std::to_string(k), norm, 0.0, ef.n_samples, seed));
    }
  }
}

inline void run_tomography_complexity(const ExperimentConfig& c, Output& o) {
  check_depths(c.l_list);
  std::vector<double> cost;
  for (std::size_t i = 0; i < c.l_list.size(); ++i) {
    const std::uint64_t seed = point_seed(c, i);
    const int l = c.l_list[i];
    const auto ov = fidelity_point(o, c, brickwall_for(c, c.n_sites, l), l, seed);
    const double v = (l + 1) * sample_variance(ov);
    cost.push_back(v);
    o.csv += report_csv_row(scalar_row(c, c.n_sites, l, "complexity_(L+1)var", v, (l + 1) * variance_stderr(ov), ov.size(), seed));
  }
  const auto [idx, interior] = interior_minimum(cost);
  o.summary["argmin_L"] = c.l_list[idx];
  o.summary["interior_minimum"] = interior;
}

inline void run_sandwich_fidelity(const ExperimentConfig& c, Output& o) {
  const int n = c.n_sites;
  EnsembleSpec rydberg = EnsembleSpec::rydberg_sandwich(n, c.t_list.empty() ? 1.0 : c.t_list.front());
  const std::vector<std::pair<std::string, EnsembleSpec>> kinds = {
      {"randomized_pauli", EnsembleSpec::make(EnsembleKind::onsite_clifford, n)},
      {"cnot_sandwich", EnsembleSpec::cnot_sandwich(n)},
      {"rydberg_sandwich", rydberg}};
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const std::uint64_t seed = point_seed(c, i);
    const Ensemble ens(kinds[i].second);
    const StateSource state(c.state, n);
    const ReconVector r = reconstruction_for(ens, c.ef_samples, seed, c.workers);
    const auto ov = collect_overlaps(ens, state, r, target_of(state), c.samples, seed, c.workers);
    o.csv += report_csv_row(row(c, n, static_cast<double>(i), "fidelity_" + kinds[i].first,
                                fidelity_report(ov, FidelityMode::sqrt_mean, c, seed), seed));
    o.csv += report_csv_row(scalar_row(c, n, static_cast<double>(i), "var_" + kinds[i].first, sample_variance(ov),
                                       variance_stderr(ov), ov.size(), seed));
  }
}

inline EnsembleSpec series_spec(const ExperimentConfig& c) {
  return c.ensemble ? *c.ensemble : EnsembleSpec::gue2_quench(c.n_sites, 0.0);
}

inline void run_frame_gap(const ExperimentConfig& c, Output& o) {
  require_nonempty(!c.t_list.empty(), "T_list is empty");
  const EnsembleSpec base = series_spec(c);
  require_nonempty(base.kind == EnsembleKind::gue2 || base.kind == EnsembleKind::dqim,
                   "frame-gap-vs-T needs a gue2 or dqim ensemble");
  std::vector<double> couplings = c.j_list.empty() ? std::vector<double>{base.coupling} : c.j_list;
  if (base.kind == EnsembleKind::gue2) couplings = {base.coupling};
  json fits = json::array();
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    EnsembleSpec spec = base;
    spec.coupling = couplings[i];
    const std::uint64_t seed = point_seed(c, i);
    const auto pts = frame_gap_series(Ensemble(spec), c.t_list, c.pairs, c.ef_samples, BMode::automatic, seed, c.workers);
    for (const auto& p : pts)
      o.csv += report_csv_row(scalar_row(c, spec.n_sites, p.t, "delta_J" + format_double(spec.coupling), p.delta, p.stderr_, p.f2.n, seed));
    o.extra.emplace_back(c.experiment + "_J" + format_double(spec.coupling) + ".csv", frame_gap_csv(pts));
    json fj = {{"J", spec.coupling}};
    try {
      const ScramblingFit f = c.fit_window ? fit_scrambling_time(pts, c.fit_window->first, c.fit_window->second)
                                           : fit_scrambling_time_auto(pts);
      fj["fit"] = to_json(f);
    } catch (const ParameterError& e) {
      fj["fit_error"] = e.what();
    }
    fits.push_back(fj);
  }
  o.summary["fits"] = fits;
}

inline void run_approximate_fidelity(const ExperimentConfig& c, Output& o) {
  require_nonempty(!c.t_list.empty(), "T_list is empty");
  const EnsembleSpec base = series_spec(c);
  for (std::size_t i = 0; i < c.t_list.size(); ++i) {
    EnsembleSpec spec = base;
    if (spec.kind == EnsembleKind::dqim) spec.steps = static_cast<int>(c.t_list[i]);
    else spec.time = c.t_list[i];
    fidelity_point(o, c, spec, c.t_list[i], point_seed(c, i));
  }
}

inline void run_z_error(const ExperimentConfig& c, Output& o) {
  require_nonempty(!c.p_list.empty(), "p_list is empty");
  const int l = c.l_list.empty() ? 0 : c.l_list.front();
  const EnsembleSpec spec = brickwall_for(c, c.n_sites, l);
  const Ensemble ens(spec);
  const ReconVector r = reconstruction_for(ens, c.ef_samples, point_seed(c, 0), c.workers);
  for (std::size_t i = 0; i < c.p_list.size(); ++i) {
    ExperimentConfig ci = c;
    ci.state = {StateKind::z_error_ghz, c.p_list[i], 0, 0};
    const std::uint64_t seed = point_seed(c, i + 1);
    const StateSource state(ci.state, c.n_sites);
    const auto ov = collect_overlaps(ens, state, r, ghz_state(c.n_sites), c.samples, seed, c.workers);
    o.csv += report_csv_row(row(c, c.n_sites, c.p_list[i], "fidelity_mean", fidelity_report(ov, FidelityMode::mean, c, seed), seed));
    o.csv += report_csv_row(row(c, c.n_sites, c.p_list[i], "fidelity_sqrt_mean", fidelity_report(ov, FidelityMode::sqrt_mean, c, seed), seed));
  }
}

inline void run_spectrum(const ExperimentConfig& c, Output& o) {
  const EnsembleSpec spec = c.ensemble ? *c.ensemble : brickwall_for(c, c.n_sites, c.l_list.empty() ? 1 : c.l_list.front());
  const std::uint64_t seed = point_seed(c, 0);
  const Ensemble ens(spec);
  const StateSource state(c.state, spec.n_sites);
  const ReconVector r = reconstruction_for(ens, c.ef_samples, seed, c.workers);
  const DensityMatrix rho = reconstruct_state(ens, state, r, c.samples, seed, c.workers);
  const Eigen::VectorXd ev = eigenvalues(rho);
  std::string csv = "index,eigenvalue\n";
  for (Eigen::Index i = 0; i < ev.size(); ++i) csv += std::to_string(i) + "," + format_double(ev[i]) + "\n";
  o.extra.emplace_back(c.experiment + "_eigenvalues.csv", csv);
  const PureState target = target_of(state);
  const double axis = spec.kind == EnsembleKind::dqim ? spec.steps : spec.kind == EnsembleKind::brickwall ? spec.depth : spec.time;
  const auto add = [&](const std::string& name, double v) {
    o.csv += report_csv_row(scalar_row(c, spec.n_sites, axis, name, v, 0.0, c.samples, seed));
  };
  add("fidelity_raw", state_fidelity(rho, target));
  add("fidelity_simplex", state_fidelity(project_physical(rho, ProjectionMode::simplex), target));
  add("fidelity_pure", state_fidelity(project_physical(rho, ProjectionMode::pure), target));
  add("min_eigenvalue", ev.minCoeff());
  o.summary["ensemble"] = to_json(spec);
}

}  // namespace detail

struct ExperimentResult {
  std::vector<std::filesystem::path> files;
  json summary;
  std::string csv;
};

inline ExperimentResult run_experiment(const ExperimentConfig& c, bool write = true) {
  require_sites(c.n_sites);
  require(c.samples >= 2 && c.ef_samples >= 2 && c.pairs >= 2 && c.bootstrap >= 2, "sample counts must be >= 2");
  detail::Output o;
  const std::string& id = c.experiment;
  if (id == "ghz-fidelity-vs-depth") detail::run_fidelity_vs_depth(c, o);
  else if (id == "bias-demo") detail::run_bias_demo(c, o);
  else if (id == "variance-scaling") detail::run_variance_scaling(c, o);
  else if (id == "pauli-variance-vs-depth") detail::run_pauli_variance(c, o);
  else if (id == "tomography-complexity") detail::run_tomography_complexity(c, o);
  else if (id == "sandwich-fidelity") detail::run_sandwich_fidelity(c, o);
  else if (id == "frame-gap-vs-T") detail::run_frame_gap(c, o);
  else if (id == "approximate-ensemble-fidelity-vs-T") detail::run_approximate_fidelity(c, o);
  else if (id == "z-error-fidelity") detail::run_z_error(c, o);
  else if (id == "spectrum-and-projection") detail::run_spectrum(c, o);
  else throw ParameterError("unknown experiment id '" + id + "'");

  ExperimentResult res;
  res.summary = o.summary;
  res.summary["config"] = c.to_json();
  res.summary["config_hash"] = hex64(c.hash());
  res.csv = o.csv;
  if (write) {
    const auto csv_path = c.out / (id + ".csv");
    const auto json_path = c.out / (id + ".json");
    write_file_atomic(csv_path, o.csv);
    write_file_atomic(json_path, res.summary.dump(2) + "\n");
    res.files = {csv_path, json_path};
    for (const auto& [name, contents] : o.extra) {
      write_file_atomic(c.out / name, contents);
      res.files.push_back(c.out / name);
    }
  }
  return res;
}

}  // namespace lsshadow
