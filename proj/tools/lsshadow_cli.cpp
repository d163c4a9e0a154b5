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

// Command-line front end. Flags given on the command line override the
// matching keys of the --config file.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lsshadow.hpp"

namespace {

using namespace lsshadow;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> samples;
  std::optional<int> workers;
};

void add_common(CLI::App* app, Common& c, bool config_required) {
  auto* opt = app->add_option("--config", c.config, "JSON config file");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--out", c.out, "output path");
  app->add_option("--samples", c.samples, "sample count");
  app->add_option("--workers", c.workers, "worker threads");
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

/// Accepts a bare ensemble object or one nested under "ensemble".
EnsembleSpec ensemble_of(const json& j) { return ensemble_from_json(j.contains("ensemble") ? j["ensemble"] : j); }

std::uint64_t seed_of(const Common& c, const json& j) {
  if (c.seed) return *c.seed;
  if (j.contains("seed")) return j["seed"].get<std::uint64_t>();
  throw ParameterError("a seed is required (--seed or \"seed\" in the config)");
}

int workers_of(const Common& c, const json& j) { return c.workers ? *c.workers : j.value("workers", 1); }

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

void write_or_print(const std::string& out, const json& j) {
  if (out.empty()) print(j);
  else write_file_atomic(out, j.dump(2) + "\n");
}

PauliString parse_pauli(const std::string& s) {
  return PauliString::parse(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical shadow tomography with locally scrambled ensembles"};
  app.require_subcommand(1);

  // ef estimate
  Common ef_c;
  std::string ef_mode = "auto";
  auto* ef = app.add_subcommand("ef", "entanglement features")->require_subcommand(1);
  auto* ef_est = ef->add_subcommand("estimate", "estimate W from the prior snapshot ensemble");
  add_common(ef_est, ef_c, true);
  ef_est->add_option("--mode", ef_mode, "b-mode: auto | sample | enumerate");

  // recon solve
  Common rc_c;
  std::string rc_ef, rc_method = "closed-form";
  auto* recon = app.add_subcommand("recon", "reconstruction coefficients")->require_subcommand(1);
  auto* rc_solve = recon->add_subcommand("solve", "solve for r from an EF file");
  add_common(rc_solve, rc_c, false);
  rc_solve->add_option("--ef", rc_ef, "EF CSV")->required()->check(CLI::ExistingFile);
  rc_solve->add_option("--method", rc_method, "closed-form | dense");

  // shadow collect
  Common sc_c;
  auto* shadow = app.add_subcommand("shadow", "snapshots")->require_subcommand(1);
  auto* sc_collect = shadow->add_subcommand("collect", "collect posterior snapshots to a file");
  add_common(sc_collect, sc_c, true);

  // estimate fidelity | pauli
  Common es_c;
  std::string es_snap, es_recon, es_mode = "sqrt-mean", es_pauli;
  std::size_t es_boot = 1000;
  auto* est = app.add_subcommand("estimate", "estimators on a snapshot file")->require_subcommand(1);
  auto* es_fid = est->add_subcommand("fidelity", "fidelity with the stored state (GHZ by default)");
  auto* es_pau = est->add_subcommand("pauli", "Pauli-string expectation value");
  for (auto* s : {es_fid, es_pau}) {
    add_common(s, es_c, false);
    s->add_option("--snapshots", es_snap, "snapshot file")->required()->check(CLI::ExistingFile);
    s->add_option("--recon", es_recon, "reconstruction CSV")->required()->check(CLI::ExistingFile);
    s->add_option("--bootstrap", es_boot, "bootstrap resamples");
  }
  es_fid->add_option("--mode", es_mode, "sqrt-mean | mean");
  es_pau->add_option("--pauli", es_pauli, "Pauli string, e.g. +ZZIIII")->required();

  // shadownorm
  Common sn_c;
  std::string sn_recon, sn_ef, sn_pauli;
  double sn_eps = 0.0, sn_delta = 0.0;
  auto* sn = app.add_subcommand("shadownorm", "analytic shadow norm of a Pauli observable");
  add_common(sn, sn_c, false);
  sn->add_option("--recon", sn_recon, "reconstruction CSV")->required()->check(CLI::ExistingFile);
  sn->add_option("--ef", sn_ef, "EF CSV of the snapshot ensemble")->required()->check(CLI::ExistingFile);
  sn->add_option("--pauli", sn_pauli, "Pauli string")->required();
  sn->add_option("--eps", sn_eps, "target accuracy (prints the sample bound)");
  sn->add_option("--delta", sn_delta, "failure probability");

  // framegap
  Common fg_c;
  std::optional<std::size_t> fg_ef;
  auto* fg = app.add_subcommand("framegap", "frame-potential gap series and T_Th fit");
  add_common(fg, fg_c, true);
  fg->add_option("--ef-samples", fg_ef, "EF samples per time");

  // experiment run
  Common ex_c;
  auto* ex = app.add_subcommand("experiment", "experiment suite")->require_subcommand(1);
  auto* ex_run = ex->add_subcommand("run", "run one experiment config");
  add_common(ex_run, ex_c, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ef_est) {
      const json cfg = load_json(ef_c.config);
      const Ensemble ens(ensemble_of(cfg));
      const std::size_t n = ef_c.samples ? *ef_c.samples : cfg.value("samples", std::size_t{1000});
      const EFEstimate e = estimate_ef(ens, n, bmode_from_string(ef_mode), seed_of(ef_c, cfg), workers_of(ef_c, cfg));
      const auto near = near_singular_regions(e);
      if (!near.empty())
        std::cerr << "warning: " << near.size()
                  << " closed-form denominators lie within 3 stderr of zero; the solve may be ill-conditioned\n";
      if (ef_c.out.empty()) std::cout << lattice_csv(e.W, &e.stderr_);
      else write_ef(ef_c.out, e);
    } else if (*rc_solve) {
      const EFEstimate e = read_ef(rc_ef);
      ReconVector r;
      if (rc_method == "closed-form") r = solve_recon_closed_form(e.W);
      else if (rc_method == "dense") r = solve_recon_dense(e.W, 2);
      else throw ParameterError("unknown method '" + rc_method + "'");
      if (rc_c.out.empty()) std::cout << lattice_csv(r.r);
      else write_recon(rc_c.out, r, file_hash(rc_ef));
      std::cerr << "residual " << r.residual << " condition " << r.condition << "\n";
    } else if (*sc_collect) {
      const json cfg = load_json(sc_c.config);
      SnapshotFile f;
      f.ensemble = ensemble_of(cfg);
      f.master_seed = seed_of(sc_c, cfg);
      const StateSpec st = cfg.contains("state") ? state_from_json(cfg["state"]) : StateSpec{};
      f.state = to_json(st);
      const std::size_t m = sc_c.samples ? *sc_c.samples : cfg.value("samples", std::size_t{5000});
      f.records = collect_snapshots(Ensemble(f.ensemble), StateSource(st, f.ensemble.n_sites), f.master_seed, m,
                                    workers_of(sc_c, cfg));
      if (sc_c.out.empty()) throw ParameterError("--out is required for shadow collect");
      write_snapshots(sc_c.out, f);
    } else if (*es_fid || *es_pau) {
      const SnapshotFile f = read_snapshots(es_snap);
      const std::uint64_t hash = file_hash(es_snap);
      const Ensemble ens(f.ensemble);
      const ReconVector r = read_recon(es_recon);
      require(r.n_sites() == ens.n_sites(), "reconstruction and snapshot sizes differ");
      const int workers = es_c.workers.value_or(1);
      std::vector<double> v(f.records.size());
      EstimateReport rep;
      Rng rng = make_rng(es_c.seed.value_or(f.master_seed), Stream::bootstrap, 0);
      if (*es_fid) {
        const StateSpec st = f.state.is_null() ? StateSpec{} : state_from_json(f.state);
        const StateSource src(st, ens.n_sites());
        const OverlapEstimator o(r, src.mixed() ? ghz_state(ens.n_sites()) : src.primary());
        parallel_for(v.size(), workers, [&](std::size_t i) { v[i] = o(materialize(ens, f.records[i])); });
        rep = estimate_fidelity(v, es_mode == "mean" ? FidelityMode::mean : FidelityMode::sqrt_mean, rng, es_boot);
        if (rep.biased) std::cerr << "warning: negative mean overlap; reporting the signed square root (biased)\n";
      } else {
        const PauliEstimator p(r, parse_pauli(es_pauli));
        parallel_for(v.size(), workers, [&](std::size_t i) { v[i] = p(materialize(ens, f.records[i])); });
        rep = bootstrap(v, Statistic::mean, es_boot, rng);
        rep.estimator = "pauli " + es_pauli;
      }
      rep.snapshot_hash = hash;
      write_or_print(es_c.out, to_json(rep));
    } else if (*sn) {
      const ReconVector r = read_recon(sn_recon);
      const EFEstimate e = read_ef(sn_ef);
      const PauliString p = parse_pauli(sn_pauli);
      const double norm = shadow_norm(r, e.W, pauli_operator_ef(p));
      json out = {{"pauli", sn_pauli}, {"shadow_norm_sq", norm}};
      if (sn_eps > 0 && sn_delta > 0) out["sample_bound"] = sample_complexity_bound(norm, sn_eps, sn_delta);
      write_or_print(sn_c.out, out);
    } else if (*fg) {
      const json cfg = load_json(fg_c.config);
      const Ensemble ens(ensemble_of(cfg));
      const auto times = cfg.at("T_list").get<std::vector<double>>();
      const std::size_t pairs = fg_c.samples ? *fg_c.samples : cfg.value("pairs", std::size_t{1000});
      const auto pts = frame_gap_series(ens, times, pairs, fg_ef ? *fg_ef : cfg.value("ef_samples", std::size_t{1000}), BMode::automatic,
                                        seed_of(fg_c, cfg), workers_of(fg_c, cfg));
      json summary = {{"ensemble", to_json(ens.spec())}};
      try {
        if (cfg.contains("fit_window")) {
          const auto w = cfg["fit_window"].get<std::vector<double>>();
          summary["fit"] = to_json(fit_scrambling_time(pts, w.at(0), w.at(1)));
        } else {
          summary["fit"] = to_json(fit_scrambling_time_auto(pts));
        }
      } catch (const ParameterError& e) {
        summary["fit_error"] = e.what();
      }
      if (fg_c.out.empty()) {
        std::cout << frame_gap_csv(pts);
        print(summary);
      } else {
        write_file_atomic(fg_c.out, frame_gap_csv(pts));
        write_file_atomic(sidecar_path(fg_c.out), summary.dump(2) + "\n");
      }
    } else if (*ex_run) {
      json cfg = load_json(ex_c.config);
      if (ex_c.seed) cfg["seed"] = *ex_c.seed;
      if (ex_c.samples) cfg["samples"] = *ex_c.samples;
      if (ex_c.workers) cfg["workers"] = *ex_c.workers;
      if (!ex_c.out.empty()) cfg["out"] = ex_c.out;
      const ExperimentResult res = run_experiment(experiment_from_json(cfg));
      for (const auto& p : res.files) std::cout << p.string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
