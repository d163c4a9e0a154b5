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

// File formats: lattice vectors as CSV with JSON sidecars, frame-gap series,
// and report rows. Every file is written to a temporary and renamed.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "lsshadow/entanglement.hpp"
#include "lsshadow/estimators.hpp"
#include "lsshadow/frame_potential.hpp"
#include "lsshadow/reconstruction.hpp"
#include "lsshadow/region.hpp"

namespace lsshadow {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw FormatError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::uint64_t file_hash(const std::filesystem::path& path) { return fnv1a(read_file(path)); }

// ---------------------------------------------------------------- lattice vectors

inline std::string lattice_csv(const LatticeVector& v, const LatticeVector* stderr_ = nullptr) {
  std::string out = stderr_ ? "mask,value,stderr\n" : "mask,value\n";
  for (Mask m = 0; m < v.size(); ++m) {
    out += std::to_string(m) + "," + format_double(v[m]);
    if (stderr_) out += "," + format_double((*stderr_)[m]);
    out += "\n";
  }
  return out;
}

struct LatticeTable {
  LatticeVector value;
  std::optional<LatticeVector> stderr_;
};

inline LatticeTable parse_lattice_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty lattice CSV");
  bool has_se = false;
  if (line == "mask,value,stderr") has_se = true;
  else if (line != "mask,value") throw FormatError("bad lattice CSV header '" + line + "'");
  std::vector<double> vals, ses;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    try {
      if (std::stoull(a) != vals.size()) throw FormatError("lattice CSV rows must be sorted by mask without gaps");
      vals.push_back(std::stod(b));
      if (has_se) {
        std::getline(row, c, ',');
        ses.push_back(std::stod(c));
      }
    } catch (const std::logic_error&) {
      throw FormatError("bad lattice CSV row '" + line + "'");
    }
  }
  const auto len = vals.size();
  if (len < 2 || (len & (len - 1)) != 0) throw FormatError("lattice CSV must have 2^N rows");
  const int n = std::countr_zero(len);
  LatticeTable t{LatticeVector(n, std::move(vals)), std::nullopt};
  if (has_se) t.stderr_ = LatticeVector(n, std::move(ses));
  return t;
}

inline LatticeTable read_lattice_csv(const std::filesystem::path& p) { return parse_lattice_csv(read_file(p)); }

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path s = csv;
  s.replace_extension(".json");
  return s;
}

inline void write_ef(const std::filesystem::path& csv, const EFEstimate& ef) {
  write_file_atomic(csv, lattice_csv(ef.W, &ef.stderr_));
  json side = {{"kind", "entanglement_feature"},
               {"ensemble", to_json(ef.ensemble)},
               {"n_samples", ef.n_samples},
               {"seed", ef.seed},
               {"b_mode", to_string(ef.mode)}};
  write_file_atomic(sidecar_path(csv), side.dump(2) + "\n");
}

inline EFEstimate read_ef(const std::filesystem::path& csv) {
  LatticeTable t = read_lattice_csv(csv);
  EFEstimate ef;
  ef.W = t.value;
  ef.stderr_ = t.stderr_ ? *t.stderr_ : LatticeVector(t.value.n_sites());
  const auto side_path = sidecar_path(csv);
  if (std::filesystem::exists(side_path)) {
    try {
      const json side = json::parse(read_file(side_path));
      ef.ensemble = ensemble_from_json(side.at("ensemble"));
      ef.n_samples = side.at("n_samples").get<std::size_t>();
      ef.seed = side.at("seed").get<std::uint64_t>();
      ef.mode = bmode_from_string(side.value("b_mode", std::string("sample")));
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad EF sidecar: ") + e.what());
    }
    if (ef.ensemble.n_sites != ef.n_sites()) throw FormatError("EF sidecar size does not match CSV");
  }
  return ef;
}

inline void write_recon(const std::filesystem::path& csv, const ReconVector& r, std::uint64_t source_hash) {
  write_file_atomic(csv, lattice_csv(r.r));
  json side = {{"kind", "reconstruction"},
               {"d", r.d},
               {"source", to_string(r.source)},
               {"ef_file_hash", hex64(source_hash)},
               {"residual", r.residual},
               {"condition", std::isfinite(r.condition) ? json(r.condition) : json(nullptr)}};
  write_file_atomic(sidecar_path(csv), side.dump(2) + "\n");
}

inline ReconVector read_recon(const std::filesystem::path& csv) {
  ReconVector r;
  r.r = read_lattice_csv(csv).value;
  const auto side_path = sidecar_path(csv);
  if (std::filesystem::exists(side_path)) {
    const json side = json::parse(read_file(side_path));
    r.d = side.value("d", 2);
    r.residual = side.value("residual", 0.0);
  }
  return r;
}

// ---------------------------------------------------------------- frame gaps

inline std::string frame_gap_csv(const std::vector<GapPoint>& pts) {
  std::string out = "T,delta,stderr,n_pairs,f2,f2_stderr,f2_ls,f2_ls_stderr\n";
  for (const auto& p : pts)
    out += format_double(p.t) + "," + format_double(p.delta) + "," + format_double(p.stderr_) + "," +
           std::to_string(p.f2.n) + "," + format_double(p.f2.value) + "," + format_double(p.f2.stderr_) + "," +
           format_double(p.f2_ls.value) + "," + format_double(p.f2_ls.stderr_) + "\n";
  return out;
}

inline json to_json(const ScramblingFit& f) {
  return {{"T_th", f.t_th},
          {"T_th_stderr", f.t_th_stderr},
          {"r2", f.r2},
          {"slope", f.slope},
          {"window", {f.t_lo, f.t_hi}},
          {"n_used", f.n_used},
          {"n_dropped", f.n_dropped},
          {"heuristic_window", f.heuristic}};
}

// ---------------------------------------------------------------- report rows

struct ReportRow {
  std::string experiment;
  int n_sites = 0;
  double axis = 0.0;  // L or T
  std::string estimator;
  double value = 0.0;
  double stderr_ = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

inline constexpr const char* kReportHeader =
    "experiment,N,L_or_T,estimator,value,stderr,ci_lo,ci_hi,n_samples,seed,config_hash\n";

inline std::string report_csv_row(const ReportRow& r) {
  return r.experiment + "," + std::to_string(r.n_sites) + "," + format_double(r.axis) + "," + r.estimator + "," +
         format_double(r.value) + "," + format_double(r.stderr_) + "," + format_double(r.ci_lo) + "," +
         format_double(r.ci_hi) + "," + std::to_string(r.n_samples) + "," + std::to_string(r.seed) + "," +
         hex64(r.config_hash) + "\n";
}

inline json to_json(const ReportRow& r) {
  return {{"experiment", r.experiment}, {"N", r.n_sites},           {"L_or_T", r.axis},
          {"estimator", r.estimator},   {"value", r.value},         {"stderr", r.stderr_},
          {"ci_lo", r.ci_lo},           {"ci_hi", r.ci_hi},         {"n_samples", r.n_samples},
          {"seed", r.seed},             {"config_hash", hex64(r.config_hash)}};
}

inline json to_json(const EstimateReport& r) {
  return {{"value", r.value},         {"stderr", r.stderr_}, {"level", r.level},
          {"ci_lo", r.ci_lo},         {"ci_hi", r.ci_hi},    {"n_samples", r.n_samples},
          {"estimator", r.estimator}, {"snapshot_hash", hex64(r.snapshot_hash)}, {"biased", r.biased}};
}

}  // namespace lsshadow
