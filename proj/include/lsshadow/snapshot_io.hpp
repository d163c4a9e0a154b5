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

// Snapshot files: one JSON header line, then one JSON record per line
//   {"i": index, "seed": member seed, "b": outcome as hex}.
// The header carries the canonical ensemble JSON and its FNV-1a hash; a
// reader refuses files whose version or hash does not check out.

#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "lsshadow/ensemble.hpp"
#include "lsshadow/io.hpp"

namespace lsshadow {

inline constexpr int kSnapshotFormatVersion = 1;
inline constexpr const char* kSnapshotFormat = "lsshadow-snapshots";

struct SnapshotFile {
  EnsembleSpec ensemble;
  std::uint64_t master_seed = 0;
  std::vector<SnapshotRecord> records;
  /// Optional description of the measured state (not hashed).
  json state = nullptr;

  std::uint64_t spec_hash() const { return fnv1a(canonical_json(ensemble)); }
};

inline std::string format_hex(Mask b) {
  std::ostringstream s;
  s << std::hex << b;
  return s.str();
}

inline std::string serialize_snapshots(const SnapshotFile& f) {
  json header = {{"format", kSnapshotFormat},
                 {"version", kSnapshotFormatVersion},
                 {"n_sites", f.ensemble.n_sites},
                 {"ensemble", to_json(f.ensemble)},
                 {"master_seed", f.master_seed},
                 {"spec_hash", hex64(f.spec_hash())},
                 {"count", f.records.size()}};
  if (!f.state.is_null()) header["state"] = f.state;
  std::string out = header.dump() + "\n";
  for (const auto& r : f.records)
    out += json{{"i", r.index}, {"seed", r.member_seed}, {"b", format_hex(r.b)}}.dump() + "\n";
  return out;
}

inline SnapshotFile parse_snapshots(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty snapshot file");
  SnapshotFile f;
  try {
    const json h = json::parse(line);
    if (h.value("format", std::string()) != kSnapshotFormat) throw FormatError("not a snapshot file");
    const int version = h.at("version").get<int>();
    if (version != kSnapshotFormatVersion)
      throw FormatError("unsupported snapshot format version " + std::to_string(version));
    f.ensemble = ensemble_from_json(h.at("ensemble"));
    if (h.at("n_sites").get<int>() != f.ensemble.n_sites) throw FormatError("header n_sites does not match ensemble");
    if (h.at("spec_hash").get<std::string>() != hex64(f.spec_hash()))
      throw FormatError("snapshot header hash mismatch: ensemble spec was modified or corrupted");
    f.master_seed = h.at("master_seed").get<std::uint64_t>();
    if (h.contains("state")) f.state = h["state"];
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json r = json::parse(line);
      SnapshotRecord rec;
      rec.index = r.at("i").get<std::uint64_t>();
      rec.member_seed = r.at("seed").get<std::uint64_t>();
      rec.b = static_cast<Mask>(std::stoul(r.at("b").get<std::string>(), nullptr, 16));
      if (rec.b > full_mask(f.ensemble.n_sites)) throw FormatError("outcome out of range");
      f.records.push_back(rec);
    }
    if (h.contains("count") && h["count"].get<std::size_t>() != f.records.size())
      throw FormatError("snapshot file truncated");
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad snapshot file: ") + e.what());
  } catch (const std::logic_error& e) {
    throw FormatError(std::string("bad snapshot record: ") + e.what());
  }
  return f;
}

inline void write_snapshots(const std::filesystem::path& p, const SnapshotFile& f) {
  write_file_atomic(p, serialize_snapshots(f));
}

inline SnapshotFile read_snapshots(const std::filesystem::path& p) { return parse_snapshots(read_file(p)); }

}  // namespace lsshadow
