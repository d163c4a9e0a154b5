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

// Measurement ensembles, circuit instances and snapshot generation.
//
// A circuit instance is a pure function of (spec, member seed). A snapshot is
// stored as (index, member seed, outcome b) and materialized by replaying
// U^dagger on |b>.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "lsshadow/clifford.hpp"
#include "lsshadow/core.hpp"
#include "lsshadow/dense.hpp"
#include "lsshadow/rng.hpp"

namespace lsshadow {

using json = nlohmann::json;

enum class EnsembleKind { onsite_haar, onsite_clifford, brickwall, global_haar, sandwich, gue2, dqim, rydberg };

inline std::string to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::onsite_haar: return "onsite_haar";
    case EnsembleKind::onsite_clifford: return "onsite_clifford";
    case EnsembleKind::brickwall: return "brickwall";
    case EnsembleKind::global_haar: return "global_haar";
    case EnsembleKind::sandwich: return "sandwich";
    case EnsembleKind::gue2: return "gue2";
    case EnsembleKind::dqim: return "dqim";
    case EnsembleKind::rydberg: return "rydberg";
  }
  return "?";
}

inline EnsembleKind ensemble_kind_from_string(const std::string& s) {
  for (auto k : {EnsembleKind::onsite_haar, EnsembleKind::onsite_clifford, EnsembleKind::brickwall,
                 EnsembleKind::global_haar, EnsembleKind::sandwich, EnsembleKind::gue2, EnsembleKind::dqim,
                 EnsembleKind::rydberg})
    if (to_string(k) == s) return k;
  throw ParameterError("unknown ensemble kind '" + s + "'");
}

/// Fixed part of a sandwich: a Clifford gate list or a Rydberg quench.
enum class FixedKind { clifford, rydberg };

struct GateSpec {
  CliffordGateKind kind = CliffordGateKind::cnot;
  std::vector<int> sites;
};

/// CNOT(0->1), CNOT(1->2), ..., CNOT(N-2 -> N-1).
inline std::vector<GateSpec> cnot_staircase(int n_sites) {
  std::vector<GateSpec> g;
  for (int i = 0; i + 1 < n_sites; ++i) g.push_back({CliffordGateKind::cnot, {i, i + 1}});
  return g;
}

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::onsite_haar;
  int n_sites = 1;
  int depth = 0;          // brickwall L
  bool periodic = true;   // brickwall / gue2 boundary
  double time = 0.0;      // gue2, rydberg, sandwich-rydberg
  int steps = 0;          // dqim T
  double coupling = 1.0;  // dqim mean J
  double field = std::numbers::pi / 4;
  bool single_instance = false;  // dqim: freeze J_ij across members
  FixedKind fixed = FixedKind::clifford;
  std::vector<GateSpec> gates;  // sandwich Clifford part; empty means staircase
  RydbergParams rydberg;
  std::uint64_t seed = 0;  // instance-level randomness (frozen couplings)

  void validate() const {
    require_sites(n_sites);
    require(depth >= 0, "depth L must be >= 0");
    require(steps >= 0, "steps must be >= 0");
    require(std::isfinite(time) && time >= 0.0, "evolution time must be finite and >= 0");
    require(std::isfinite(coupling) && std::isfinite(field), "DQIM parameters must be finite");
    require(std::isfinite(rydberg.omega) && std::isfinite(rydberg.delta) && std::isfinite(rydberg.blockade_radius) &&
                std::isfinite(rydberg.spacing) && rydberg.spacing > 0,
            "Rydberg parameters must be finite");
    if (kind == EnsembleKind::gue2 || kind == EnsembleKind::dqim) require(n_sites >= 2, "needs N >= 2");
    if (kind == EnsembleKind::global_haar) require(n_sites <= 10, "global Haar limited to N <= 10");
    for (const auto& g : gates) {
      const std::size_t want = g.kind == CliffordGateKind::cnot ? 2 : 1;
      require(g.sites.size() == want, "gate has wrong number of sites");
      for (int s : g.sites) require(s >= 0 && s < n_sites, "gate site out of range");
      if (want == 2) require(g.sites[0] != g.sites[1], "CNOT needs distinct sites");
    }
  }

  std::vector<GateSpec> fixed_gates() const { return gates.empty() ? cnot_staircase(n_sites) : gates; }

  static EnsembleSpec make(EnsembleKind k, int n) {
    EnsembleSpec s;
    s.kind = k;
    s.n_sites = n;
    s.periodic = k == EnsembleKind::brickwall;
    return s;
  }
  static EnsembleSpec brickwall_circuit(int n, int depth, bool periodic = true) {
    EnsembleSpec s = make(EnsembleKind::brickwall, n);
    s.depth = depth;
    s.periodic = periodic;
    return s;
  }
  static EnsembleSpec gue2_quench(int n, double t, bool periodic = false) {
    EnsembleSpec s = make(EnsembleKind::gue2, n);
    s.time = t;
    s.periodic = periodic;
    return s;
  }
  static EnsembleSpec dqim_quench(int n, int steps, double j, bool single_instance, std::uint64_t seed) {
    EnsembleSpec s = make(EnsembleKind::dqim, n);
    s.steps = steps;
    s.coupling = j;
    s.single_instance = single_instance;
    s.seed = seed;
    return s;
  }
  static EnsembleSpec cnot_sandwich(int n) { return make(EnsembleKind::sandwich, n); }
  static EnsembleSpec rydberg_sandwich(int n, double t) {
    EnsembleSpec s = make(EnsembleKind::sandwich, n);
    s.fixed = FixedKind::rydberg;
    s.time = t;
    return s;
  }
};

inline std::string gate_name(CliffordGateKind k) {
  switch (k) {
    case CliffordGateKind::h: return "h";
    case CliffordGateKind::s: return "s";
    case CliffordGateKind::sdg: return "sdg";
    case CliffordGateKind::cnot: return "cnot";
  }
  return "?";
}

inline CliffordGateKind gate_kind_from_string(const std::string& s) {
  if (s == "h") return CliffordGateKind::h;
  if (s == "s") return CliffordGateKind::s;
  if (s == "sdg") return CliffordGateKind::sdg;
  if (s == "cnot") return CliffordGateKind::cnot;
  throw TypeError("non-Clifford or unknown gate '" + s + "'");
}

/// Canonical JSON: only the fields relevant to the kind, keys sorted.
inline json to_json(const EnsembleSpec& s) {
  json j;
  j["kind"] = to_string(s.kind);
  j["n_sites"] = s.n_sites;
  switch (s.kind) {
    case EnsembleKind::brickwall:
      j["depth"] = s.depth;
      j["periodic"] = s.periodic;
      break;
    case EnsembleKind::gue2:
      j["time"] = s.time;
      j["periodic"] = s.periodic;
      break;
    case EnsembleKind::dqim:
      j["steps"] = s.steps;
      j["coupling"] = s.coupling;
      j["field"] = s.field;
      j["single_instance"] = s.single_instance;
      j["seed"] = s.seed;
      break;
    case EnsembleKind::rydberg:
      j["time"] = s.time;
      j["rydberg"] = {{"omega", s.rydberg.omega},
                      {"delta", s.rydberg.delta},
                      {"blockade_radius", s.rydberg.blockade_radius},
                      {"spacing", s.rydberg.spacing}};
      break;
    case EnsembleKind::sandwich:
      if (s.fixed == FixedKind::clifford) {
        j["fixed"] = "clifford";
        json gates = json::array();
        for (const auto& g : s.fixed_gates()) gates.push_back({{"gate", gate_name(g.kind)}, {"sites", g.sites}});
        j["gates"] = gates;
      } else {
        j["fixed"] = "rydberg";
        j["time"] = s.time;
        j["rydberg"] = {{"omega", s.rydberg.omega},
                        {"delta", s.rydberg.delta},
                        {"blockade_radius", s.rydberg.blockade_radius},
                        {"spacing", s.rydberg.spacing}};
      }
      break;
    default:
      break;
  }
  return j;
}

inline EnsembleSpec ensemble_from_json(const json& j) {
  EnsembleSpec s;
  try {
    s.kind = ensemble_kind_from_string(j.at("kind").get<std::string>());
    s.n_sites = j.at("n_sites").get<int>();
    s.depth = j.value("depth", 0);
    s.periodic = j.value("periodic", s.kind == EnsembleKind::brickwall);
    s.time = j.value("time", 0.0);
    s.steps = j.value("steps", 0);
    s.coupling = j.value("coupling", 1.0);
    s.field = j.value("field", std::numbers::pi / 4);
    s.single_instance = j.value("single_instance", false);
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("rydberg")) {
      const auto& r = j["rydberg"];
      s.rydberg.omega = r.value("omega", s.rydberg.omega);
      s.rydberg.delta = r.value("delta", s.rydberg.delta);
      s.rydberg.blockade_radius = r.value("blockade_radius", s.rydberg.blockade_radius);
      s.rydberg.spacing = r.value("spacing", s.rydberg.spacing);
    }
    if (s.kind == EnsembleKind::sandwich) {
      const std::string fixed = j.value("fixed", std::string("clifford"));
      if (fixed == "clifford") s.fixed = FixedKind::clifford;
      else if (fixed == "rydberg") s.fixed = FixedKind::rydberg;
      else throw ParameterError("unknown sandwich fixed part '" + fixed + "'");
      if (j.contains("gates"))
        for (const auto& g : j["gates"])
          s.gates.push_back({gate_kind_from_string(g.at("gate").get<std::string>()), g.at("sites").get<std::vector<int>>()});
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad ensemble JSON: ") + e.what());
  }
  s.validate();
  return s;
}

inline std::string canonical_json(const EnsembleSpec& s) { return to_json(s).dump(); }

/// FNV-1a 64-bit.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------- circuit instances

struct Op {
  enum class Kind { single, two, cnot, clifford1, dense };
  Kind kind = Kind::single;
  int q0 = 0, q1 = 0;
  int element = 0;  // clifford1 index
  Mat2 m2 = Mat2::Identity();
  Mat4 m4 = Mat4::Identity();
  std::shared_ptr<const CMatrix> u, u_dag;
};

/// Ordered gate list; ops[0] acts first.
class CircuitInstance {
 public:
  explicit CircuitInstance(int n = 1) : n_(n) {}

  int n_sites() const noexcept { return n_; }
  const std::vector<Op>& ops() const noexcept { return ops_; }

  void add_single(int q, const Mat2& m) { ops_.push_back(make(Op::Kind::single, q, q, m)); }
  void add_two(int q0, int q1, const Mat4& m) {
    Op o;
    o.kind = Op::Kind::two;
    o.q0 = q0;
    o.q1 = q1;
    o.m4 = m;
    ops_.push_back(o);
  }
  void add_cnot(int c, int t) {
    Op o;
    o.kind = Op::Kind::cnot;
    o.q0 = c;
    o.q1 = t;
    ops_.push_back(o);
  }
  void add_clifford1(int q, int element) {
    Op o = make(Op::Kind::clifford1, q, q, single_qubit_cliffords().at(static_cast<std::size_t>(element)).matrix);
    o.element = element;
    ops_.push_back(o);
  }
  void add_clifford_gate(const GateSpec& g) {
    switch (g.kind) {
      case CliffordGateKind::cnot: add_cnot(g.sites[0], g.sites[1]); break;
      case CliffordGateKind::h: add_clifford1(g.sites[0], element_of("H")); break;
      case CliffordGateKind::s: add_clifford1(g.sites[0], element_of("S")); break;
      case CliffordGateKind::sdg: add_clifford1(g.sites[0], element_of("SSS")); break;
    }
  }
  void add_dense(std::shared_ptr<const CMatrix> u) {
    require(u && u->rows() == (Eigen::Index{1} << n_), "dense op must be 2^N x 2^N");
    Op o;
    o.kind = Op::Kind::dense;
    o.u = u;
    o.u_dag = std::make_shared<const CMatrix>(u->adjoint());
    ops_.push_back(o);
  }

  std::size_t two_qubit_gate_count() const {
    std::size_t c = 0;
    for (const auto& o : ops_) c += (o.kind == Op::Kind::two || o.kind == Op::Kind::cnot);
    return c;
  }

  bool is_clifford() const {
    for (const auto& o : ops_)
      if (o.kind != Op::Kind::cnot && o.kind != Op::Kind::clifford1) return false;
    return true;
  }

  void apply(CVector& psi) const {
    for (const auto& o : ops_) apply_op(psi, o, false);
  }

  void apply_inverse(CVector& psi) const {
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) apply_op(psi, *it, true);
  }

  /// U^dagger |b>.
  CVector snapshot_vector(Mask b) const {
    CVector v = CVector::Zero(Eigen::Index{1} << n_);
    v[b] = 1.0;
    apply_inverse(v);
    return v;
  }

  CMatrix unitary() const {
    const Eigen::Index dim = Eigen::Index{1} << n_;
    CMatrix u(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
      CVector v = CVector::Zero(dim);
      v[c] = 1.0;
      apply(v);
      u.col(c) = v;
    }
    return u;
  }

  /// Tableau of U^dagger |b>; requires an all-Clifford circuit.
  StabilizerTableau snapshot_tableau(Mask b) const {
    if (!is_clifford()) throw TypeError("circuit contains non-Clifford operations");
    StabilizerTableau t(n_, b);
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
      if (it->kind == Op::Kind::cnot) t.cnot(it->q0, it->q1);
      else t.clifford1_inverse(it->q0, it->element);
    }
    return t;
  }

 private:
  static Op make(Op::Kind k, int q0, int q1, const Mat2& m) {
    Op o;
    o.kind = k;
    o.q0 = q0;
    o.q1 = q1;
    o.m2 = m;
    return o;
  }
  static int element_of(const std::string& word) {
    const auto& g = single_qubit_cliffords();
    const auto target = detail::conj_images(word);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (detail::conj_images(g[i].word) == target) return static_cast<int>(i);
    throw Error("Clifford element not found");
  }
  static void apply_op(CVector& psi, const Op& o, bool inverse) {
    switch (o.kind) {
      case Op::Kind::single:
      case Op::Kind::clifford1: apply_single(psi, o.q0, inverse ? Mat2(o.m2.adjoint()) : o.m2); break;
      case Op::Kind::two: apply_two(psi, o.q0, o.q1, inverse ? Mat4(o.m4.adjoint()) : o.m4); break;
      case Op::Kind::cnot: apply_cnot(psi, o.q0, o.q1); break;
      case Op::Kind::dense: psi = (inverse ? *o.u_dag : *o.u) * psi; break;
    }
  }

  int n_;
  std::vector<Op> ops_;
};

/// Brick-wall layer pairs. Even N alternates offsets 0/1; odd N rotates the
/// offset by one site per layer and leaves one site idle.
inline std::vector<std::pair<int, int>> brickwall_layer(int n_sites, int layer, bool periodic) {
  std::vector<std::pair<int, int>> pairs;
  if (n_sites < 2) return pairs;
  if (!periodic) {
    for (int a = layer % 2; a + 1 < n_sites; a += 2) pairs.emplace_back(a, a + 1);
    return pairs;
  }
  const int offset = (n_sites % 2 == 0) ? layer % 2 : layer % n_sites;
  for (int k = 0; k < n_sites / 2; ++k) {
    const int a = (offset + 2 * k) % n_sites;
    pairs.emplace_back(a, (a + 1) % n_sites);
  }
  return pairs;
}

/// An ensemble with its instance-level precomputation (fixed unitaries,
/// frozen couplings). Immutable and shareable across threads.
class Ensemble {
 public:
  explicit Ensemble(EnsembleSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const int n = spec_.n_sites;
    if (spec_.kind == EnsembleKind::rydberg ||
        (spec_.kind == EnsembleKind::sandwich && spec_.fixed == FixedKind::rydberg)) {
      fixed_ = std::make_shared<const CMatrix>(evolve(build_rydberg_hamiltonian(n, spec_.rydberg), spec_.time));
    }
    if (spec_.kind == EnsembleKind::dqim && spec_.single_instance) {
      Rng rng = make_rng(spec_.seed, Stream::instance, 0);
      couplings_ = IsingCouplings::sample(n, spec_.coupling, rng);
    }
  }

  const EnsembleSpec& spec() const noexcept { return spec_; }
  int n_sites() const noexcept { return spec_.n_sites; }
  const std::optional<IsingCouplings>& frozen_couplings() const noexcept { return couplings_; }

  /// True when the unitary distribution is invariant under on-site rotations.
  bool locally_scrambled() const {
    switch (spec_.kind) {
      case EnsembleKind::gue2:
      case EnsembleKind::dqim:
      case EnsembleKind::rydberg: return false;
      default: return true;
    }
  }

  CircuitInstance member(std::uint64_t member_seed) const {
    const int n = spec_.n_sites;
    Rng rng(member_seed);
    CircuitInstance c(n);
    switch (spec_.kind) {
      case EnsembleKind::onsite_haar:
        for (int q = 0; q < n; ++q) c.add_single(q, sample_haar_unitary(2, rng));
        break;
      case EnsembleKind::onsite_clifford:
        for (int q = 0; q < n; ++q) c.add_clifford1(q, sample_single_qubit_clifford(rng));
        break;
      case EnsembleKind::brickwall:
        for (int q = 0; q < n; ++q) c.add_single(q, sample_haar_unitary(2, rng));
        for (int layer = 0; layer < spec_.depth; ++layer)
          for (auto [a, b] : brickwall_layer(n, layer, spec_.periodic)) c.add_two(a, b, sample_haar_unitary(4, rng));
        break;
      case EnsembleKind::global_haar:
        c.add_dense(std::make_shared<const CMatrix>(sample_haar_unitary(1 << n, rng)));
        break;
      case EnsembleKind::sandwich:
        for (int q = 0; q < n; ++q) c.add_clifford1(q, sample_single_qubit_clifford(rng));
        if (spec_.fixed == FixedKind::clifford) {
          for (const auto& g : spec_.fixed_gates()) c.add_clifford_gate(g);
        } else {
          c.add_dense(fixed_);
        }
        for (int q = 0; q < n; ++q) c.add_clifford1(q, sample_single_qubit_clifford(rng));
        break;
      case EnsembleKind::gue2:
      case EnsembleKind::dqim:
        c.add_dense(std::make_shared<const CMatrix>(member_unitaries(member_seed, {spec_.kind == EnsembleKind::dqim
                                                                                      ? static_cast<double>(spec_.steps)
                                                                                      : spec_.time})
                                                        .front()));
        break;
      case EnsembleKind::rydberg:
        c.add_dense(fixed_);
        break;
    }
    return c;
  }

  /// Member unitaries at several times from one member seed (GUE2: one
  /// eigendecomposition; DQIM: integer step counts, shared theta prefix).
  std::vector<CMatrix> member_unitaries(std::uint64_t member_seed, const std::vector<double>& times) const {
    const int n = spec_.n_sites;
    Rng rng(member_seed);
    std::vector<CMatrix> out;
    if (spec_.kind == EnsembleKind::gue2) {
      const HermitianEvolution ev(build_gue2_hamiltonian(n, spec_.periodic, rng));
      for (double t : times) out.push_back(ev.unitary(t));
      return out;
    }
    if (spec_.kind == EnsembleKind::dqim) {
      const IsingCouplings cp = couplings_ ? *couplings_ : IsingCouplings::sample(n, spec_.coupling, rng);
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      int max_steps = 0;
      for (double t : times) {
        require(t >= 0 && std::floor(t) == t, "DQIM times must be integer step counts");
        max_steps = std::max(max_steps, static_cast<int>(t));
      }
      std::vector<CMatrix> prefix{CMatrix::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n)};
      for (int step = 1; step <= max_steps; ++step) {
        const double theta = angle(rng);
        prefix.push_back(evolve(build_dqim_hamiltonian(cp, spec_.field, theta), 1.0) * prefix.back());
      }
      for (double t : times) out.push_back(prefix[static_cast<std::size_t>(t)]);
      return out;
    }
    throw ParameterError("time series only defined for gue2 and dqim ensembles");
  }

 private:
  EnsembleSpec spec_;
  std::shared_ptr<const CMatrix> fixed_;
  std::optional<IsingCouplings> couplings_;
};

// ---------------------------------------------------------------- states to be measured

enum class StateKind { ghz, z_error_ghz, random_haar, basis };

struct StateSpec {
  StateKind kind = StateKind::ghz;
  double p = 0.0;
  Mask basis = 0;
  std::uint64_t seed = 0;
};

inline json to_json(const StateSpec& s) {
  switch (s.kind) {
    case StateKind::ghz: return {{"kind", "ghz"}};
    case StateKind::z_error_ghz: return {{"kind", "z_error_ghz"}, {"p", s.p}};
    case StateKind::random_haar: return {{"kind", "random_haar"}, {"seed", s.seed}};
    case StateKind::basis: return {{"kind", "basis"}, {"b", s.basis}};
  }
  return {};
}

inline StateSpec state_from_json(const json& j) {
  StateSpec s;
  const std::string k = j.value("kind", std::string("ghz"));
  if (k == "ghz") s.kind = StateKind::ghz;
  else if (k == "z_error_ghz") s.kind = StateKind::z_error_ghz;
  else if (k == "random_haar") s.kind = StateKind::random_haar;
  else if (k == "basis") s.kind = StateKind::basis;
  else throw ParameterError("unknown state kind '" + k + "'");
  s.p = j.value("p", 0.0);
  s.basis = j.value("b", Mask{0});
  s.seed = j.value("seed", std::uint64_t{0});
  require(s.p >= 0.0 && s.p <= 1.0, "error probability must lie in [0, 1]");
  return s;
}

/// Pure-state sampler for the measured state; a mixture is realized by
/// drawing one branch per shot.
class StateSource {
 public:
  StateSource(const StateSpec& spec, int n_sites) : spec_(spec), n_(n_sites) {
    require(spec.p >= 0.0 && spec.p <= 1.0, "error probability must lie in [0, 1]");
    switch (spec.kind) {
      case StateKind::ghz: primary_ = ghz_state(n_sites, +1); break;
      case StateKind::z_error_ghz:
        primary_ = ghz_state(n_sites, +1);
        alternate_ = ghz_state(n_sites, -1);
        break;
      case StateKind::random_haar: {
        Rng rng = make_rng(spec.seed, Stream::state, 0);
        primary_ = random_haar_state(n_sites, rng);
        break;
      }
      case StateKind::basis: primary_ = basis_state(n_sites, spec.basis); break;
    }
  }
  explicit StateSource(PureState s) : n_(s.n_sites), primary_(std::move(s)) { primary_.check_normalized(); }

  int n_sites() const noexcept { return n_; }
  const PureState& primary() const noexcept { return primary_; }
  bool mixed() const noexcept { return spec_.kind == StateKind::z_error_ghz && spec_.p > 0.0; }

  const PureState& draw(Rng& rng) const {
    if (!mixed()) return primary_;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    return uni(rng) < spec_.p ? alternate_ : primary_;
  }

  DensityMatrix density() const {
    if (spec_.kind == StateKind::z_error_ghz) return z_error_ghz_density(n_, spec_.p);
    return DensityMatrix::from_pure(primary_);
  }

 private:
  StateSpec spec_;
  int n_;
  PureState primary_, alternate_;
};

// ---------------------------------------------------------------- snapshots

struct SnapshotRecord {
  std::uint64_t index = 0;
  std::uint64_t member_seed = 0;
  Mask b = 0;
  bool operator==(const SnapshotRecord&) const = default;
};

/// Measures the state through the circuit: returns b ~ |<b|U psi>|^2.
inline Mask measure(const CircuitInstance& c, const PureState& psi, Rng& rng) {
  psi.check_normalized();
  require(psi.n_sites == c.n_sites(), "state/circuit size mismatch");
  CVector v = psi.amps;
  c.apply(v);
  return sample_outcome(v, rng);
}

/// Generates snapshot i of a posterior ensemble. Member, outcome and state
/// randomness come from separate streams of the master seed.
inline SnapshotRecord take_snapshot(const Ensemble& ens, const StateSource& state, std::uint64_t master,
                                    std::uint64_t index, CircuitInstance* circuit_out = nullptr) {
  SnapshotRecord rec;
  rec.index = index;
  rec.member_seed = derive_seed(master, Stream::member, index);
  CircuitInstance c = ens.member(rec.member_seed);
  Rng state_rng = make_rng(master, Stream::state, index);
  Rng out_rng = make_rng(master, Stream::outcome, index);
  rec.b = measure(c, state.draw(state_rng), out_rng);
  if (circuit_out) *circuit_out = std::move(c);
  return rec;
}

/// Materializes U^dagger |b> for a stored record.
inline CVector materialize(const Ensemble& ens, const SnapshotRecord& rec) {
  return ens.member(rec.member_seed).snapshot_vector(rec.b);
}

inline StabilizerTableau materialize_tableau(const Ensemble& ens, const SnapshotRecord& rec) {
  return ens.member(rec.member_seed).snapshot_tableau(rec.b);
}

/// Calls fn(i, record, phi) for i in [0, m), in parallel; fn must only write
/// to slot i of its outputs.
inline void for_each_snapshot(const Ensemble& ens, const StateSource& state, std::uint64_t master, std::size_t m,
                              int workers,
                              const std::function<void(std::size_t, const SnapshotRecord&, const CVector&)>& fn) {
  require(state.n_sites() == ens.n_sites(), "state/ensemble size mismatch");
  parallel_for(m, workers, [&](std::size_t i) {
    CircuitInstance c;
    const SnapshotRecord rec = take_snapshot(ens, state, master, i, &c);
    fn(i, rec, c.snapshot_vector(rec.b));
  });
}

inline std::vector<SnapshotRecord> collect_snapshots(const Ensemble& ens, const StateSource& state,
                                                     std::uint64_t master, std::size_t m, int workers = 1) {
  std::vector<SnapshotRecord> out(m);
  parallel_for(m, workers, [&](std::size_t i) { out[i] = take_snapshot(ens, state, master, i); });
  return out;
}

}  // namespace lsshadow
