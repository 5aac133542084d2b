// Copyright 2026 The qpft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qpft/dmorph.hpp"
#include "qpft/noise.hpp"
#include "qpft/pft.hpp"
#include "qpft/spinsys.hpp"
#include "qpft/toml.hpp"

namespace qpft::config {

struct SystemBlock {
  int qubits = 2;
  std::vector<double> omega;  // empty: default frequencies
  std::optional<double> coupling;
  std::optional<RMatrix> couplings;

  SpinSystem build() const {
    std::vector<double> w = omega;
    if (w.empty()) w = SpinSystem::default_frequencies(qubits);
    if (static_cast<int>(w.size()) != qubits) throw Error("system: omega must have n entries");
    if (couplings) return SpinSystem(w, *couplings);
    return SpinSystem::uniform(w, coupling.value_or(0.8));
  }
};

struct GateBlock {
  std::string name = "CNOT";
  int phase_index = 0;
  double alpha = kPi / 2.0;
  std::uint64_t seed = 1;

  GateSpec spec() const { return parse_gate(name, alpha, seed); }
};

struct OptimizeBlock {
  double final_time = 10.0;
};

struct SweepBlock {
  std::vector<double> j_values{0.8, 1.6, 3.2};
  double reference_t0 = 4.5;
  double reference_j = 0.8;
  // Unequal coupling sets (upper triangle, row-major), each with its own T0.
  std::vector<std::vector<double>> coupling_sets;
  std::vector<double> coupling_t0;
};

struct NoiseBlock {
  std::vector<double> sigma2{1e-5};
  double final_time = 10.0;
  int trials = 2000;
  std::optional<RMatrix> beta;
  int substeps = 4;
  std::string fields_path;  // optional archive of optimal fields
};

struct PhasesBlock {
  double final_time = 9.0;
  int runs = 20;
};

enum class Format { Csv, Json };

/// Everything an experiment needs; validated before any computation.
struct ExperimentConfig {
  SystemBlock system;
  GateBlock gate;
  ObjectiveKind objective = ObjectiveKind::PhaseDependent;
  double grid_safety = 0.9;
  DmorphSettings optimizer;
  OptimizeBlock optimize;
  PftSettings pft;
  SweepBlock sweep;
  NoiseBlock noise;
  PhasesBlock phases;
  std::vector<std::uint64_t> seeds{1};
  std::string output = "out";
  int jobs = 1;
  Format format = Format::Csv;
  int spectral_components = 10;

  /// Copies shared settings into the PFT block and checks cross-field ranges.
  void finalize() {
    pft.dmorph = optimizer;
    pft.grid_safety = grid_safety;
    pft.spectral_components = spectral_components;
    if (!(grid_safety > 0.0 && grid_safety < 1.0))
      throw Error("grid_safety must lie in (0, 1)");
    if (seeds.empty()) throw Error("seeds must not be empty");
    if (jobs < 1) throw Error("jobs must be >= 1");
    optimizer.validate();
    pft.validate();
    if (noise.trials < 1) throw Error("noise.trials must be >= 1");
    if (noise.substeps < 1) throw Error("noise.substeps must be >= 1");
    if (phases.runs < 1) throw Error("phases.runs must be >= 1");
    if (sweep.coupling_t0.size() != sweep.coupling_sets.size() && !sweep.coupling_t0.empty())
      throw Error("sweep.coupling_t0 must match sweep.coupling_sets");
    const SpinSystem s = system.build();
    make_gate(gate.spec(), s.qubits(), gate.phase_index);
  }
};

namespace detail {

// Typed accessors that report the source line of the offending key.
class Reader {
 public:
  explicit Reader(const Document& doc) : doc_(doc) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ParseError(doc_.line_of(path), "'" + path + "': " + what);
  }

  void check_keys(const json& table, const std::string& prefix,
                  const std::set<std::string>& allowed) const {
    for (auto it = table.begin(); it != table.end(); ++it) {
      const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
      if (!allowed.count(it.key())) fail(path, "unknown key");
    }
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  long long integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<long long>();
  }

  bool boolean(const json& v, const std::string& path) const {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& v, const std::string& path) const {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x, path));
    return out;
  }

  RMatrix matrix(const json& v, const std::string& path) const {
    if (!v.is_array() || v.empty()) fail(path, "expected an array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    RMatrix m;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto row = numbers(v[r], path);
      if (r == 0) m.resize(rows, static_cast<Eigen::Index>(row.size()));
      if (static_cast<Eigen::Index>(row.size()) != m.cols()) fail(path, "ragged matrix");
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = row[c];
    }
    return m;
  }

  const json* table(const json& root, const std::string& key) const {
    if (!root.contains(key)) return nullptr;
    const json& t = root.at(key);
    if (!t.is_object()) fail(key, "expected a table");
    return &t;
  }

 private:
  const Document& doc_;
};

inline GradientMode parse_gradient_mode(const Reader& r, const json& v, const std::string& p) {
  const std::string s = r.string(v, p);
  if (s == "exact" || s == "exact-discrete" || s == "exact_discrete")
    return GradientMode::ExactDiscrete;
  if (s == "continuum") return GradientMode::Continuum;
  r.fail(p, "expected 'exact-discrete' or 'continuum'");
}

inline ObjectiveKind parse_objective(const Reader& r, const json& v, const std::string& p) {
  const std::string s = r.string(v, p);
  if (s == "phase_dependent" || s == "D") return ObjectiveKind::PhaseDependent;
  if (s == "phase_independent" || s == "G") return ObjectiveKind::PhaseIndependent;
  r.fail(p, "expected 'phase_dependent' or 'phase_independent'");
}

}  // namespace detail

/// Builds an ExperimentConfig from configuration text. Unknown keys and type
/// errors are reported with the line they appear on.
inline ExperimentConfig from_text(const std::string& text) {
  const Document doc = parse(text);
  const detail::Reader r(doc);
  const json& root = doc.root;
  ExperimentConfig c;

  r.check_keys(root, "",
               {"system", "gate", "objective", "grid_safety", "optimizer", "optimize", "pft",
                "sweep", "noise", "phases", "seeds", "output", "jobs", "format",
                "spectral_components"});

  if (const json* t = r.table(root, "system")) {
    r.check_keys(*t, "system", {"qubits", "omega", "J", "couplings"});
    if (t->contains("qubits")) c.system.qubits = static_cast<int>(r.integer(t->at("qubits"), "system.qubits"));
    if (t->contains("omega")) c.system.omega = r.numbers(t->at("omega"), "system.omega");
    if (t->contains("J") && t->contains("couplings"))
      r.fail("system.couplings", "give either J or couplings, not both");
    if (t->contains("J")) c.system.coupling = r.number(t->at("J"), "system.J");
    if (t->contains("couplings"))
      c.system.couplings = r.matrix(t->at("couplings"), "system.couplings");
    if (!t->contains("qubits") && !c.system.omega.empty())
      c.system.qubits = static_cast<int>(c.system.omega.size());
  }
  if (const json* t = r.table(root, "gate")) {
    r.check_keys(*t, "gate", {"name", "phase_index", "alpha", "seed"});
    if (t->contains("name")) c.gate.name = r.string(t->at("name"), "gate.name");
    if (t->contains("phase_index"))
      c.gate.phase_index = static_cast<int>(r.integer(t->at("phase_index"), "gate.phase_index"));
    if (t->contains("alpha")) c.gate.alpha = r.number(t->at("alpha"), "gate.alpha");
    if (t->contains("seed"))
      c.gate.seed = static_cast<std::uint64_t>(r.integer(t->at("seed"), "gate.seed"));
  }
  if (root.contains("objective")) c.objective = detail::parse_objective(r, root.at("objective"), "objective");
  if (root.contains("grid_safety")) c.grid_safety = r.number(root.at("grid_safety"), "grid_safety");
  if (root.contains("spectral_components"))
    c.spectral_components =
        static_cast<int>(r.integer(root.at("spectral_components"), "spectral_components"));

  if (const json* t = r.table(root, "optimizer")) {
    r.check_keys(*t, "optimizer",
                 {"target_value", "rel_improvement", "stall_window", "rtol", "atol", "max_steps",
                  "gradient_mode", "descent_slack", "max_consecutive_rejects"});
    auto& o = c.optimizer;
    const std::string p = "optimizer.";
    if (t->contains("target_value")) o.target_value = r.number(t->at("target_value"), p + "target_value");
    if (t->contains("rel_improvement"))
      o.rel_improvement = r.number(t->at("rel_improvement"), p + "rel_improvement");
    if (t->contains("stall_window"))
      o.stall_window = static_cast<int>(r.integer(t->at("stall_window"), p + "stall_window"));
    if (t->contains("rtol")) o.rtol = r.number(t->at("rtol"), p + "rtol");
    if (t->contains("atol")) o.atol = r.number(t->at("atol"), p + "atol");
    if (t->contains("max_steps")) o.max_steps = static_cast<long>(r.integer(t->at("max_steps"), p + "max_steps"));
    if (t->contains("gradient_mode"))
      o.gradient_mode = detail::parse_gradient_mode(r, t->at("gradient_mode"), p + "gradient_mode");
    if (t->contains("descent_slack"))
      o.descent_slack = r.number(t->at("descent_slack"), p + "descent_slack");
    if (t->contains("max_consecutive_rejects"))
      o.max_consecutive_rejects =
          static_cast<int>(r.integer(t->at("max_consecutive_rejects"), p + "max_consecutive_rejects"));
  }
  if (const json* t = r.table(root, "optimize")) {
    r.check_keys(*t, "optimize", {"T"});
    if (t->contains("T")) c.optimize.final_time = r.number(t->at("T"), "optimize.T");
  }
  if (const json* t = r.table(root, "pft")) {
    r.check_keys(*t, "pft",
                 {"T0", "dt_fraction", "absolute_dt", "mode", "stop_value", "min_time",
                  "max_points", "scale_budget", "retry_factor", "verify", "max_t0_doublings",
                  "resample"});
    auto& s = c.pft;
    const std::string p = "pft.";
    if (t->contains("T0")) s.initial_time = r.number(t->at("T0"), p + "T0");
    if (t->contains("dt_fraction")) s.dt_fraction = r.number(t->at("dt_fraction"), p + "dt_fraction");
    if (t->contains("absolute_dt")) s.absolute_dt = r.number(t->at("absolute_dt"), p + "absolute_dt");
    if (t->contains("mode")) {
      const std::string m = r.string(t->at("mode"), p + "mode");
      if (m == "critical") s.stop_value = kCriticalStopValue;
      else if (m == "front") s.stop_value = kFrontStopValue;
      else r.fail(p + "mode", "expected 'critical' or 'front'");
    }
    if (t->contains("stop_value")) s.stop_value = r.number(t->at("stop_value"), p + "stop_value");
    if (t->contains("min_time")) s.min_time = r.number(t->at("min_time"), p + "min_time");
    if (t->contains("max_points"))
      s.max_points = static_cast<int>(r.integer(t->at("max_points"), p + "max_points"));
    if (t->contains("scale_budget")) s.scale_budget = r.boolean(t->at("scale_budget"), p + "scale_budget");
    if (t->contains("retry_factor"))
      s.budget_retry_factor = static_cast<int>(r.integer(t->at("retry_factor"), p + "retry_factor"));
    if (t->contains("verify")) s.verify = r.boolean(t->at("verify"), p + "verify");
    if (t->contains("max_t0_doublings"))
      s.max_t0_doublings = static_cast<int>(r.integer(t->at("max_t0_doublings"), p + "max_t0_doublings"));
    if (t->contains("resample")) {
      const std::string m = r.string(t->at("resample"), p + "resample");
      if (m == "compress") s.resample = ResampleMode::Compress;
      else if (m == "truncate") s.resample = ResampleMode::Truncate;
      else r.fail(p + "resample", "expected 'compress' or 'truncate'");
    }
  }
  if (const json* t = r.table(root, "sweep")) {
    r.check_keys(*t, "sweep", {"J", "T0_ref", "J_ref", "couplings", "couplings_T0"});
    if (t->contains("J")) c.sweep.j_values = r.numbers(t->at("J"), "sweep.J");
    if (t->contains("T0_ref")) c.sweep.reference_t0 = r.number(t->at("T0_ref"), "sweep.T0_ref");
    if (t->contains("J_ref")) c.sweep.reference_j = r.number(t->at("J_ref"), "sweep.J_ref");
    if (t->contains("couplings")) {
      const json& v = t->at("couplings");
      if (!v.is_array()) r.fail("sweep.couplings", "expected an array of coupling lists");
      c.sweep.j_values.clear();
      for (const auto& row : v) c.sweep.coupling_sets.push_back(r.numbers(row, "sweep.couplings"));
    }
    if (t->contains("couplings_T0"))
      c.sweep.coupling_t0 = r.numbers(t->at("couplings_T0"), "sweep.couplings_T0");
  }
  if (const json* t = r.table(root, "noise")) {
    r.check_keys(*t, "noise", {"sigma2", "T", "trials", "beta", "substeps", "fields"});
    if (t->contains("sigma2")) c.noise.sigma2 = r.numbers(t->at("sigma2"), "noise.sigma2");
    if (t->contains("T")) c.noise.final_time = r.number(t->at("T"), "noise.T");
    if (t->contains("trials")) c.noise.trials = static_cast<int>(r.integer(t->at("trials"), "noise.trials"));
    if (t->contains("beta")) c.noise.beta = r.matrix(t->at("beta"), "noise.beta");
    if (t->contains("substeps"))
      c.noise.substeps = static_cast<int>(r.integer(t->at("substeps"), "noise.substeps"));
    if (t->contains("fields")) c.noise.fields_path = r.string(t->at("fields"), "noise.fields");
  }
  if (const json* t = r.table(root, "phases")) {
    r.check_keys(*t, "phases", {"T", "runs"});
    if (t->contains("T")) c.phases.final_time = r.number(t->at("T"), "phases.T");
    if (t->contains("runs")) c.phases.runs = static_cast<int>(r.integer(t->at("runs"), "phases.runs"));
  }
  if (root.contains("seeds")) {
    const json& v = root.at("seeds");
    c.seeds.clear();
    if (v.is_array()) {
      for (const auto& s : v) {
        const long long x = r.integer(s, "seeds");
        if (x < 0) r.fail("seeds", "seeds must be non-negative");
        c.seeds.push_back(static_cast<std::uint64_t>(x));
      }
    } else {
      c.seeds.push_back(static_cast<std::uint64_t>(r.integer(v, "seeds")));
    }
  }
  if (root.contains("output")) c.output = r.string(root.at("output"), "output");
  if (root.contains("jobs")) c.jobs = static_cast<int>(r.integer(root.at("jobs"), "jobs"));
  if (root.contains("format")) {
    const std::string f = r.string(root.at("format"), "format");
    if (f == "csv") c.format = Format::Csv;
    else if (f == "json") c.format = Format::Json;
    else r.fail("format", "expected 'csv' or 'json'");
  }
  return c;
}

inline ExperimentConfig from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

}  // namespace qpft::config
