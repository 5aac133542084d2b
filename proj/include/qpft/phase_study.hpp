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
#include <memory>
#include <vector>

#include "qpft/dmorph.hpp"
#include "qpft/dynamics.hpp"
#include "qpft/objective.hpp"

namespace qpft {

struct PhaseClass {
  int phase_index = 0;
  double distance = 0.0;  // D~ against e^{i phi_m} W
};

/// Phase variant of W nearest to U (ties go to the smallest m).
inline PhaseClass classify_phase(const CMatrix& u, const TargetGate& gate) {
  const int dim = gate.dimension();
  const TargetGate base = with_phase(gate, 0);
  PhaseClass best{0, normalized_distance(u, base)};
  for (int m = 1; m < dim; ++m) {
    const double d = normalized_distance(u, with_phase(base, m));
    if (d < best.distance) best = {m, d};
  }
  return best;
}

struct PhaseRunRecord {
  std::uint64_t seed = 0;
  double final_g = 0.0;
  bool converged = false;
  int phase_index = 0;
  double phase_distance = 0.0;  // D~ against the nearest phase variant
  long effort = 0;
  double lambda_star = 0.0;
  int class_switches = 0;  // changes of the nearest phase class along the search
  Termination termination = Termination::Budget;
};

struct PhaseSummary {
  std::vector<int> counts;
  std::vector<double> mean_g;
  std::vector<double> mean_distance;
};

struct PhaseEnsemble {
  std::vector<PhaseRunRecord> records;
  PhaseSummary summary;
};

inline constexpr double kPhaseConvergedThreshold = 1e-8;

/// One phase-independent search from the random fields of `seed`.
inline PhaseRunRecord phase_run(std::shared_ptr<const Model> model, const TargetGate& gate,
                                const TimeGrid& grid, std::uint64_t seed,
                                const DmorphSettings& settings, int spectral_components = 10) {
  const ControlFieldSet initial = init_fields(model->system, grid, seed, spectral_components);
  int current = -1;
  int switches = 0;
  auto watch = [&](const TraceStep&, const CMatrix& u) {
    const int m = classify_phase(u, gate).phase_index;
    if (current >= 0 && m != current) ++switches;
    current = m;
  };
  const DmorphResult result =
      dmorph_run(model, gate, initial, ObjectiveKind::PhaseIndependent, settings, watch);
  const PhaseClass cls = classify_phase(result.final_propagator, gate);
  PhaseRunRecord rec;
  rec.seed = seed;
  rec.final_g = result.trace.final_objective();
  rec.converged = rec.final_g <= kPhaseConvergedThreshold;
  rec.phase_index = cls.phase_index;
  rec.phase_distance = cls.distance;
  rec.effort = search_effort(result.trace);
  rec.lambda_star = result.trace.lambda_star();
  rec.class_switches = switches;
  rec.termination = result.trace.termination;
  return rec;
}

inline PhaseSummary summarize_phases(const std::vector<PhaseRunRecord>& records, int dim) {
  PhaseSummary s;
  s.counts.assign(dim, 0);
  s.mean_g.assign(dim, 0.0);
  s.mean_distance.assign(dim, 0.0);
  for (const auto& r : records) {
    ++s.counts[r.phase_index];
    s.mean_g[r.phase_index] += r.final_g;
    s.mean_distance[r.phase_index] += r.phase_distance;
  }
  for (int m = 0; m < dim; ++m) {
    if (s.counts[m] == 0) continue;
    s.mean_g[m] /= s.counts[m];
    s.mean_distance[m] /= s.counts[m];
  }
  return s;
}

/// `runs` independent searches with seeds first_seed, first_seed + 1, ...
inline PhaseEnsemble phase_ensemble(std::shared_ptr<const Model> model, const TargetGate& gate,
                                    double final_time, int runs, std::uint64_t first_seed,
                                    const DmorphSettings& settings, double grid_safety = 0.9) {
  const TimeGrid grid = make_grid(final_time, model->system, grid_safety);
  PhaseEnsemble out;
  out.records.reserve(runs);
  for (int i = 0; i < runs; ++i)
    out.records.push_back(phase_run(model, gate, grid, first_seed + i, settings));
  out.summary = summarize_phases(out.records, gate.dimension());
  return out;
}

}  // namespace qpft
