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

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qpft/dmorph.hpp"
#include "qpft/dynamics.hpp"

namespace qpft {

inline constexpr double kFrontStopValue = 1e-2;
inline constexpr double kCriticalStopValue = 1e-8;

struct PftSettings {
  double initial_time = 6.0;      // T0
  double dt_fraction = 0.01;      // Delta T = dt_fraction * T(p)
  double absolute_dt = 0.0;       // > 0 switches to a fixed Delta T
  double stop_value = kCriticalStopValue;
  double min_time = 0.0;          // optional floor; the sweep ends below it
  int max_points = 10000;
  DmorphSettings dmorph;          // max_steps is the budget at T0
  bool scale_budget = true;       // budget(T) = max_steps * (T0 / T)^2
  int budget_retry_factor = 4;
  bool verify = true;             // cold-start confirmation at the estimate
  int max_t0_doublings = 3;
  double grid_safety = 0.9;
  ResampleMode resample = ResampleMode::Compress;
  std::uint64_t seed = 1;
  int spectral_components = 10;

  bool critical_mode() const { return stop_value <= kCriticalStopValue; }

  void validate() const {
    if (!(initial_time > 0.0)) throw Error("PftSettings: T0 must be positive");
    if (absolute_dt > 0.0) {
      if (absolute_dt >= initial_time) throw Error("PftSettings: absolute Delta T too large");
    } else if (!(dt_fraction > 0.0 && dt_fraction <= 0.05)) {
      throw Error("PftSettings: dt_fraction must lie in (0, 0.05]");
    }
    if (!(stop_value > 0.0)) throw Error("PftSettings: stop_value must be positive");
    if (budget_retry_factor < 1) throw Error("PftSettings: retry factor must be >= 1");
    dmorph.validate();
  }
};

struct ParetoPoint {
  double final_time = 0.0;
  double best_objective = 0.0;
  Termination termination = Termination::Budget;
  long effort = 0;
  long budget = 0;
  bool retried = false;
  double lambda_star = 0.0;
  double fluence_star = 0.0;
  ControlFieldSet fields;
};

struct CriticalTime {
  double value = 0.0;
  double uncertainty = 0.0;
};

struct PftTrajectory {
  std::vector<ParetoPoint> points;
  std::optional<CriticalTime> t_star;
  bool confident = false;
  std::string stop_reason;
  std::string notes;
  double initial_time = 0.0;  // T0 actually used (after any doubling)
  PftSettings settings;
};

/// Smallest T whose point reached `threshold`, with the gap to the next
/// (failed) point as uncertainty. Throws if nothing converged or if the
/// front was never exhausted below the last converged point.
inline CriticalTime estimate_critical_time(const std::vector<ParetoPoint>& points,
                                           double threshold = kCriticalStopValue) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].best_objective <= threshold &&
        (!best || points[i].final_time < points[*best].final_time))
      best = i;
  if (!best) throw Error("estimate_critical_time: no point reached the threshold");
  const double t_star = points[*best].final_time;
  std::optional<double> below;
  for (const auto& p : points)
    if (p.final_time < t_star && p.best_objective > threshold)
      if (!below || p.final_time > *below) below = p.final_time;
  if (!below) throw Error("estimate_critical_time: front not exhausted");
  return {t_star, t_star - *below};
}

inline CriticalTime estimate_critical_time(const PftTrajectory& traj,
                                           double threshold = kCriticalStopValue) {
  return estimate_critical_time(traj.points, threshold);
}

/// Progress callback, invoked once per finished point.
using PftObserver = std::function<void(const ParetoPoint&)>;

namespace detail {

inline long scaled_budget(const PftSettings& s, double t0, double t) {
  const double base = static_cast<double>(s.dmorph.max_steps);
  if (!s.scale_budget) return s.dmorph.max_steps;
  return static_cast<long>(std::ceil(base * (t0 / t) * (t0 / t)));
}

// One optimization at fixed T; a budget-terminated run gets one continuation
// with budget_retry_factor times the budget.
inline ParetoPoint optimize_point(const std::shared_ptr<const Model>& model,
                                  const TargetGate& gate, const ControlFieldSet& start,
                                  const PftSettings& s, long budget) {
  DmorphSettings ds = s.dmorph;
  ds.max_steps = budget;
  DmorphResult r = dmorph_run(model, gate, start, ObjectiveKind::PhaseDependent, ds);
  long effort = search_effort(r.trace);
  double lambda = r.trace.lambda_star();
  bool retried = false;
  if (r.trace.termination == Termination::Budget && s.budget_retry_factor > 1) {
    ds.max_steps = budget * s.budget_retry_factor;
    retried = true;
    r = dmorph_run(model, gate, r.fields, ObjectiveKind::PhaseDependent, ds);
    effort += search_effort(r.trace);
    lambda += r.trace.lambda_star();
  }
  return ParetoPoint{start.grid.final_time(), r.trace.final_objective(), r.trace.termination,
                     effort, budget, retried, lambda, r.trace.fluence_star(),
                     std::move(r.fields)};
}

}  // namespace detail

/// Pareto front tracking: optimize at T0 from random fields, then repeatedly
/// shorten T, warm-start from the resampled optimum and re-optimize until
/// the stop value can no longer be reached.
inline PftTrajectory pft_run(std::shared_ptr<const Model> model, const TargetGate& gate,
                             const PftSettings& settings, const PftObserver& observer = {}) {
  settings.validate();
  const SpinSystem& system = model->system;
  PftTrajectory traj;
  traj.settings = settings;

  double t0 = settings.initial_time;
  std::optional<ParetoPoint> first;
  for (int attempt = 0; attempt <= settings.max_t0_doublings; ++attempt) {
    const TimeGrid grid = make_grid(t0, system, settings.grid_safety);
    const ControlFieldSet init =
        init_fields(system, grid, settings.seed, settings.spectral_components);
    ParetoPoint p = detail::optimize_point(model, gate, init, settings, settings.dmorph.max_steps);
    if (p.best_objective <= settings.stop_value) {
      first = std::move(p);
      break;
    }
    traj.notes += "T0 = " + std::to_string(t0) + " did not reach the stop value; doubling. ";
    t0 *= 2.0;
  }
  if (!first)
    throw Error("pft_run: first optimization failed; T0 too small or budget too low");
  traj.initial_time = t0;
  traj.points.push_back(std::move(*first));
  if (observer) observer(traj.points.back());

  bool under_budgeted = false;
  while (true) {
    const ParetoPoint& prev = traj.points.back();
    if (static_cast<int>(traj.points.size()) >= settings.max_points) {
      traj.stop_reason = "max_points";
      break;
    }
    const double delta = settings.absolute_dt > 0.0 ? settings.absolute_dt
                                                    : settings.dt_fraction * prev.final_time;
    const double t_next = prev.final_time - delta;
    if (t_next <= 0.0 || t_next < settings.min_time) {
      traj.stop_reason = "min_time";
      break;
    }
    const TimeGrid grid = make_grid(t_next, system, settings.grid_safety);
    const ControlFieldSet warm = resample_fields(prev.fields, grid, settings.resample);
    ParetoPoint p = detail::optimize_point(model, gate, warm, settings,
                                           detail::scaled_budget(settings, t0, t_next));
    const bool attained = p.best_objective <= settings.stop_value;
    if (!attained && p.termination == Termination::Budget) under_budgeted = true;
    traj.points.push_back(std::move(p));
    if (observer) observer(traj.points.back());
    if (!attained) {
      traj.stop_reason = "unattainable";
      break;
    }
  }

  try {
    traj.t_star = estimate_critical_time(traj, kCriticalStopValue);
    traj.confident = !under_budgeted;
    if (under_budgeted) traj.notes += "Sweep ended on budget exhaustion after retry. ";
  } catch (const Error& e) {
    traj.notes += std::string(e.what()) + ". ";
  }

  if (traj.t_star && settings.verify) {
    const TimeGrid grid = make_grid(traj.t_star->value, system, settings.grid_safety);
    const ControlFieldSet cold =
        init_fields(system, grid, settings.seed + 1000003, settings.spectral_components);
    const ParetoPoint check = detail::optimize_point(
        model, gate, cold, settings, detail::scaled_budget(settings, t0, grid.final_time()));
    if (check.best_objective > kCriticalStopValue) {
      traj.confident = false;
      traj.notes += "Cold-start verification at T* did not converge. ";
    }
  }
  return traj;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error("loglog_slope: need at least two matching points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error("loglog_slope: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw Error("loglog_slope: x values are all equal");
  return (n * sxy - sx * sy) / denom;
}

struct ScalingCase {
  RMatrix couplings;
  double initial_time = 0.0;
};

struct ScalingRow {
  double coupling = 0.0;  // J, or the mean coupling for unequal cases
  std::optional<CriticalTime> t_star;
  bool confident = false;
  std::string error;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  std::optional<double> slope;
};

/// Equal couplings J for each value, T0 scaled as reference_t0 * reference_j / J.
inline std::vector<ScalingCase> equal_coupling_cases(int qubits, const std::vector<double>& js,
                                                     double reference_t0, double reference_j) {
  std::vector<ScalingCase> out;
  for (double j : js) {
    RMatrix c = RMatrix::Constant(qubits, qubits, j);
    c.diagonal().setZero();
    out.push_back({c, reference_t0 * reference_j / j});
  }
  return out;
}

/// Runs one PFT trajectory per coupling case and fits log T* against log J.
inline ScalingStudy scaling_study(const std::vector<double>& omega, const GateSpec& gate_spec,
                                  int phase_index, const std::vector<ScalingCase>& cases,
                                  const PftSettings& base) {
  ScalingStudy study;
  std::vector<double> xs, ys;
  for (const auto& c : cases) {
    SpinSystem system(omega, c.couplings);
    ScalingRow row;
    row.coupling = system.mean_coupling();
    try {
      auto model = std::make_shared<const Model>(system);
      const TargetGate gate = make_gate(gate_spec, system.qubits(), phase_index);
      PftSettings s = base;
      s.initial_time = c.initial_time;
      const PftTrajectory traj = pft_run(model, gate, s);
      row.t_star = traj.t_star;
      row.confident = traj.confident;
      if (!traj.t_star) row.error = traj.notes;
    } catch (const Error& e) {
      row.error = e.what();
    }
    if (row.t_star) {
      xs.push_back(row.coupling);
      ys.push_back(row.t_star->value);
    }
    study.rows.push_back(std::move(row));
  }
  if (xs.size() >= 2) study.slope = loglog_slope(xs, ys);
  return study;
}

}  // namespace qpft
