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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qpft/dynamics.hpp"
#include "qpft/objective.hpp"

namespace qpft {

struct DmorphSettings {
  double target_value = 1e-8;     // stop once the objective is at or below this
  double rel_improvement = 1e-6;  // stall threshold relative to the objective
  int stall_window = 10;          // consecutive small-improvement steps
  double rtol = 1e-3;
  double atol = 1e-6;
  long max_steps = 200000;  // accepted-step budget
  GradientMode gradient_mode = GradientMode::ExactDiscrete;
  double descent_slack = 1e-9;   // tolerated objective increase per step
  int max_consecutive_rejects = 60;

  void validate() const {
    if (!(target_value > 0.0) || !(rel_improvement > 0.0) || !(rtol > 0.0) ||
        !(atol > 0.0) || !(descent_slack >= 0.0))
      throw Error("DmorphSettings: thresholds must be positive");
    if (stall_window < 1) throw Error("DmorphSettings: stall_window must be >= 1");
    if (max_steps < 0) throw Error("DmorphSettings: max_steps must be >= 0");
  }
};

enum class Termination { Converged, Stalled, Budget };

inline std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "CONVERGED";
    case Termination::Stalled: return "STALLED";
    case Termination::Budget: return "BUDGET";
  }
  return "?";
}

/// One row of the optimization trace. Row 0 is the starting point (s = 0).
struct TraceStep {
  long step = 0;
  double s = 0.0;
  double ds = 0.0;
  double objective = 0.0;
  double sigma = 0.0;         // slope metric at s
  double lambda = 0.0;        // path length up to s
  double displacement = 0.0;  // chord length of the field change over the step
  double fluence_total = 0.0;
  std::vector<double> fluences;
};

struct OptimizationTrace {
  std::vector<TraceStep> steps;
  Termination termination = Termination::Budget;
  long accepted = 0;
  long rejected = 0;
  long gradient_evaluations = 0;
  long singular_perturbations = 0;

  const TraceStep& last() const { return steps.back(); }
  double final_objective() const { return last().objective; }
  double lambda_star() const { return last().lambda; }
  double fluence_star() const { return last().fluence_total; }
};

/// L2 norm of a functional gradient: sqrt(sum_k sum_j g_kj^2 dt).
inline double slope_metric(const GradientField& g, const TimeGrid& grid) {
  if (g.values.cols() != grid.steps())
    throw Error("slope_metric: gradient and grid shapes differ");
  return std::sqrt(g.values.squaredNorm() * grid.dt());
}

/// Trapezoidal path-length increment over one accepted step; with a single
/// slope value this is sigma * ds / sqrt(T).
inline double path_length_increment(double sigma_start, double sigma_end, double ds,
                                    double final_time) {
  if (!(ds > 0.0)) throw Error("path_length_increment: ds must be positive");
  return 0.5 * (sigma_start + sigma_end) * ds / std::sqrt(final_time);
}

inline double path_length_increment(double sigma, double ds, double final_time) {
  return path_length_increment(sigma, sigma, ds, final_time);
}

/// Number of accepted optimizer steps.
inline long search_effort(const OptimizationTrace& trace) { return trace.accepted; }

struct DmorphResult {
  ControlFieldSet fields;
  OptimizationTrace trace;
  CMatrix final_propagator;
};

/// Called after the initial point and after every accepted step.
using DmorphObserver = std::function<void(const TraceStep&, const CMatrix& final_propagator)>;

namespace detail {

struct FlowPoint {
  double objective = 0.0;
  RMatrix gradient;  // functional gradient of the objective
  CMatrix propagator;
};

class FlowEvaluator {
 public:
  FlowEvaluator(std::shared_ptr<const Model> model, const TargetGate& gate,
                ObjectiveKind kind, GradientMode mode, TimeGrid grid)
      : model_(std::move(model)), gate_(gate), kind_(kind), mode_(mode), grid_(grid) {}

  FlowPoint operator()(const RMatrix& values) {
    ++evaluations;
    const ControlFieldSet fields(grid_, values);
    const PropagationCache cache(model_, fields);
    FlowPoint p;
    p.propagator = cache.final_propagator();
    p.objective = objective_value(kind_, p.propagator, gate_);
    try {
      p.gradient = gradient(cache, gate_, kind_, mode_).values;
    } catch (const PhaseSingularityError&) {
      // Measure-zero start: push along the phase-dependent descent direction.
      ++singular;
      p.gradient = gradient(cache, gate_, ObjectiveKind::PhaseDependent, mode_).values;
    }
    if (!p.gradient.allFinite())
      throw Error("dmorph: non-finite gradient at objective " + std::to_string(p.objective));
    return p;
  }

  long evaluations = 0;
  long singular = 0;

 private:
  std::shared_ptr<const Model> model_;
  const TargetGate& gate_;
  ObjectiveKind kind_;
  GradientMode mode_;
  TimeGrid grid_;
};

// Dormand-Prince 5(4) tableau.
struct DoPri {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b_hat (fifth minus fourth order weights)
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

inline double error_norm(const RMatrix& err, const RMatrix& y0, const RMatrix& y1,
                         double rtol, double atol) {
  const RMatrix scale =
      (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
  return std::sqrt(err.cwiseQuotient(scale).squaredNorm() / static_cast<double>(err.size()));
}

}  // namespace detail

/// Gradient flow d eps / ds = -grad(objective), integrated with an adaptive
/// Dormand-Prince 5(4) pair.
inline DmorphResult dmorph_run(std::shared_ptr<const Model> model, const TargetGate& gate,
                               const ControlFieldSet& initial, ObjectiveKind kind,
                               const DmorphSettings& settings,
                               const DmorphObserver& observer = {}) {
  settings.validate();
  if (initial.fields() != model->fields())
    throw Error("dmorph_run: field count does not match the system");
  if (gate.dimension() != model->dimension())
    throw Error("dmorph_run: gate dimension does not match the system");

  using detail::DoPri;
  const TimeGrid grid = initial.grid;
  const double dt = grid.dt();
  const double final_time = grid.final_time();
  detail::FlowEvaluator eval(model, gate, kind, settings.gradient_mode, grid);

  OptimizationTrace trace;
  RMatrix y = initial.values;
  detail::FlowPoint here = eval(y);

  auto record = [&](long step, double s, double ds, double sigma, double lambda,
                    double displacement) {
    TraceStep row;
    row.step = step;
    row.s = s;
    row.ds = ds;
    row.objective = here.objective;
    row.sigma = sigma;
    row.lambda = lambda;
    row.displacement = displacement;
    row.fluences.resize(y.rows());
    for (Eigen::Index k = 0; k < y.rows(); ++k) row.fluences[k] = y.row(k).squaredNorm() * dt;
    row.fluence_total = y.squaredNorm() * dt;
    trace.steps.push_back(std::move(row));
    if (observer) observer(trace.steps.back(), here.propagator);
  };

  auto sigma_of = [&](const RMatrix& g) { return std::sqrt(g.squaredNorm() * dt); };
  double sigma = sigma_of(here.gradient);
  double lambda = 0.0;
  double s = 0.0;
  record(0, 0.0, 0.0, sigma, 0.0, 0.0);

  auto finish = [&](Termination t) {
    trace.termination = t;
    trace.gradient_evaluations = eval.evaluations;
    trace.singular_perturbations = eval.singular;
    return DmorphResult{ControlFieldSet(grid, y), std::move(trace), here.propagator};
  };

  if (here.objective <= settings.target_value) return finish(Termination::Converged);
  if (settings.max_steps == 0) return finish(Termination::Budget);

  // Initial step size (Hairer, Norsett & Wanner, II.4).
  RMatrix k1 = -here.gradient;
  double ds;
  {
    const RMatrix scale = (settings.atol + settings.rtol * y.cwiseAbs().array()).matrix();
    const double size = static_cast<double>(y.size());
    const double d0 = std::sqrt(y.cwiseQuotient(scale).squaredNorm() / size);
    const double d1 = std::sqrt(k1.cwiseQuotient(scale).squaredNorm() / size);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    const detail::FlowPoint probe = eval(y + h0 * k1);
    const double d2 =
        std::sqrt((-probe.gradient - k1).cwiseQuotient(scale).squaredNorm() / size) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                : std::pow(0.01 / std::max(d1, d2), 0.2);
    ds = std::min(100.0 * h0, h1);
  }

  constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 10.0;
  constexpr double kAlpha = 0.7 / 5.0, kBeta = 0.4 / 5.0;
  double err_prev = 1e-4;
  int small_improvements = 0;
  int consecutive_rejects = 0;
  bool last_rejected = false;

  RMatrix k2, k3, k4, k5, k6, k7, y_new, err;
  while (true) {
    k2 = -eval(y + ds * DoPri::a21 * k1).gradient;
    k3 = -eval(y + ds * (DoPri::a31 * k1 + DoPri::a32 * k2)).gradient;
    k4 = -eval(y + ds * (DoPri::a41 * k1 + DoPri::a42 * k2 + DoPri::a43 * k3)).gradient;
    k5 = -eval(y + ds * (DoPri::a51 * k1 + DoPri::a52 * k2 + DoPri::a53 * k3 +
                         DoPri::a54 * k4)).gradient;
    k6 = -eval(y + ds * (DoPri::a61 * k1 + DoPri::a62 * k2 + DoPri::a63 * k3 +
                         DoPri::a64 * k4 + DoPri::a65 * k5)).gradient;
    y_new = y + ds * (DoPri::b1 * k1 + DoPri::b3 * k3 + DoPri::b4 * k4 + DoPri::b5 * k5 +
                      DoPri::b6 * k6);
    detail::FlowPoint there = eval(y_new);
    k7 = -there.gradient;
    err = ds * (DoPri::e1 * k1 + DoPri::e3 * k3 + DoPri::e4 * k4 + DoPri::e5 * k5 +
                DoPri::e6 * k6 + DoPri::e7 * k7);
    double err_norm = detail::error_norm(err, y, y_new, settings.rtol, settings.atol);
    if (!std::isfinite(err_norm)) err_norm = std::numeric_limits<double>::max();

    const bool ascended = there.objective > here.objective + settings.descent_slack;
    if (err_norm > 1.0 || ascended) {
      ++trace.rejected;
      if (++consecutive_rejects > settings.max_consecutive_rejects)
        return finish(Termination::Stalled);
      ds *= err_norm > 1.0 ? std::max(kMinFactor, kSafety * std::pow(err_norm, -kAlpha))
                           : 0.5;
      last_rejected = true;
      continue;
    }

    // Accepted.
    consecutive_rejects = 0;
    const double previous = here.objective;
    const double sigma_new = sigma_of(there.gradient);
    lambda += path_length_increment(sigma, sigma_new, ds, final_time);
    const double displacement = std::sqrt((y_new - y).squaredNorm() * dt / final_time);
    s += ds;
    const double ds_taken = ds;
    y.swap(y_new);
    here = std::move(there);
    k1 = k7;
    sigma = sigma_new;
    ++trace.accepted;
    record(trace.accepted, s, ds_taken, sigma, lambda, displacement);

    if (here.objective <= settings.target_value) return finish(Termination::Converged);
    if (std::abs(previous - here.objective) <= settings.rel_improvement * previous) {
      if (++small_improvements >= settings.stall_window) return finish(Termination::Stalled);
    } else {
      small_improvements = 0;
    }
    if (trace.accepted >= settings.max_steps) return finish(Termination::Budget);

    const double e = std::max(err_norm, 1e-10);
    double factor = kSafety * std::pow(e, -kAlpha) * std::pow(err_prev, kBeta);
    factor = std::clamp(factor, kMinFactor, kMaxFactor);
    if (last_rejected) factor = std::min(factor, 1.0);
    ds *= factor;
    err_prev = e;
    last_rejected = false;
  }
}

inline DmorphResult dmorph_run(const SpinSystem& system, const TargetGate& gate,
                               const ControlFieldSet& initial, ObjectiveKind kind,
                               const DmorphSettings& settings,
                               const DmorphObserver& observer = {}) {
  return dmorph_run(std::make_shared<const Model>(system), gate, initial, kind, settings,
                    observer);
}

}  // namespace qpft
