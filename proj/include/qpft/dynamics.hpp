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
#include <memory>
#include <random>
#include <vector>

#include "qpft/linalg.hpp"
#include "qpft/spinsys.hpp"

namespace qpft {

/// Uniform mesh on [0, T] with M_t intervals.
class TimeGrid {
 public:
  TimeGrid(double final_time, int steps) : final_time_(final_time), steps_(steps) {
    if (!(final_time > 0.0) || !std::isfinite(final_time))
      throw Error("TimeGrid: final time must be positive");
    if (steps < 1) throw Error("TimeGrid: need at least one step");
  }

  double final_time() const { return final_time_; }
  int steps() const { return steps_; }
  double dt() const { return final_time_ / steps_; }
  /// Time of node j (0..M_t); node M_t is exactly T.
  double node(int j) const {
    return j == steps_ ? final_time_ : j * final_time_ / steps_;
  }
  /// Knob j controls the interval (node j, node j+1].
  double knob_time(int j) const { return node(j + 1); }

  /// dt < pi / (2 Omega).
  bool satisfies_nyquist(double max_frequency) const {
    return dt() < kPi / (2.0 * max_frequency);
  }

  bool operator==(const TimeGrid&) const = default;

 private:
  double final_time_;
  int steps_;
};

/// Smallest mesh with dt <= safety * pi / (2 Omega).
inline TimeGrid make_grid(double final_time, const SpinSystem& system,
                          double safety = 0.9) {
  if (!(final_time > 0.0)) throw Error("make_grid: T must be positive");
  if (!(safety > 0.0 && safety < 1.0))
    throw Error("make_grid: safety factor must lie in (0, 1)");
  const double max_dt = safety * kPi / (2.0 * system.max_frequency());
  const int steps = static_cast<int>(std::ceil(final_time / max_dt));
  return TimeGrid(final_time, std::max(steps, 1));
}

/// Piecewise-constant control fields: values(k, j) is the amplitude of
/// field k on (j dt, (j+1) dt].
struct ControlFieldSet {
  TimeGrid grid;
  RMatrix values;

  ControlFieldSet(TimeGrid g, RMatrix v) : grid(g), values(std::move(v)) {
    if (values.cols() != grid.steps())
      throw Error("ControlFieldSet: value columns must match grid steps");
    if (!values.allFinite()) throw Error("ControlFieldSet: non-finite value");
  }

  static ControlFieldSet zeros(int fields, TimeGrid g) {
    return {g, RMatrix::Zero(fields, g.steps())};
  }

  int fields() const { return static_cast<int>(values.rows()); }
  int steps() const { return grid.steps(); }
};

/// Integral of eps_k^2 dt under the piecewise-constant representation.
inline double fluence(const ControlFieldSet& f, int k) {
  if (k < 0 || k >= f.fields()) throw Error("fluence: field index out of range");
  return f.values.row(k).squaredNorm() * f.grid.dt();
}

inline double total_fluence(const ControlFieldSet& f) {
  return f.values.squaredNorm() * f.grid.dt();
}

/// Gaussian envelope exp[-8 pi (t - T/2)^2 / T^2] (unit peak).
inline double init_envelope(double t, double final_time) {
  const double x = t - 0.5 * final_time;
  return std::exp(-8.0 * kPi * x * x / (final_time * final_time));
}

/// Random initial fields A(t) sum_i sin(eta_i t + phi_i), eta_i ~ U[0, Omega],
/// phi_i ~ U[0, 2 pi], each field scaled to unit fluence.
inline ControlFieldSet init_fields(const SpinSystem& system, const TimeGrid& grid,
                                   std::uint64_t seed, int spectral_components = 10) {
  if (spectral_components < 1)
    throw Error("init_fields: need at least one spectral component");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(0.0, system.max_frequency());
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);

  const int n = system.qubits();
  RMatrix values(n, grid.steps());
  for (int k = 0; k < n; ++k) {
    std::vector<double> eta(spectral_components), phi(spectral_components);
    for (auto& e : eta) e = freq(rng);
    for (auto& p : phi) p = phase(rng);
    for (int j = 0; j < grid.steps(); ++j) {
      const double t = grid.knob_time(j);
      double sum = 0.0;
      for (int i = 0; i < spectral_components; ++i) sum += std::sin(eta[i] * t + phi[i]);
      values(k, j) = init_envelope(t, grid.final_time()) * sum;
    }
    const double f = values.row(k).squaredNorm() * grid.dt();
    if (!(f > 0.0)) throw Error("init_fields: degenerate grid produced a zero field");
    values.row(k) /= std::sqrt(f);
  }
  return {grid, std::move(values)};
}

enum class ResampleMode {
  Compress,  // rescale time so the whole field shape fits the new interval
  Truncate,  // keep the field on [0, T_new] and drop the tail
};

namespace detail {

// Linear interpolation in knob-index space; clamps outside [0, M-1].
inline double interp_knobs(const RMatrix& v, int k, double u) {
  const auto last = v.cols() - 1;
  if (u <= 0.0) return v(k, 0);
  if (u >= static_cast<double>(last)) return v(k, last);
  const auto i = static_cast<Eigen::Index>(std::floor(u));
  const double frac = u - static_cast<double>(i);
  return frac == 0.0 ? v(k, i) : (1.0 - frac) * v(k, i) + frac * v(k, i + 1);
}

}  // namespace detail

/// Maps fields onto a shorter (or equal) control interval.
inline ControlFieldSet resample_fields(const ControlFieldSet& fields, const TimeGrid& target,
                                      ResampleMode mode = ResampleMode::Compress) {
  const double t_old = fields.grid.final_time();
  if (target.final_time() > t_old * (1.0 + 1e-15))
    throw Error("resample_fields: new control time exceeds the old one");
  const int m_old = fields.steps();
  const int m_new = target.steps();
  RMatrix values(fields.fields(), m_new);
  for (int j = 0; j < m_new; ++j) {
    // Position of the new knob time in old knob-index units.
    double u;
    if (mode == ResampleMode::Compress) {
      u = static_cast<double>(j + 1) * m_old / m_new - 1.0;
    } else {
      u = target.knob_time(j) / fields.grid.dt() - 1.0;
    }
    // Absorb rounding so that an unchanged grid reproduces the knobs exactly.
    const double nearest = std::round(u);
    if (std::abs(u - nearest) < 1e-12) u = nearest;
    for (int k = 0; k < fields.fields(); ++k)
      values(k, j) = detail::interp_knobs(fields.values, k, u);
  }
  return {target, std::move(values)};
}

/// Splits every interval into `factor` equal sub-intervals carrying the same
/// amplitude; the propagator is unchanged.
inline ControlFieldSet refine_fields(const ControlFieldSet& fields, int factor) {
  if (factor < 1) throw Error("refine_fields: factor must be >= 1");
  TimeGrid grid(fields.grid.final_time(), fields.steps() * factor);
  RMatrix values(fields.fields(), grid.steps());
  for (int j = 0; j < fields.steps(); ++j)
    for (int r = 0; r < factor; ++r) values.col(j * factor + r) = fields.values.col(j);
  return {grid, std::move(values)};
}

// ---------------------------------------------------------------------------
// Propagation

/// Drift and control operators of a spin system, built once. For this
/// model every operator is real symmetric, so real copies drive the
/// eigendecompositions.
struct Model {
  SpinSystem system;
  CMatrix drift;
  std::vector<CMatrix> controls;
  RMatrix drift_real;
  std::vector<RMatrix> controls_real;

  explicit Model(SpinSystem s)
      : system(std::move(s)),
        drift(build_drift_hamiltonian(system)),
        controls(build_control_operators(system)) {
    if (drift.imag().cwiseAbs().maxCoeff() != 0.0)
      throw Error("Model: drift Hamiltonian is expected to be real");
    drift_real = drift.real();
    for (const auto& c : controls) {
      if (c.imag().cwiseAbs().maxCoeff() != 0.0)
        throw Error("Model: control operators are expected to be real");
      controls_real.push_back(c.real());
    }
  }

  int dimension() const { return system.dimension(); }
  int fields() const { return system.qubits(); }
};

/// Step eigendecompositions, step propagators and the forward products
/// U(t_j, 0) for one field set.
class PropagationCache {
 public:
  PropagationCache(std::shared_ptr<const Model> model, const ControlFieldSet& fields)
      : model_(std::move(model)), grid_(fields.grid) {
    const Model& m = *model_;
    if (fields.fields() != m.fields())
      throw Error("propagate: field count does not match qubit count");
    const int steps = grid_.steps();
    const int dim = m.dimension();
    const double dt = grid_.dt();
    eigenvalues_.resize(steps);
    eigenvectors_.resize(steps);
    step_.resize(steps);
    forward_.resize(steps + 1);
    forward_[0] = CMatrix::Identity(dim, dim);

    Eigen::SelfAdjointEigenSolver<RMatrix> eig(dim);
    RMatrix h(dim, dim);
    CMatrix scaled(dim, dim);
    for (int j = 0; j < steps; ++j) {
      h = m.drift_real;
      for (int k = 0; k < m.fields(); ++k) h += fields.values(k, j) * m.controls_real[k];
      eig.compute(h);
      eigenvalues_[j] = eig.eigenvalues();
      eigenvectors_[j] = eig.eigenvectors();
      const RMatrix& q = eigenvectors_[j];
      // U_j = Q diag(e^{-i lambda dt}) Q^T
      for (int a = 0; a < dim; ++a) {
        const cplx phase = std::polar(1.0, -eigenvalues_[j](a) * dt);
        scaled.col(a) = phase * q.col(a).cast<cplx>();
      }
      step_[j].noalias() = scaled * q.transpose().cast<cplx>();
      forward_[j + 1].noalias() = step_[j] * forward_[j];
    }
  }

  const Model& model() const { return *model_; }
  std::shared_ptr<const Model> model_ptr() const { return model_; }
  const TimeGrid& grid() const { return grid_; }
  int steps() const { return grid_.steps(); }

  /// U_T.
  const CMatrix& final_propagator() const { return forward_.back(); }
  /// U(t_j, 0) for j = 0..M_t.
  const CMatrix& forward(int j) const { return forward_.at(j); }
  /// exp(-i H_j dt) for interval j.
  const CMatrix& step_propagator(int j) const { return step_.at(j); }
  const RVector& step_eigenvalues(int j) const { return eigenvalues_.at(j); }
  /// Real orthogonal eigenvectors of H_j.
  const RMatrix& step_eigenvectors(int j) const { return eigenvectors_.at(j); }

  /// U^dagger H_c^(k) U evaluated at the knob time of interval j, i.e. with
  /// U = U(t_{j+1}, 0), the same sampling the continuum gradient uses.
  CMatrix conjugated_control(int k, int j) const {
    const CMatrix& u = forward(j + 1);
    return u.adjoint() * model_->controls.at(k) * u;
  }

 private:
  std::shared_ptr<const Model> model_;
  TimeGrid grid_;
  std::vector<RVector> eigenvalues_;
  std::vector<RMatrix> eigenvectors_;
  std::vector<CMatrix> step_;
  std::vector<CMatrix> forward_;
};

inline PropagationCache propagate(std::shared_ptr<const Model> model,
                                  const ControlFieldSet& fields) {
  return PropagationCache(std::move(model), fields);
}

inline PropagationCache propagate(const SpinSystem& system, const ControlFieldSet& fields) {
  return PropagationCache(std::make_shared<const Model>(system), fields);
}

}  // namespace qpft
