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
#include <string>

#include "qpft/dynamics.hpp"
#include "qpft/linalg.hpp"
#include "qpft/spinsys.hpp"

namespace qpft {

enum class ObjectiveKind {
  PhaseDependent,    // normalized distance D~
  PhaseIndependent,  // G = 1 - |Tr(W^dagger U)| / N
};

enum class GradientMode {
  Continuum,      // functional derivative sampled at the knob node
  ExactDiscrete,  // derivative of the discrete propagator, divided by dt
};

inline std::string to_string(ObjectiveKind k) {
  return k == ObjectiveKind::PhaseDependent ? "phase_dependent" : "phase_independent";
}
inline std::string to_string(GradientMode m) {
  return m == GradientMode::Continuum ? "continuum" : "exact_discrete";
}

namespace detail {
inline void check_dims(const CMatrix& u, const CMatrix& w) {
  if (u.rows() != w.rows() || u.cols() != w.cols())
    throw Error("objective: propagator and target dimensions differ");
}
}  // namespace detail

/// Tr(W^dagger U).
inline cplx overlap(const CMatrix& u, const CMatrix& w) {
  detail::check_dims(u, w);
  return (w.adjoint() * u).trace();
}

/// Squared Hilbert-Schmidt distance 2N - 2 Re Tr(W^dagger U), in [0, 4N].
inline double distance(const CMatrix& u, const TargetGate& w) {
  const double dim = static_cast<double>(u.rows());
  return 2.0 * dim - 2.0 * overlap(u, w.matrix).real();
}

inline double normalized_distance(const CMatrix& u, const TargetGate& w) {
  return distance(u, w) / (4.0 * static_cast<double>(u.rows()));
}

inline double fidelity(const CMatrix& u, const TargetGate& w) {
  return 1.0 - normalized_distance(u, w);
}

inline double phase_independent_distance(const CMatrix& u, const TargetGate& w) {
  return 1.0 - std::abs(overlap(u, w.matrix)) / static_cast<double>(u.rows());
}

inline double objective_value(ObjectiveKind kind, const CMatrix& u, const TargetGate& w) {
  return kind == ObjectiveKind::PhaseDependent ? normalized_distance(u, w)
                                               : phase_independent_distance(u, w);
}

/// Functional-convention gradient, one row per field, one column per knob.
struct GradientField {
  RMatrix values;

  double max_abs() const { return values.cwiseAbs().maxCoeff(); }
};

/// Raised when |Tr(W^dagger U_T)| is too small for the phase-independent
/// gradient to be defined.
class PhaseSingularityError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kPhaseSingularThreshold = 1e-12;

/// d Tr(W^dagger U_T) / d eps_k(t_j) in the functional convention.
inline CMatrix overlap_gradient(const PropagationCache& cache, const TargetGate& w,
                                GradientMode mode) {
  const Model& model = cache.model();
  detail::check_dims(cache.final_propagator(), w.matrix);
  const int steps = cache.steps();
  const int dim = model.dimension();
  const int nf = model.fields();
  const double dt = cache.grid().dt();
  CMatrix dz(nf, steps);
  const CMatrix wd = w.matrix.adjoint();

  if (mode == GradientMode::Continuum) {
    const CMatrix wu = wd * cache.final_propagator();
    CMatrix x(dim, dim);
    for (int j = 0; j < steps; ++j) {
      const CMatrix& u = cache.forward(j + 1);
      x.noalias() = u * wu * u.adjoint();
      for (int k = 0; k < nf; ++k)
        dz(k, j) = -kI * x.cwiseProduct(model.controls_real[k].transpose().cast<cplx>()).sum();
    }
    return dz;
  }

  // Exact discrete derivative. With U_T = L_j U_j F_j, where F_j = U(t_j, 0)
  // and L_j is the product of later steps, dz = Tr(F_j W^dagger L_j dU_j).
  // dU_j in the eigenbasis of H_j is the divided-difference (Daleckii-Krein)
  // matrix times the rotated control operator.
  CMatrix back = wd;  // W^dagger L_j, built from the last step backwards
  CMatrix y(dim, dim), yq(dim, dim), phi(dim, dim), tmp(dim, dim);
  RMatrix vq(dim, dim), rtmp(dim, dim);
  for (int j = steps - 1; j >= 0; --j) {
    const RMatrix& q = cache.step_eigenvectors(j);
    const RVector& lam = cache.step_eigenvalues(j);
    for (int b = 0; b < dim; ++b) {
      for (int a = 0; a < dim; ++a) {
        const double mean = 0.5 * (lam(a) + lam(b));
        const double half = 0.5 * (lam(a) - lam(b)) * dt;
        const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0
                                                  : std::sin(half) / half;
        phi(a, b) = std::polar(dt * sinc, -mean * dt - 0.5 * kPi);
      }
    }
    y.noalias() = cache.forward(j) * back;
    tmp.noalias() = y * q;
    yq.noalias() = q.transpose() * tmp;
    // sum_ab yq(b, a) phi(a, b) vq(a, b)
    tmp = yq.transpose().cwiseProduct(phi);
    for (int k = 0; k < nf; ++k) {
      rtmp.noalias() = model.controls_real[k] * q;
      vq.noalias() = q.transpose() * rtmp;
      dz(k, j) = tmp.cwiseProduct(vq.cast<cplx>()).sum() / dt;
    }
    tmp.noalias() = back * cache.step_propagator(j);
    back.swap(tmp);
  }
  return dz;
}

/// Functional gradient of the unnormalized distance D.
inline GradientField distance_gradient(const PropagationCache& cache, const TargetGate& w,
                                       GradientMode mode = GradientMode::Continuum) {
  return {-2.0 * overlap_gradient(cache, w, mode).real()};
}

/// Functional gradient of D~ (PhaseDependent) or G (PhaseIndependent).
inline GradientField gradient(const PropagationCache& cache, const TargetGate& w,
                              ObjectiveKind kind,
                              GradientMode mode = GradientMode::Continuum) {
  const double dim = static_cast<double>(cache.model().dimension());
  const CMatrix dz = overlap_gradient(cache, w, mode);
  if (kind == ObjectiveKind::PhaseDependent) return {-dz.real() / (2.0 * dim)};
  const cplx z = overlap(cache.final_propagator(), w.matrix);
  const double modulus = std::abs(z);
  if (modulus < kPhaseSingularThreshold)
    throw PhaseSingularityError("gradient: |Tr(W^dagger U_T)| below singular threshold");
  return {-(std::conj(z) * dz).real() / (dim * modulus)};
}

}  // namespace qpft
