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

#include "qpft/dynamics.hpp"
#include "qpft/objective.hpp"

namespace qpft {

/// Additive white noise: E{xi_k(t) xi_j(t')} = sigma2 * beta_kj * delta(t - t').
struct NoiseSpec {
  double sigma2 = 0.0;
  RMatrix beta;

  static NoiseSpec independent(int fields, double sigma2) {
    return {sigma2, RMatrix::Identity(fields, fields)};
  }

  void validate(int fields) const {
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
      throw Error("NoiseSpec: sigma2 must be non-negative");
    if (beta.rows() != fields || beta.cols() != fields)
      throw Error("NoiseSpec: beta must be n x n");
    for (int k = 0; k < fields; ++k) {
      if (beta(k, k) != 1.0) throw Error("NoiseSpec: beta diagonal must be 1");
      for (int j = 0; j < fields; ++j) {
        if (beta(k, j) != beta(j, k)) throw Error("NoiseSpec: beta must be symmetric");
        if (beta(k, j) < 0.0 || beta(k, j) > 1.0)
          throw Error("NoiseSpec: beta entries must lie in [0, 1]");
      }
    }
  }
};

/// Equal-time Hessian block of D~ at an optimum, (1/2N) Tr[H_c^(k) H_c^(j)].
inline double hessian_diag_block(const Model& model, int k, int j) {
  if (k < 0 || j < 0 || k >= model.fields() || j >= model.fields())
    throw Error("hessian_diag_block: index out of range");
  const double dim = static_cast<double>(model.dimension());
  return (model.controls[k] * model.controls[j]).trace().real() / (2.0 * dim);
}

inline double hessian_diag_block(const SpinSystem& system, int k, int j) {
  return hessian_diag_block(Model(system), k, j);
}

/// Second-order expected gate error (sigma2 T / 4N) sum_kj beta_kj Tr[Hc_k Hc_j].
inline double predicted_error(const Model& model, double final_time, const NoiseSpec& noise) {
  if (!(final_time > 0.0)) throw Error("predicted_error: T must be positive");
  noise.validate(model.fields());
  double sum = 0.0;
  for (int k = 0; k < model.fields(); ++k)
    for (int j = 0; j < model.fields(); ++j)
      sum += noise.beta(k, j) * (model.controls[k] * model.controls[j]).trace().real();
  return noise.sigma2 * final_time * sum / (4.0 * model.dimension());
}

inline double predicted_error(const SpinSystem& system, double final_time,
                              const NoiseSpec& noise) {
  return predicted_error(Model(system), final_time, noise);
}

/// Closed form sigma2 n T / 16 for x-polarized controls and independent noise.
inline double predicted_error_independent(int qubits, double final_time, double sigma2) {
  return sigma2 * qubits * final_time / 16.0;
}

struct MonteCarloResult {
  double mean = 0.0;
  double standard_error = 0.0;
  int trials = 0;
};

/// Mean D~ over noisy realizations eps + xi. Each knob receives a normal draw
/// of variance sigma2 / dt, correlated across fields by the Cholesky factor
/// of beta. `substeps` > 1 first splits every interval so the noise is
/// sampled on a finer mesh than the control. Trial i uses the PRNG stream
/// seeded by (seed, i).
inline MonteCarloResult monte_carlo_error(std::shared_ptr<const Model> model,
                                          const TargetGate& gate,
                                          const ControlFieldSet& optimal,
                                          const NoiseSpec& noise, int trials,
                                          std::uint64_t seed, int substeps = 1) {
  noise.validate(model->fields());
  if (trials < 1) throw Error("monte_carlo_error: need at least one trial");
  Eigen::LLT<RMatrix> chol(noise.beta);
  if (chol.info() != Eigen::Success)
    throw Error("monte_carlo_error: beta is not positive definite");
  const RMatrix factor = chol.matrixL();

  const ControlFieldSet base = refine_fields(optimal, substeps);
  const double amplitude = std::sqrt(noise.sigma2 / base.grid.dt());
  const int nf = base.fields();
  const int steps = base.steps();

  double sum = 0.0, sum_sq = 0.0;
  RMatrix draws(nf, steps);
  for (int trial = 0; trial < trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = 0; j < steps; ++j)
      for (int k = 0; k < nf; ++k) draws(k, j) = normal(rng);
    const ControlFieldSet noisy(base.grid, base.values + amplitude * (factor * draws));
    const double d = normalized_distance(PropagationCache(model, noisy).final_propagator(), gate);
    sum += d;
    sum_sq += d * d;
  }
  MonteCarloResult out;
  out.trials = trials;
  out.mean = sum / trials;
  if (trials > 1) {
    const double var = std::max(0.0, (sum_sq - trials * out.mean * out.mean) / (trials - 1));
    out.standard_error = std::sqrt(var / trials);
  }
  return out;
}

}  // namespace qpft
