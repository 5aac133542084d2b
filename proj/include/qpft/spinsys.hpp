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
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qpft/linalg.hpp"

namespace qpft {

/// Coupled-spin register: n qubits with distinct transition frequencies and
/// isotropic Heisenberg couplings. Immutable once constructed.
class SpinSystem {
 public:
  SpinSystem(std::vector<double> omega, RMatrix couplings)
      : omega_(std::move(omega)), couplings_(std::move(couplings)) {
    validate();
  }

  /// Equal coupling J between every pair; frequencies default to the
  /// reference set (20, 24, 30, 40) truncated to n.
  static SpinSystem uniform(int n, double coupling) {
    if (n < 1 || n > 4)
      throw Error("uniform: default frequencies cover 1..4 qubits, got " +
                  std::to_string(n));
    return uniform(default_frequencies(n), coupling);
  }

  static SpinSystem uniform(std::vector<double> omega, double coupling) {
    const auto n = static_cast<Eigen::Index>(omega.size());
    RMatrix j = RMatrix::Constant(n, n, coupling);
    j.diagonal().setZero();
    return SpinSystem(std::move(omega), std::move(j));
  }

  static std::vector<double> default_frequencies(int n) {
    static const double kDefault[] = {20.0, 24.0, 30.0, 40.0};
    return {kDefault, kDefault + std::min(n, 4)};
  }

  int qubits() const { return static_cast<int>(omega_.size()); }
  int dimension() const { return 1 << qubits(); }
  const std::vector<double>& omega() const { return omega_; }
  const RMatrix& couplings() const { return couplings_; }
  double coupling(int k, int j) const { return couplings_(k, j); }
  double max_frequency() const {
    return *std::max_element(omega_.begin(), omega_.end());
  }
  double min_frequency() const {
    return *std::min_element(omega_.begin(), omega_.end());
  }
  /// Mean of the upper-triangle couplings (J itself for equal couplings).
  double mean_coupling() const {
    const int n = qubits();
    if (n < 2) return 0.0;
    double sum = 0.0;
    for (int k = 0; k < n; ++k)
      for (int j = k + 1; j < n; ++j) sum += couplings_(k, j);
    return sum / (n * (n - 1) / 2);
  }

 private:
  void validate() const {
    const auto n = static_cast<Eigen::Index>(omega_.size());
    if (n < 1) throw Error("SpinSystem: need at least one qubit");
    if (n > 4) throw Error("SpinSystem: at most 4 qubits are supported");
    if (couplings_.rows() != n || couplings_.cols() != n)
      throw Error("SpinSystem: coupling matrix must be n x n");
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!(omega_[k] > 0.0) || !std::isfinite(omega_[k]))
        throw Error("SpinSystem: frequencies must be positive and finite");
      for (Eigen::Index j = 0; j < k; ++j)
        if (omega_[k] == omega_[j])
          throw Error("SpinSystem: frequencies must be pairwise distinct");
      if (couplings_(k, k) != 0.0)
        throw Error("SpinSystem: coupling diagonal must be zero");
      for (Eigen::Index j = 0; j < n; ++j)
        if (couplings_(k, j) != couplings_(j, k) ||
            !std::isfinite(couplings_(k, j)))
          throw Error("SpinSystem: coupling matrix must be symmetric");
    }
  }

  std::vector<double> omega_;
  RMatrix couplings_;
};

enum class SpinAxis { X, Y, Z };

/// Single-spin operator S_a = sigma_a / 2 in the basis (|up>, |down>).
inline CMatrix spin_half(SpinAxis axis) {
  CMatrix s(2, 2);
  switch (axis) {
    case SpinAxis::X: s << 0, 0.5, 0.5, 0; break;
    case SpinAxis::Y: s << 0, -0.5 * kI, 0.5 * kI, 0; break;
    case SpinAxis::Z: s << 0.5, 0, 0, -0.5; break;
  }
  return s;
}

/// S_a acting on qubit k (0-based) of an n-qubit register; qubit 0 is the
/// leftmost tensor factor.
inline CMatrix spin_operator(int n, int k, SpinAxis axis) {
  if (k < 0 || k >= n) throw Error("spin_operator: qubit index out of range");
  CMatrix out = CMatrix::Identity(1, 1);
  const CMatrix id2 = CMatrix::Identity(2, 2);
  for (int q = 0; q < n; ++q) out = kron(out, q == k ? spin_half(axis) : id2);
  return out;
}

/// H0 = sum_k omega_k S_z^(k) + sum_{k<j} J^(k,j) S^(k).S^(j).
inline CMatrix build_drift_hamiltonian(const SpinSystem& system) {
  const int n = system.qubits();
  const int dim = system.dimension();
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int k = 0; k < n; ++k)
    h += system.omega()[k] * spin_operator(n, k, SpinAxis::Z);
  for (int k = 0; k < n; ++k) {
    for (int j = k + 1; j < n; ++j) {
      const double jkj = system.coupling(k, j);
      if (jkj == 0.0) continue;
      for (auto axis : {SpinAxis::X, SpinAxis::Y, SpinAxis::Z})
        h += jkj * spin_operator(n, k, axis) * spin_operator(n, j, axis);
    }
  }
  return h;
}

/// [S_x^(1), ..., S_x^(n)].
inline std::vector<CMatrix> build_control_operators(const SpinSystem& system) {
  std::vector<CMatrix> ops;
  ops.reserve(system.qubits());
  for (int k = 0; k < system.qubits(); ++k)
    ops.push_back(spin_operator(system.qubits(), k, SpinAxis::X));
  return ops;
}

// ---------------------------------------------------------------------------
// Target gates

enum class GateId { CNOT, SWAP, SQRT_SWAP, QFT, QFT_PRIME, CPHASE, IDENTITY, RANDOM };

struct GateSpec {
  GateId id = GateId::CNOT;
  double alpha = 0.0;      // CPHASE angle
  std::uint64_t seed = 0;  // RANDOM generator seed
};

struct TargetGate {
  CMatrix matrix;
  std::string name;
  int phase_index = 0;

  int dimension() const { return static_cast<int>(matrix.rows()); }
};

inline std::string gate_name(const GateSpec& spec) {
  switch (spec.id) {
    case GateId::CNOT: return "CNOT";
    case GateId::SWAP: return "SWAP";
    case GateId::SQRT_SWAP: return "SQRT_SWAP";
    case GateId::QFT: return "QFT";
    case GateId::QFT_PRIME: return "QFT_PRIME";
    case GateId::CPHASE: return "CPHASE(" + std::to_string(spec.alpha) + ")";
    case GateId::IDENTITY: return "IDENTITY";
    case GateId::RANDOM: return "RANDOM(" + std::to_string(spec.seed) + ")";
  }
  return "?";
}

/// Parses CNOT, SWAP, SQRT_SWAP, QFT, QFT_PRIME, IDENTITY, RANDOM and CPHASE;
/// the CPHASE angle is passed separately.
inline GateSpec parse_gate(std::string name, double alpha = 0.0,
                           std::uint64_t seed = 0) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  GateSpec spec;
  spec.alpha = alpha;
  spec.seed = seed;
  if (name == "CNOT") spec.id = GateId::CNOT;
  else if (name == "SWAP") spec.id = GateId::SWAP;
  else if (name == "SQRT_SWAP" || name == "SQRTSWAP") spec.id = GateId::SQRT_SWAP;
  else if (name == "QFT") spec.id = GateId::QFT;
  else if (name == "QFT_PRIME" || name == "QFT'") spec.id = GateId::QFT_PRIME;
  else if (name == "CPHASE") spec.id = GateId::CPHASE;
  else if (name == "IDENTITY" || name == "I") spec.id = GateId::IDENTITY;
  else if (name == "RANDOM") spec.id = GateId::RANDOM;
  else throw Error("unknown gate name '" + name + "'");
  return spec;
}

/// Global phase e^{i 2 pi m / N}.
inline cplx global_phase(int phase_index, int dim) {
  return std::polar(1.0, 2.0 * kPi * phase_index / dim);
}

namespace detail {

// Removes the determinant phase so the result lies in SU(N):
// M -> e^{-i arg(det M)/N} M with the principal branch of arg.
inline CMatrix special_unitary(const CMatrix& m) {
  const auto dim = static_cast<double>(m.rows());
  return std::polar(1.0, -det_phase(m) / dim) * m;
}

inline CMatrix fourier(int dim, int offset) {
  CMatrix w(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  const cplx pre = norm * std::polar(1.0, 5.0 * kPi / (2.0 * dim));
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) {
      const long long e = static_cast<long long>(j + offset) * (k + offset) % dim;
      w(j, k) = pre * std::polar(1.0, 2.0 * kPi * static_cast<double>(e) / dim);
    }
  // The e^{5 i pi / 2N} prefactor yields unit determinant only for N = 4.
  if (std::abs(w.determinant() - 1.0) > 1e-12) w = special_unitary(w);
  return w;
}

inline CMatrix random_generator(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix x(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      x(i, j) = cplx(re, im);
    }
  CMatrix a = 0.5 * (x + x.adjoint());
  a -= (a.trace() / static_cast<double>(dim)) * CMatrix::Identity(dim, dim);
  return a;
}

}  // namespace detail

/// W = e^{iA} for a Hermitian traceless generator A.
inline TargetGate gate_from_generator(const CMatrix& generator,
                                      std::string name = "RANDOM") {
  if (hermiticity_residual(generator) > 1e-12)
    throw Error("gate_from_generator: generator must be Hermitian");
  if (std::abs(generator.trace()) > 1e-10)
    throw Error("gate_from_generator: generator must be traceless");
  return {expi_hermitian(generator, 1.0), std::move(name), 0};
}

inline TargetGate random_su_gate(int n, std::uint64_t seed) {
  if (n < 1) throw Error("random_su_gate: n must be >= 1");
  return gate_from_generator(detail::random_generator(1 << n, seed),
                             "RANDOM(" + std::to_string(seed) + ")");
}

/// Named target gate in SU(N), multiplied by the global phase
/// e^{i 2 pi m / N}.
inline TargetGate make_gate(const GateSpec& spec, int n, int phase_index = 0) {
  if (n < 1) throw Error("make_gate: n must be >= 1");
  const int dim = 1 << n;
  if (phase_index < 0 || phase_index >= dim)
    throw Error("make_gate: phase index must lie in 0..N-1");
  const bool two_qubit = spec.id == GateId::CNOT || spec.id == GateId::SWAP ||
                         spec.id == GateId::SQRT_SWAP || spec.id == GateId::CPHASE;
  if (two_qubit && n != 2)
    throw Error("make_gate: " + gate_name(spec) + " is defined for n = 2 only");

  CMatrix w = CMatrix::Zero(dim, dim);
  switch (spec.id) {
    case GateId::CNOT:
      w(0, 0) = w(1, 1) = w(2, 3) = w(3, 2) = 1.0;
      w *= std::polar(1.0, -kPi / 4);
      break;
    case GateId::SWAP:
      w(0, 0) = w(1, 2) = w(2, 1) = w(3, 3) = 1.0;
      w *= std::polar(1.0, -kPi / 4);
      break;
    case GateId::SQRT_SWAP: {
      const double r = 1.0 / std::sqrt(2.0);
      w(0, 0) = w(3, 3) = 1.0;
      w(1, 1) = w(2, 2) = r * std::polar(1.0, kPi / 4);
      w(1, 2) = w(2, 1) = r * std::polar(1.0, -kPi / 4);
      w = detail::special_unitary(w);  // prefactor e^{-i pi/8}
      break;
    }
    case GateId::QFT: w = detail::fourier(dim, 0); break;
    case GateId::QFT_PRIME: w = detail::fourier(dim, 1); break;
    case GateId::CPHASE:
      w(0, 0) = w(1, 1) = w(2, 2) = 1.0;
      w(3, 3) = std::polar(1.0, spec.alpha);
      w *= std::polar(1.0, -spec.alpha / 4);
      break;
    case GateId::IDENTITY: w = CMatrix::Identity(dim, dim); break;
    case GateId::RANDOM: w = random_su_gate(n, spec.seed).matrix; break;
  }
  return {global_phase(phase_index, dim) * w, gate_name(spec), phase_index};
}

/// The same gate with another global-phase index.
inline TargetGate with_phase(const TargetGate& gate, int phase_index) {
  const int dim = gate.dimension();
  if (phase_index < 0 || phase_index >= dim)
    throw Error("with_phase: phase index must lie in 0..N-1");
  return {global_phase(phase_index - gate.phase_index, dim) * gate.matrix,
          gate.name, phase_index};
}

}  // namespace qpft
