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
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qpft {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest elementwise deviation |H - H^dagger|.
inline double hermiticity_residual(const CMatrix& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

/// Frobenius norm of U^dagger U - I.
inline double unitarity_residual(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// exp(i * scale * H) for Hermitian H via its eigendecomposition.
inline CMatrix expi_hermitian(const CMatrix& h, double scale) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  const auto& q = eig.eigenvectors();
  Eigen::VectorXcd phases =
      (kI * scale * eig.eigenvalues().cast<cplx>()).array().exp();
  return q * phases.asDiagonal() * q.adjoint();
}

/// Principal-branch argument of the determinant.
inline double det_phase(const CMatrix& m) { return std::arg(m.determinant()); }

}  // namespace qpft
