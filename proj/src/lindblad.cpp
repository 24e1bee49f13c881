// Copyright 2026 the quditchar authors
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

#include "quditchar/lindblad.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace qchar {

namespace {

double max_abs(const Matrix4c& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

DensityMatrix::DensityMatrix(const Matrix4c& m) : m_(m) {
  if (max_abs(m_ - m_.adjoint()) > kHermTol) {
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  }
  if (std::abs(m_.trace().real() - 1.0) > kTraceTol || std::abs(m_.trace().imag()) > kTraceTol) {
    throw std::invalid_argument("DensityMatrix: trace != 1");
  }
  // Fast positivity monitor: a Cholesky of rho + |tol| I succeeds whenever
  // min eig >= kPositivityTol. Only on failure pay for the eigensolve.
  Matrix4c shifted = m_;
  shifted.diagonal().array() += 1e-9;
  Eigen::LLT<Matrix4c> llt(shifted);
  if (llt.info() != Eigen::Success && min_eigenvalue() < kPositivityTol) {
    throw std::runtime_error("DensityMatrix: state lost positivity (min eigenvalue < -1e-9)");
  }
}

DensityMatrix DensityMatrix::pure(int level) {
  if (level < 0 || level >= kLevels) {
    throw std::invalid_argument("DensityMatrix::pure: level out of range");
  }
  Matrix4c m = Matrix4c::Zero();
  m(level, level) = 1.0;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::from_vector(const Vector16c& v) {
  Matrix4c m = Eigen::Map<const Matrix4c>(v.data());
  return DensityMatrix(m);
}

Vector16c DensityMatrix::vectorized() const {
  return Eigen::Map<const Vector16c>(m_.data());
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::MatrixXcd build_lowering(int n) {
  if (n < 2) {
    throw std::invalid_argument("build_lowering: dimension must be >= 2");
  }
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    a(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  return a;
}

Matrix4c build_system_hamiltonian(const DeviceParams& p, int parity) {
  if (parity != 1 && parity != -1) {
    throw std::invalid_argument("build_system_hamiltonian: parity must be +1 or -1");
  }
  p.validate();
  const double w12 = p.omega12_bar + parity * p.eps12;
  Matrix4c h = Matrix4c::Zero();
  h(1, 1) = p.omega01;
  h(2, 2) = p.omega01 + w12;
  h(3, 3) = p.omega01 + w12 + p.omega23;
  return h;
}

Matrix4c rotating_frame_hamiltonian(const Matrix4c& h_sys, double omega_d,
                                    const ControlEnvelope& envelope) {
  const Eigen::MatrixXcd a = build_lowering(kLevels);
  const Eigen::MatrixXcd number_op = a.adjoint() * a;
  Matrix4c h = h_sys - omega_d * number_op;
  if (envelope.in_phase != 0.0 || envelope.quadrature != 0.0) {
    h += envelope.in_phase * (a + a.adjoint());
    h += Complex(0.0, -envelope.quadrature) * (a - a.adjoint());
  }
  return h;
}

std::pair<Matrix4c, Matrix4c> decoherence_operators(const DeviceParams& p) {
  p.validate();
  Matrix4c l1 = Matrix4c::Zero();
  Matrix4c l2 = Matrix4c::Zero();
  for (int k = 0; k < 3; ++k) {
    l1(k, k + 1) = std::sqrt(p.gamma1[k]);
    l2(k + 1, k + 1) = std::sqrt(p.gamma2[k]);
  }
  return {l1, l2};
}

namespace {

Matrix16c dissipator(const Matrix4c& l) {
  const Matrix4c id = Matrix4c::Identity();
  const Matrix4c ldl = l.adjoint() * l;
  Matrix16c d = Eigen::kroneckerProduct(l.conjugate(), l);
  d -= 0.5 * Eigen::kroneckerProduct(id, ldl);
  d -= 0.5 * Eigen::kroneckerProduct(ldl.transpose(), id);
  return d;
}

}  // namespace

Superoperator build_superoperator(const Matrix4c& h_rot, const Matrix4c& l1,
                                  const Matrix4c& l2) {
  if ((h_rot - h_rot.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("build_superoperator: Hamiltonian is not Hermitian");
  }
  const Matrix4c id = Matrix4c::Identity();
  Superoperator s;
  s.hamiltonian_part = Complex(0.0, -1.0) *
      (Eigen::kroneckerProduct(id, h_rot) - Eigen::kroneckerProduct(h_rot.transpose(), id));
  s.decay_part = dissipator(l1);
  s.dephasing_part = dissipator(l2);
  return s;
}

Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix_exponential: matrix must be square");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("matrix_exponential: non-finite entries");
  }
  return m.exp();
}

Propagator Propagator::build(const Superoperator& gen, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("Propagator::build: dt must be positive");
  }
  Propagator k;
  k.matrix = matrix_exponential(gen.matrix() * dt);
  k.dt = dt;
  return k;
}

std::vector<DensityMatrix> propagate(const DensityMatrix& rho0, const Propagator& k,
                                     int steps) {
  if (steps < 0) {
    throw std::invalid_argument("propagate: steps must be >= 0");
  }
  std::vector<DensityMatrix> trajectory;
  trajectory.reserve(static_cast<size_t>(steps) + 1);
  trajectory.push_back(rho0);
  Vector16c v = rho0.vectorized();
  for (int j = 0; j < steps; ++j) {
    v = k.matrix * v;
    trajectory.push_back(DensityMatrix::from_vector(v));
  }
  return trajectory;
}

}  // namespace qchar
