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

#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "quditchar/device_params.hpp"

namespace qchar {

inline constexpr int kLevels = 4;  // three measurable states plus one guard level

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix4cd;
using Matrix16c = Eigen::Matrix<Complex, 16, 16>;
using Vector16c = Eigen::Matrix<Complex, 16, 1>;

/// Density matrix of the four-level system. Hermiticity and unit trace
/// are checked on construction; positivity is monitored (an eigenvalue
/// below -1e-9 raises, it is never clipped).
class DensityMatrix {
 public:
  static constexpr double kHermTol = 1e-12;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = -1e-9;

  explicit DensityMatrix(const Matrix4c& m);

  /// rho = |level><level|
  static DensityMatrix pure(int level);

  /// Reconstructs rho from a column-stacked 16-vector.
  static DensityMatrix from_vector(const Vector16c& v);

  const Matrix4c& matrix() const { return m_; }
  Vector16c vectorized() const;

  double population(int k) const { return m_(k, k).real(); }
  double trace_real() const { return m_.trace().real(); }
  double min_eigenvalue() const;
  double purity() const { return (m_ * m_).trace().real(); }

 private:
  Matrix4c m_;
};

/// Lowering operator a of dimension n: a[k-1,k] = sqrt(k). Throws for n < 2.
Eigen::MatrixXcd build_lowering(int n);

/// Diagonal system Hamiltonian diag(0, w01, w01+w12, w01+w12+w23) with
/// w12 = omega12_bar + parity * eps12, parity in {-1, +1}.
Matrix4c build_system_hamiltonian(const DeviceParams& p, int parity);

/// Piecewise-constant control envelope in the rotating frame.
struct ControlEnvelope {
  double in_phase = 0.0;   // I
  double quadrature = 0.0; // Q
};

/// H_rot = H_s - omega_d a'a + I (a + a') - i Q (a - a').
Matrix4c rotating_frame_hamiltonian(const Matrix4c& h_sys, double omega_d,
                                    const ControlEnvelope& envelope = {});

/// Decay operator L1 (superdiagonal sqrt(gamma1_k)) and dephasing
/// operator L2 (diag(0, sqrt(gamma2_k))).
std::pair<Matrix4c, Matrix4c> decoherence_operators(const DeviceParams& p);

/// Generator of d/dt vec(rho), split into its Hamiltonian commutator and
/// the two decoherence contributions. Column-stacking convention.
struct Superoperator {
  Matrix16c hamiltonian_part;
  Matrix16c decay_part;
  Matrix16c dephasing_part;

  Matrix16c matrix() const { return hamiltonian_part + decay_part + dephasing_part; }
};

/// -i(I x H - H^T x I) + sum_j [conj(Lj) x Lj - (I x (Lj'Lj) + (Lj'Lj)^T x I)/2].
/// Throws if h_rot is not Hermitian.
Superoperator build_superoperator(const Matrix4c& h_rot, const Matrix4c& l1,
                                  const Matrix4c& l2);

/// exp(M) by scaling-and-squaring with a diagonal Pade kernel.
/// Throws for non-square input.
Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& m);

/// One-step propagator K = exp(generator * dt).
struct Propagator {
  Matrix16c matrix;
  double dt = 0.0;

  static Propagator build(const Superoperator& gen, double dt);
};

/// Returns [rho_0, rho_1, ..., rho_steps] with rho_{j+1} = unvec(K vec(rho_j)).
/// Each state is validated (trace, Hermiticity, positivity monitor).
std::vector<DensityMatrix> propagate(const DensityMatrix& rho0, const Propagator& k,
                                     int steps);

}  // namespace qchar
