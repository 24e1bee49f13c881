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

#include "quditchar/protocol.hpp"

#include "quditchar/units.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qchar {

std::string to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Ramsey01: return "ramsey01";
    case ProtocolKind::Ramsey12: return "ramsey12";
    case ProtocolKind::Decay1: return "decay1";
    case ProtocolKind::Decay2: return "decay2";
  }
  throw std::invalid_argument("to_string: unknown protocol kind");
}

ProtocolKind protocol_kind_from_string(const std::string& s) {
  if (s == "ramsey01") return ProtocolKind::Ramsey01;
  if (s == "ramsey12") return ProtocolKind::Ramsey12;
  if (s == "decay1") return ProtocolKind::Decay1;
  if (s == "decay2") return ProtocolKind::Decay2;
  throw std::invalid_argument("unknown protocol kind: " + s);
}

bool is_ramsey(ProtocolKind kind) {
  return kind == ProtocolKind::Ramsey01 || kind == ProtocolKind::Ramsey12;
}

int prepared_level(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Ramsey01: return 0;
    case ProtocolKind::Ramsey12: return 1;
    case ProtocolKind::Decay1: return 1;
    case ProtocolKind::Decay2: return 2;
  }
  throw std::invalid_argument("prepared_level: unknown protocol kind");
}

void ProtocolConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("ProtocolConfig: dt must be > 0");
  if (n_steps < 1) throw std::invalid_argument("ProtocolConfig: n_steps must be >= 1");
  if (is_ramsey(kind) && !(omega_d > 0.0)) {
    throw std::invalid_argument("ProtocolConfig: Ramsey needs a positive drive frequency");
  }
}

ProtocolConfig ProtocolConfig::ramsey01(double omega_d, double dt, int n_steps) {
  return {ProtocolKind::Ramsey01, omega_d, dt, n_steps, true};
}
ProtocolConfig ProtocolConfig::ramsey12(double omega_d, double dt, int n_steps) {
  return {ProtocolKind::Ramsey12, omega_d, dt, n_steps, true};
}
ProtocolConfig ProtocolConfig::decay1(double dt, int n_steps) {
  return {ProtocolKind::Decay1, 0.0, dt, n_steps, true};
}
ProtocolConfig ProtocolConfig::decay2(double dt, int n_steps) {
  return {ProtocolKind::Decay2, 0.0, dt, n_steps, true};
}

DensityMatrix ideal_prepare(int level) {
  if (level < 0 || level > 2) {
    throw std::invalid_argument("ideal_prepare: only levels 0..2 are supported");
  }
  return DensityMatrix::pure(level);
}

DensityMatrix apply_half_pi(const DensityMatrix& rho, int k) {
  if (k != 0 && k != 1) {
    throw std::invalid_argument("apply_half_pi: subspace index must be 0 or 1");
  }
  // exp(-i pi/4 sigma_x) on the (k, k+1) block.
  const double c = std::numbers::sqrt2 / 2.0;
  Matrix4c u = Matrix4c::Identity();
  u(k, k) = c;
  u(k + 1, k + 1) = c;
  u(k, k + 1) = Complex(0.0, -c);
  u(k + 1, k) = Complex(0.0, -c);
  return DensityMatrix(u * rho.matrix() * u.adjoint());
}

namespace {

Propagator free_propagator(const DeviceParams& p, const ProtocolConfig& cfg, int parity) {
  const Matrix4c h_sys = build_system_hamiltonian(p, parity);
  const Matrix4c h_rot = rotating_frame_hamiltonian(h_sys, cfg.omega_d);
  const auto [l1, l2] = decoherence_operators(p);
  return Propagator::build(build_superoperator(h_rot, l1, l2), cfg.dt);
}

PopulationSeries series_shell(const ProtocolConfig& cfg) {
  PopulationSeries s;
  s.kind = cfg.kind;
  s.times.resize(cfg.n_samples());
  for (int j = 0; j < cfg.n_samples(); ++j) s.times[j] = j * cfg.dt;
  s.pops.resize(3, cfg.n_samples());
  return s;
}

}  // namespace

PopulationSeries simulate_decay(const DeviceParams& p, const ProtocolConfig& cfg) {
  cfg.validate();
  if (cfg.kind != ProtocolKind::Decay1 && cfg.kind != ProtocolKind::Decay2) {
    throw std::invalid_argument("simulate_decay: config is not a decay protocol");
  }
  // The free Hamiltonian is diagonal and the prepared state has no
  // coherences, so rho stays diagonal and commutes with H throughout;
  // dropping H from the generator is exact and avoids accumulating
  // matrix-exponential roundoff from the fast lab-frame phases. Parity
  // is irrelevant for the same reason.
  const auto [l1, l2] = decoherence_operators(p);
  const Propagator k = Propagator::build(build_superoperator(Matrix4c::Zero(), l1, l2), cfg.dt);
  const auto trajectory = propagate(ideal_prepare(prepared_level(cfg.kind)), k, cfg.n_steps);
  PopulationSeries s = series_shell(cfg);
  for (int j = 0; j < cfg.n_samples(); ++j) {
    for (int n = 0; n < 3; ++n) s.pops(n, j) = trajectory[j].population(n);
  }
  return s;
}

PopulationSeries simulate_ramsey_branch(const DeviceParams& p, const ProtocolConfig& cfg,
                                        int parity) {
  cfg.validate();
  if (!is_ramsey(cfg.kind)) {
    throw std::invalid_argument("simulate_ramsey_branch: config is not a Ramsey protocol");
  }
  const int level = prepared_level(cfg.kind);
  const Propagator k = free_propagator(p, cfg, parity);
  const DensityMatrix rho_after_pulse = apply_half_pi(ideal_prepare(level), level);
  const auto trajectory = propagate(rho_after_pulse, k, cfg.n_steps);
  PopulationSeries s = series_shell(cfg);
  for (int j = 0; j < cfg.n_samples(); ++j) {
    const DensityMatrix rho_final = apply_half_pi(trajectory[j], level);
    for (int n = 0; n < 3; ++n) s.pops(n, j) = rho_final.population(n);
  }
  return s;
}

PopulationSeries simulate_ramsey_parity_averaged(const DeviceParams& p,
                                                 const ProtocolConfig& cfg) {
  if (p.eps12 == 0.0) {
    return simulate_ramsey_branch(p, cfg, +1);  // branches coincide exactly
  }
  PopulationSeries plus = simulate_ramsey_branch(p, cfg, +1);
  const PopulationSeries minus = simulate_ramsey_branch(p, cfg, -1);
  plus.pops = 0.5 * (plus.pops + minus.pops);
  return plus;
}

std::pair<std::vector<double>, std::vector<double>> fft_amplitude_spectrum(
    const PopulationSeries& series, int row) {
  if (row < 0 || row > 2) {
    throw std::invalid_argument("fft_amplitude_spectrum: row must be 0..2");
  }
  const int n = static_cast<int>(series.times.size());
  if (n < 4) {
    throw std::invalid_argument("fft_amplitude_spectrum: need at least 4 samples");
  }
  const double dt = series.times[1] - series.times[0];
  Eigen::VectorXd x = series.pops.row(row).transpose();
  x.array() -= x.mean();

  const int n_bins = n / 2 + 1;
  std::vector<double> freqs(n_bins), mags(n_bins);
  for (int m = 0; m < n_bins; ++m) {
    Complex acc = 0.0;
    const double w = -units::kTwoPi * m / n;
    for (int j = 0; j < n; ++j) {
      acc += x[j] * std::polar(1.0, w * j);
    }
    freqs[m] = m / (n * dt);  // 1/us == MHz
    mags[m] = std::abs(acc);
  }
  return {freqs, mags};
}

}  // namespace qchar
