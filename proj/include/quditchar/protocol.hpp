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

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "quditchar/lindblad.hpp"

namespace qchar {

enum class ProtocolKind { Ramsey01, Ramsey12, Decay1, Decay2 };

std::string to_string(ProtocolKind kind);
ProtocolKind protocol_kind_from_string(const std::string& s);
bool is_ramsey(ProtocolKind kind);
/// Prepared level: Ramsey01 -> 0, Ramsey12/Decay1 -> 1, Decay2 -> 2.
int prepared_level(ProtocolKind kind);

/// Dark-time grid and drive for one experiment. Defaults follow the
/// standard grids: Ramsey dt = 20 ns with 250 steps, decay dt = 80 ns
/// with 500 steps. t_j = j*dt for j = 0..n_steps.
struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::Ramsey01;
  double omega_d = 0.0;  // rad/us, Ramsey only
  double dt = 0.020;     // us
  int n_steps = 250;
  bool include_j0 = true;

  void validate() const;
  int n_samples() const { return n_steps + 1; }

  static ProtocolConfig ramsey01(double omega_d, double dt = 0.020, int n_steps = 250);
  static ProtocolConfig ramsey12(double omega_d, double dt = 0.020, int n_steps = 250);
  static ProtocolConfig decay1(double dt = 0.080, int n_steps = 500);
  static ProtocolConfig decay2(double dt = 0.080, int n_steps = 500);
};

/// Simulated populations P_n(t_j) for the three measurable states.
/// Guard-level population is simulated but not reported.
struct PopulationSeries {
  ProtocolKind kind = ProtocolKind::Ramsey01;
  std::vector<double> times;                     // us
  Eigen::Matrix<double, 3, Eigen::Dynamic> pops; // rows n = 0, 1, 2
};

/// rho = |level><level| for level in {0, 1, 2}.
DensityMatrix ideal_prepare(int level);

/// Instantaneous pi/2 rotation exp(-i pi/4 sigma_x) on the {|k>,|k+1>}
/// block, identity elsewhere. k in {0, 1}.
DensityMatrix apply_half_pi(const DensityMatrix& rho, int k);

/// Energy-decay experiment: prepare |k>, free evolution, record P_n(t_j).
PopulationSeries simulate_decay(const DeviceParams& p, const ProtocolConfig& cfg);

/// One parity branch of a Ramsey experiment: prepare |k>, pi/2 pulse,
/// free evolution for each dark time, second pi/2 pulse, read out.
PopulationSeries simulate_ramsey_branch(const DeviceParams& p, const ProtocolConfig& cfg,
                                        int parity);

/// Elementwise average of the +1 and -1 parity branches.
PopulationSeries simulate_ramsey_parity_averaged(const DeviceParams& p,
                                                 const ProtocolConfig& cfg);

/// Discrete Fourier magnitude of the mean-subtracted population row.
/// Returns (frequencies in MHz, magnitudes) for bins 0..N/2.
/// Throws if the series has fewer than 4 samples.
std::pair<std::vector<double>, std::vector<double>> fft_amplitude_spectrum(
    const PopulationSeries& series, int row);

}  // namespace qchar
