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

#include <array>
#include <vector>

#include "quditchar/io.hpp"
#include "quditchar/lbfgs.hpp"

namespace qchar {

// Fitted parameter vector: (omega01, omega12_bar, eps12,
// gamma1_1, gamma1_2, gamma2_1, gamma2_2), rad/us and 1/us.
inline constexpr int kNumFitParams = 7;
using ThetaVector = std::array<double, kNumFitParams>;

/// Expands theta to a full device, applying the guard-level defaults
/// (omega23 anharmonic extrapolation, guard rates copied from state 2).
DeviceParams device_from_theta(const ThetaVector& theta);
ThetaVector theta_from_device(const DeviceParams& p);

struct ParameterBounds {
  ThetaVector lower{};
  ThetaVector upper{};

  void validate() const;
  bool contains(const ThetaVector& theta) const;
  bool strictly_interior(const ThetaVector& theta) const;

  /// Default boxes: omega01 in 3448.7 +/- 1 MHz, omega12_bar in
  /// 3240.3 +/- 1 MHz, eps12 in 140 +/- 125 kHz, gamma1_k in
  /// [3.33e-3, 0.1] /us, gamma2_1 in [7.14e-3, 10] /us, gamma2_2 in
  /// [0.05, 0.5] /us.
  static ParameterBounds defaults();
};

struct FitProblem {
  std::vector<ExperimentData> data;  // up to one series per protocol kind
  ParameterBounds bounds;
  ThetaVector init{};
};

struct FitOptions {
  int barrier_stages = 6;
  double mu0_factor = 1e-2;   // mu_0 = mu0_factor * J(init)
  double mu_shrink = 0.1;
  double mu_min = 1e-12;
  bool coarse_frequency_scan = true;
  LbfgsOptions lbfgs{};
};

struct FitResult {
  ThetaVector theta_hat{};
  DeviceParams device;
  double objective_value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_norms;  // sqrt(SSR_e), one per experiment
};

/// Simulates the model series matching one experiment's protocol
/// (parity-averaged for Ramsey 1<->2).
PopulationSeries simulate_for_data(const ThetaVector& theta, const ExperimentData& d);

/// Per-experiment contributions Delta_t_e * SSR_e to the mismatch J.
std::vector<double> objective_terms(const ThetaVector& theta,
                                    const std::vector<ExperimentData>& data);

/// J(theta) = sum_e sum_n Delta_t_e sum_j (Phat_n(t_j) - P_n(t_j))^2.
double objective(const ThetaVector& theta, const std::vector<ExperimentData>& data);

/// Central finite differences of J, taken in the rescaled coordinates
/// (frequencies in kHz, rates in log-space) and mapped back, so step
/// sizes stay proportionate across the disparate parameter magnitudes.
ThetaVector objective_gradient(const ThetaVector& theta,
                               const std::vector<ExperimentData>& data);

/// Barrier-penalized limited-memory quasi-Newton minimization of J over
/// the box: minimizes J + mu * B with B = -sum_i [log(theta_i - l_i) +
/// log(u_i - theta_i)] over a decreasing mu-schedule.
FitResult fit(const FitProblem& problem, const FitOptions& opts = {});

/// Frequency guesses from FFT peak locations (two peaks for the 1<->2
/// branches), decay-rate guesses from log-linear slopes, everything
/// clamped to the box interior. Falls back to box centers when no peak
/// rises above 3x the median magnitude.
ThetaVector initialize_from_fft(const std::vector<ExperimentData>& data,
                                const ParameterBounds& bounds);

struct SpectralPeak {
  double freq_mhz = 0.0;
  double magnitude = 0.0;
};

/// Local maxima above 3x the median magnitude, strongest first.
std::vector<SpectralPeak> find_spectral_peaks(const std::vector<double>& freqs,
                                              const std::vector<double>& mags);

}  // namespace qchar
