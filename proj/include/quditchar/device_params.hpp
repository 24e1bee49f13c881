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
#include <utility>

namespace qchar {

/// Device parameter vector for the four-level transmon model.
///
/// Angular frequencies are in rad/us, rates in 1/us. The 1<->2
/// transition frequency splits into two parity branches,
/// omega12_bar +/- eps12. The guard transition omega23 and the
/// guard-level rates (index 2 of gamma1/gamma2) are fixed inputs,
/// never fitted.
struct DeviceParams {
  double omega01 = 0.0;
  double omega12_bar = 0.0;
  double eps12 = 0.0;
  double omega23 = 0.0;
  std::array<double, 3> gamma1{};  // decay rates, states 1..3
  std::array<double, 3> gamma2{};  // dephasing rates, states 1..3 (state 0 has none)

  double omega12_plus() const { return omega12_bar + eps12; }
  double omega12_minus() const { return omega12_bar - eps12; }

  /// Throws std::invalid_argument if a rate is negative, eps12 < 0, or
  /// any entry is non-finite.
  void validate() const;

  /// Builds params from transition frequencies and decoherence times of
  /// the two measurable transitions. Guard-level defaults: anharmonic
  /// extrapolation omega23 = 2*omega12_bar - omega01 and rates copied
  /// from state 2. Times in us, frequencies in rad/us.
  static DeviceParams from_times(double omega01, double omega12_bar, double eps12,
                                 double t1_1, double t1_2, double t2_1, double t2_2);
};

/// Converts decay/dephasing times (us) to rates (1/us): gamma1_k = 1/T1_k
/// and the recursion sqrt(gamma2_k) = sqrt(gamma2_{k-1}) + sqrt(2/T2_k)
/// with gamma2_0 = 0. Throws on non-positive times.
std::pair<std::array<double, 3>, std::array<double, 3>> rates_from_times(
    const std::array<double, 3>& t1, const std::array<double, 3>& t2);

/// Combined decoherence time: 1/T2*_k = 1/(2 T1_k) + 1/T2_k.
double combined_t2(double t1, double t2);

}  // namespace qchar
