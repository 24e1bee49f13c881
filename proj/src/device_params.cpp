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

#include "quditchar/device_params.hpp"

#include <cmath>
#include <stdexcept>

namespace qchar {

void DeviceParams::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(omega01) || !finite(omega12_bar) || !finite(eps12) || !finite(omega23)) {
    throw std::invalid_argument("DeviceParams: non-finite frequency");
  }
  if (eps12 < 0.0) {
    throw std::invalid_argument("DeviceParams: charge dispersion eps12 must be >= 0");
  }
  for (int k = 0; k < 3; ++k) {
    if (!finite(gamma1[k]) || !finite(gamma2[k]) || gamma1[k] < 0.0 || gamma2[k] < 0.0) {
      throw std::invalid_argument("DeviceParams: decoherence rates must be >= 0 and finite");
    }
  }
}

DeviceParams DeviceParams::from_times(double omega01, double omega12_bar, double eps12,
                                      double t1_1, double t1_2, double t2_1, double t2_2) {
  if (t1_1 <= 0.0 || t1_2 <= 0.0 || t2_1 <= 0.0 || t2_2 <= 0.0) {
    throw std::invalid_argument("DeviceParams::from_times: times must be positive");
  }
  DeviceParams p;
  p.omega01 = omega01;
  p.omega12_bar = omega12_bar;
  p.eps12 = eps12;
  p.omega23 = 2.0 * omega12_bar - omega01;
  p.gamma1 = {1.0 / t1_1, 1.0 / t1_2, 1.0 / t1_2};
  const double g21 = 2.0 / t2_1;
  const double sqrt_g22 = std::sqrt(g21) + std::sqrt(2.0 / t2_2);
  p.gamma2 = {g21, sqrt_g22 * sqrt_g22, sqrt_g22 * sqrt_g22};
  p.validate();
  return p;
}

std::pair<std::array<double, 3>, std::array<double, 3>> rates_from_times(
    const std::array<double, 3>& t1, const std::array<double, 3>& t2) {
  std::array<double, 3> gamma1{};
  std::array<double, 3> gamma2{};
  double sqrt_g2 = 0.0;  // gamma2_0 = 0
  for (int k = 0; k < 3; ++k) {
    if (t1[k] <= 0.0 || t2[k] <= 0.0) {
      throw std::invalid_argument("rates_from_times: times must be positive");
    }
    gamma1[k] = 1.0 / t1[k];
    sqrt_g2 += std::sqrt(2.0 / t2[k]);
    gamma2[k] = sqrt_g2 * sqrt_g2;
  }
  return {gamma1, gamma2};
}

double combined_t2(double t1, double t2) {
  if (t1 <= 0.0 || t2 <= 0.0) {
    throw std::invalid_argument("combined_t2: times must be positive");
  }
  return 1.0 / (1.0 / (2.0 * t1) + 1.0 / t2);
}

}  // namespace qchar
