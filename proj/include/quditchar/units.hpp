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

#include <numbers>

namespace qchar::units {

// Internal convention: time in microseconds, angular frequencies and
// rates in rad/us and 1/us. Config files and reports use GHz/MHz/kHz
// and us/ns with explicit unit suffixes.

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double ghz_to_rad_us(double f_ghz) { return kTwoPi * 1e3 * f_ghz; }
inline constexpr double rad_us_to_ghz(double w) { return w / (kTwoPi * 1e3); }

inline constexpr double mhz_to_rad_us(double f_mhz) { return kTwoPi * f_mhz; }
inline constexpr double rad_us_to_mhz(double w) { return w / kTwoPi; }

inline constexpr double khz_to_rad_us(double f_khz) { return kTwoPi * 1e-3 * f_khz; }
inline constexpr double rad_us_to_khz(double w) { return w / (kTwoPi * 1e-3); }

inline constexpr double ns_to_us(double t_ns) { return 1e-3 * t_ns; }
inline constexpr double us_to_ns(double t_us) { return 1e3 * t_us; }

}  // namespace qchar::units
