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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quditchar/bayes.hpp"
#include "quditchar/fit.hpp"

namespace qchar {

/// Malformed or out-of-range configuration. The CLI maps this to its
/// config-error exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SynthSection {
  std::map<std::string, double> sigma;  // protocol kind -> noise S.D.
  std::uint64_t seed = 0;

  double sigma_for(ProtocolKind kind) const;
};

struct FitSection {
  ParameterBounds bounds = ParameterBounds::defaults();
  std::optional<ThetaVector> init;  // absent: FFT-based initialization
  FitOptions options;
};

struct BayesSection {
  double prior_half_width = 0.0;  // rad/us; 0 selects a 500 kHz default
  std::array<double, 2> gamma_shape{0.01, 0.01};
  std::array<double, 2> gamma_rate{0.01, 0.01};
  SamplerConfig sampler = SamplerConfig::defaults();
};

/// One structured config file drives every CLI workflow. All frequency,
/// time, and rate keys carry explicit unit suffixes (_ghz, _mhz, _khz,
/// _us, _ns); internal storage is rad/us and us.
struct RunConfig {
  DeviceParams device;
  std::vector<ProtocolConfig> protocols;
  SynthSection synth;
  FitSection fit;
  BayesSection bayes;
  std::optional<std::filesystem::path> output_dir;

  const ProtocolConfig& protocol(ProtocolKind kind) const;  // throws if absent
};

/// Parses and validates a JSON config. Unknown keys anywhere in the
/// document are rejected.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text);

/// A complete config for the reference device and default grids,
/// usable as a template.
std::string example_config_json();

}  // namespace qchar
