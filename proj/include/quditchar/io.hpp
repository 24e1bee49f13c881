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
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quditchar/protocol.hpp"

namespace qchar {

/// Population series of one experiment, plus the metadata needed to
/// re-simulate it. CSV format: `# key=value` header lines followed by
/// `t_us,p0,p1,p2` rows.
struct ExperimentData {
  ProtocolKind kind = ProtocolKind::Ramsey01;
  double dt = 0.0;                                // us
  std::vector<double> times;                      // uniform, t_j = j*dt
  Eigen::Matrix<double, 3, Eigen::Dynamic> pops;  // rows n = 0, 1, 2
  double drive = 0.0;                             // rad/us, Ramsey only
  int shots = 0;
  std::string provenance = "synthetic";           // experimental | synthetic
  double sigma = 0.0;                             // additive noise S.D. if synthetic

  int n_samples() const { return static_cast<int>(times.size()); }
  int n_steps() const { return n_samples() - 1; }
  void validate() const;
  ProtocolConfig protocol() const;

  static ExperimentData from_series(const PopulationSeries& s, double drive,
                                    const std::string& provenance = "synthetic",
                                    double sigma = 0.0, int shots = 0);
};

void write_experiment_csv(const ExperimentData& d, const std::filesystem::path& path);
ExperimentData read_experiment_csv(const std::filesystem::path& path);

/// Simulates each protocol at theta_true and adds i.i.d. N(0, sigma_e^2)
/// noise; values are deliberately not clamped to [0,1]. Ramsey 1<->2
/// uses the parity-averaged model.
std::vector<ExperimentData> generate_synthetic(const DeviceParams& theta_true,
                                               const std::vector<ProtocolConfig>& cfgs,
                                               const std::vector<double>& sigma,
                                               std::mt19937_64& rng);

/// Equal-width histogram over [min, max]; the top edge is inclusive.
struct Histogram {
  std::vector<double> edges;   // n_bins + 1
  std::vector<long> counts;    // n_bins
};

Histogram make_histogram(const std::vector<double>& values, int n_bins = 50);
void write_histogram_csv(const Histogram& h, const std::filesystem::path& path);

/// IQ shot CSV: `shot_index,I,Q[,label]`.
struct IQShotFile {
  std::vector<double> i, q;
  std::vector<int> labels;  // empty if unlabeled
};
IQShotFile read_shots_csv(const std::filesystem::path& path);
void write_shots_csv(const IQShotFile& shots, const std::filesystem::path& path);

void write_matrix3_json(const Eigen::Matrix3d& m, const std::string& key,
                        const std::filesystem::path& path);
Eigen::Matrix3d read_matrix3_json(const std::string& key, const std::filesystem::path& path);

}  // namespace qchar
