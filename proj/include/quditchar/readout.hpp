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
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace qchar {

/// One demodulated readout shot in the IQ plane, optionally tagged with
/// the prepared state.
struct IQShot {
  double i = 0.0;
  double q = 0.0;
  int label = -1;  // 0..2, or -1 when unlabeled
};

struct GaussianComponent {
  double weight = 0.0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
};

/// Three-component Gaussian mixture over IQ shots. state_of_component
/// maps mixture component index -> qudit state.
struct GaussianMixture {
  std::array<GaussianComponent, 3> components;
  std::array<int, 3> state_of_component{0, 1, 2};
  double log_likelihood = 0.0;
  int iterations = 0;
};

struct GmmOptions {
  int max_iterations = 500;
  double rel_tolerance = 1e-8;  // on the log-likelihood change
};

/// Expectation-maximization with farthest-point seeding. Components are
/// assigned to states by majority label when labels are present, else by
/// ascending mean I. Collapsed covariances are regularized by adding
/// 1e-6 * (data variance) to the diagonal. Needs >= 90 shots.
GaussianMixture fit_gmm(const std::vector<IQShot>& shots, std::mt19937_64& rng,
                        const GmmOptions& opts = {});

/// Posterior state probabilities of one shot (sums to 1).
Eigen::Vector3d classify(const GaussianMixture& gmm, const IQShot& shot);

/// State-assignment probabilities: c[i][j] = Pr(measure |i> | prepared |j>).
/// Columns sum to 1.
struct ConfusionMatrix {
  Eigen::Matrix3d c = Eigen::Matrix3d::Identity();

  void validate() const;
  double condition_number() const;
};

/// Column j = average classify(.) over shots labeled j. Throws if a
/// label class is missing.
ConfusionMatrix build_confusion(const GaussianMixture& gmm, const std::vector<IQShot>& shots);

/// SPAM mitigation by inversion: returns C^-1 * measured. Values may
/// leave [0,1] unless clamp_to_simplex is set. Refuses matrices with
/// condition number above 1e6.
Eigen::Vector3d mitigate(const ConfusionMatrix& confusion, const Eigen::Vector3d& measured,
                         bool clamp_to_simplex = false);

/// Columnwise mean of per-shot population vectors.
Eigen::Vector3d average_shots(const Eigen::Matrix<double, Eigen::Dynamic, 3>& per_shot_pops);

}  // namespace qchar
