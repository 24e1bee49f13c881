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

#include "quditchar/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qchar {

namespace {

constexpr int kComponents = 3;

double log_gaussian_2d(const Eigen::Vector2d& x, const GaussianComponent& comp) {
  const Eigen::Vector2d d = x - comp.mean;
  const double det = comp.cov.determinant();
  const Eigen::Vector2d solved = comp.cov.ldlt().solve(d);
  return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * d.dot(solved);
}

double data_variance(const std::vector<IQShot>& shots) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& s : shots) mean += Eigen::Vector2d(s.i, s.q);
  mean /= static_cast<double>(shots.size());
  double var = 0.0;
  for (const auto& s : shots) {
    var += (Eigen::Vector2d(s.i, s.q) - mean).squaredNorm();
  }
  return var / static_cast<double>(shots.size());
}

void regularize_if_collapsed(Eigen::Matrix2d& cov, double var_scale) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov, Eigen::EigenvaluesOnly);
  const double floor = 1e-12 * std::max(var_scale, 1.0);
  if (es.eigenvalues().minCoeff() < floor) {
    cov.diagonal().array() += 1e-6 * var_scale;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es2(cov, Eigen::EigenvaluesOnly);
    if (es2.eigenvalues().minCoeff() <= 0.0) {
      throw std::runtime_error("fit_gmm: covariance collapsed and cannot be regularized");
    }
  }
}

// Best one-to-one component -> state map by overlap with the labels.
std::array<int, 3> assign_by_labels(const Eigen::Matrix3d& counts) {
  std::array<int, 3> perm{0, 1, 2};
  std::array<int, 3> best = perm;
  double best_score = -1.0;
  std::sort(perm.begin(), perm.end());
  do {
    double score = 0.0;
    for (int c = 0; c < 3; ++c) score += counts(c, perm[c]);
    if (score > best_score) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

GaussianMixture fit_gmm(const std::vector<IQShot>& shots, std::mt19937_64& rng,
                        const GmmOptions& opts) {
  const int n = static_cast<int>(shots.size());
  if (n < 30 * kComponents) {
    throw std::invalid_argument("fit_gmm: need at least 30 shots per expected cluster");
  }
  const double var_scale = data_variance(shots);

  // Farthest-point seeding.
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<Eigen::Vector2d> centers;
  centers.push_back({shots[pick(rng)].i, shots[pick(rng)].q});
  while (centers.size() < kComponents) {
    double best_dist = -1.0;
    Eigen::Vector2d best_point = centers[0];
    for (const auto& s : shots) {
      const Eigen::Vector2d x(s.i, s.q);
      double min_dist = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) min_dist = std::min(min_dist, (x - c).squaredNorm());
      if (min_dist > best_dist) {
        best_dist = min_dist;
        best_point = x;
      }
    }
    centers.push_back(best_point);
  }

  GaussianMixture gmm;
  Eigen::Matrix2d init_cov = Eigen::Matrix2d::Identity() * std::max(var_scale / 6.0, 1e-12);
  for (int c = 0; c < kComponents; ++c) {
    gmm.components[c].weight = 1.0 / kComponents;
    gmm.components[c].mean = centers[c];
    gmm.components[c].cov = init_cov;
  }

  Eigen::MatrixXd resp(n, kComponents);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    // E step with log-sum-exp.
    double ll = 0.0;
    for (int s = 0; s < n; ++s) {
      const Eigen::Vector2d x(shots[s].i, shots[s].q);
      Eigen::Vector3d logp;
      for (int c = 0; c < kComponents; ++c) {
        logp[c] = std::log(gmm.components[c].weight) + log_gaussian_2d(x, gmm.components[c]);
      }
      const double mx = logp.maxCoeff();
      const double lse = mx + std::log((logp.array() - mx).exp().sum());
      ll += lse;
      for (int c = 0; c < kComponents; ++c) resp(s, c) = std::exp(logp[c] - lse);
    }
    gmm.log_likelihood = ll;
    gmm.iterations = iter + 1;
    if (iter > 0 && std::abs(ll - prev_ll) < opts.rel_tolerance * std::abs(prev_ll)) break;
    prev_ll = ll;

    // M step.
    for (int c = 0; c < kComponents; ++c) {
      const double nk = resp.col(c).sum();
      if (nk <= 0.0) throw std::runtime_error("fit_gmm: empty component");
      Eigen::Vector2d mean = Eigen::Vector2d::Zero();
      for (int s = 0; s < n; ++s) mean += resp(s, c) * Eigen::Vector2d(shots[s].i, shots[s].q);
      mean /= nk;
      Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
      for (int s = 0; s < n; ++s) {
        const Eigen::Vector2d d = Eigen::Vector2d(shots[s].i, shots[s].q) - mean;
        cov += resp(s, c) * d * d.transpose();
      }
      cov /= nk;
      regularize_if_collapsed(cov, var_scale);
      gmm.components[c].weight = nk / n;
      gmm.components[c].mean = mean;
      gmm.components[c].cov = cov;
    }
  }

  // Component-to-state assignment.
  const bool labeled = std::any_of(shots.begin(), shots.end(),
                                   [](const IQShot& s) { return s.label >= 0; });
  if (labeled) {
    Eigen::Matrix3d counts = Eigen::Matrix3d::Zero();
    for (int s = 0; s < n; ++s) {
      if (shots[s].label < 0 || shots[s].label > 2) continue;
      int c_best = 0;
      resp.row(s).maxCoeff(&c_best);
      counts(c_best, shots[s].label) += 1.0;
    }
    gmm.state_of_component = assign_by_labels(counts);
  } else {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return gmm.components[a].mean.x() < gmm.components[b].mean.x();
    });
    for (int rank = 0; rank < 3; ++rank) gmm.state_of_component[order[rank]] = rank;
  }
  return gmm;
}

Eigen::Vector3d classify(const GaussianMixture& gmm, const IQShot& shot) {
  const Eigen::Vector2d x(shot.i, shot.q);
  Eigen::Vector3d logp;
  for (int c = 0; c < kComponents; ++c) {
    logp[c] = std::log(gmm.components[c].weight) + log_gaussian_2d(x, gmm.components[c]);
  }
  const double mx = logp.maxCoeff();
  Eigen::Vector3d resp = (logp.array() - mx).exp();
  resp /= resp.sum();
  Eigen::Vector3d by_state = Eigen::Vector3d::Zero();
  for (int c = 0; c < kComponents; ++c) by_state[gmm.state_of_component[c]] += resp[c];
  return by_state;
}

void ConfusionMatrix::validate() const {
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 3; ++col) {
      if (c(r, col) < 0.0 || c(r, col) > 1.0) {
        throw std::invalid_argument("ConfusionMatrix: entries must be in [0, 1]");
      }
    }
  }
  for (int col = 0; col < 3; ++col) {
    if (std::abs(c.col(col).sum() - 1.0) > 1e-12) {
      throw std::invalid_argument("ConfusionMatrix: columns must sum to 1");
    }
  }
}

double ConfusionMatrix::condition_number() const {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(c);
  const auto& sv = svd.singularValues();
  return sv(0) / sv(2);
}

ConfusionMatrix build_confusion(const GaussianMixture& gmm, const std::vector<IQShot>& shots) {
  Eigen::Matrix3d sums = Eigen::Matrix3d::Zero();
  Eigen::Vector3d counts = Eigen::Vector3d::Zero();
  for (const auto& s : shots) {
    if (s.label < 0 || s.label > 2) continue;
    sums.col(s.label) += classify(gmm, s);
    counts[s.label] += 1.0;
  }
  for (int j = 0; j < 3; ++j) {
    if (counts[j] == 0.0) {
      throw std::invalid_argument("build_confusion: missing prepared-state label " +
                                  std::to_string(j));
    }
    sums.col(j) /= counts[j];
  }
  return {sums};
}

Eigen::Vector3d mitigate(const ConfusionMatrix& confusion, const Eigen::Vector3d& measured,
                         bool clamp_to_simplex) {
  if (confusion.condition_number() > 1e6) {
    throw std::runtime_error("mitigate: confusion matrix is too ill-conditioned (cond > 1e6)");
  }
  Eigen::Vector3d result = confusion.c.fullPivLu().solve(measured);
  if (clamp_to_simplex) {
    result = result.cwiseMax(0.0);
    const double sum = result.sum();
    if (sum > 0.0) result /= sum;
  }
  return result;
}

Eigen::Vector3d average_shots(const Eigen::Matrix<double, Eigen::Dynamic, 3>& per_shot_pops) {
  if (per_shot_pops.rows() < 1) {
    throw std::invalid_argument("average_shots: need at least one shot");
  }
  return per_shot_pops.colwise().mean().transpose();
}

}  // namespace qchar
