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

#include <doctest.h>

#include <cmath>
#include <random>

#include "quditchar/readout.hpp"

using namespace qchar;

namespace {

// The deterministic confusion-matrix point used across the mitigation
// tests (columns sum to 1: column j is the response to prepared |j>).
Eigen::Matrix3d reference_confusion() {
  Eigen::Matrix3d rows;
  rows << 0.997125, 0.002625, 0.000250,
          0.016750, 0.981250, 0.002000,
          0.006125, 0.043375, 0.950500;
  return rows.transpose();
}

std::vector<IQShot> clustered_shots(std::mt19937_64& rng, int per_class,
                                    double sd = 0.3, bool labeled = true) {
  const double mx[3] = {0.0, 5.0, 2.5};
  const double my[3] = {0.0, 0.0, 4.0};
  std::normal_distribution<double> noise(0.0, sd);
  std::vector<IQShot> shots;
  for (int c = 0; c < 3; ++c) {
    for (int s = 0; s < per_class; ++s) {
      shots.push_back({mx[c] + noise(rng), my[c] + noise(rng), labeled ? c : -1});
    }
  }
  return shots;
}

GaussianMixture manual_mixture() {
  GaussianMixture gmm;
  gmm.components[0] = {0.25, {0.0, 0.0}, 0.04 * Eigen::Matrix2d::Identity()};
  gmm.components[1] = {0.25, {4.0, 0.0}, 0.04 * Eigen::Matrix2d::Identity()};
  gmm.components[2] = {0.50, {2.0, 8.0}, 0.04 * Eigen::Matrix2d::Identity()};
  gmm.state_of_component = {0, 1, 2};
  return gmm;
}

}  // namespace

TEST_SUITE_BEGIN("test_readout");

TEST_CASE("mixture fitting") {
  std::mt19937_64 rng(31);
  const auto shots = clustered_shots(rng, 600);
  const GaussianMixture gmm = fit_gmm(shots, rng);

  SUBCASE("recovers the cluster geometry") {
    const double mx[3] = {0.0, 5.0, 2.5};
    const double my[3] = {0.0, 0.0, 4.0};
    for (int c = 0; c < 3; ++c) {
      // Find the component mapped to state c.
      int comp = -1;
      for (int k = 0; k < 3; ++k) {
        if (gmm.state_of_component[k] == c) comp = k;
      }
      REQUIRE(comp >= 0);
      const auto& g = gmm.components[comp];
      CHECK(std::abs(g.mean[0] - mx[c]) < 0.05);
      CHECK(std::abs(g.mean[1] - my[c]) < 0.05);
      CHECK(g.weight == doctest::Approx(1.0 / 3.0).epsilon(0.05));
      // Covariance close to the isotropic 0.09 I used to draw the shots.
      CHECK(g.cov(0, 0) == doctest::Approx(0.09).epsilon(0.15));
      CHECK(g.cov(1, 1) == doctest::Approx(0.09).epsilon(0.15));
      CHECK(std::abs(g.cov(0, 1)) < 0.02);
    }
  }

  SUBCASE("unlabeled shots are ordered by mean I") {
    std::mt19937_64 rng2(32);
    const auto unlabeled = clustered_shots(rng2, 400, 0.3, false);
    const GaussianMixture g2 = fit_gmm(unlabeled, rng2);
    double mean_i[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
      mean_i[g2.state_of_component[k]] = g2.components[k].mean[0];
    }
    CHECK(mean_i[0] < mean_i[1]);
    CHECK(mean_i[1] < mean_i[2]);
  }

  SUBCASE("log-likelihood is monotone over EM iterations") {
    double prev = -std::numeric_limits<double>::infinity();
    for (int iters = 1; iters <= 12; ++iters) {
      std::mt19937_64 fresh(55);
      GmmOptions opts;
      opts.max_iterations = iters;
      const GaussianMixture g = fit_gmm(shots, fresh, opts);
      CHECK(g.log_likelihood >= prev - 1e-9);
      prev = g.log_likelihood;
    }
  }

  SUBCASE("seeded fits are reproducible") {
    std::mt19937_64 a(77), b(77);
    const GaussianMixture ga = fit_gmm(shots, a);
    const GaussianMixture gb = fit_gmm(shots, b);
    for (int k = 0; k < 3; ++k) {
      CHECK(ga.components[k].mean == gb.components[k].mean);
      CHECK(ga.components[k].cov == gb.components[k].cov);
      CHECK(ga.components[k].weight == gb.components[k].weight);
    }
    CHECK(ga.log_likelihood == gb.log_likelihood);
  }

  SUBCASE("a degenerate cluster is regularized, not fatal") {
    std::mt19937_64 rng3(33);
    auto degenerate = clustered_shots(rng3, 200);
    // Replace class 2 by coincident points: its sample covariance is
    // exactly singular until the regularization kicks in.
    for (auto& s : degenerate) {
      if (s.label == 2) {
        s.i = 2.5;
        s.q = 4.0;
      }
    }
    const GaussianMixture g = fit_gmm(degenerate, rng3);
    for (int k = 0; k < 3; ++k) {
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(g.components[k].cov);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }

  SUBCASE("too few shots are rejected") {
    std::mt19937_64 rng4(34);
    const auto tiny = clustered_shots(rng4, 20);
    CHECK_THROWS_AS(fit_gmm(tiny, rng4), std::invalid_argument);
  }
}

TEST_CASE("classification") {
  const GaussianMixture gmm = manual_mixture();

  SUBCASE("posteriors form a simplex vector") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> pos(-2.0, 10.0);
    for (int s = 0; s < 50; ++s) {
      const Eigen::Vector3d p = classify(gmm, {pos(rng), pos(rng), -1});
      CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(p.minCoeff() >= 0.0);
    }
  }

  SUBCASE("a shot at a well-separated mean is near-certain") {
    const Eigen::Vector3d p = classify(gmm, {2.0, 8.0, -1});
    CHECK(p[2] > 0.999);
  }

  SUBCASE("equidistant between equal components splits evenly") {
    const Eigen::Vector3d p = classify(gmm, {2.0, 0.0, -1});
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-9));
  }

  SUBCASE("coincident components share the posterior by weight") {
    GaussianMixture twin = manual_mixture();
    twin.components[1] = twin.components[0];  // same mean and covariance
    const Eigen::Vector3d p = classify(twin, {0.0, 0.0, -1});
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("confusion matrix") {
  SUBCASE("well-separated clusters give a near-identity matrix") {
    std::mt19937_64 rng(51);
    const auto shots = clustered_shots(rng, 500);
    const GaussianMixture gmm = fit_gmm(shots, rng);
    const ConfusionMatrix cm = build_confusion(gmm, shots);
    CHECK_NOTHROW(cm.validate());
    for (int j = 0; j < 3; ++j) {
      CHECK(cm.c.col(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(cm.c(j, j) > 0.99);
    }
    CHECK(cm.condition_number() < 1.1);
  }

  SUBCASE("missing label class is rejected") {
    std::mt19937_64 rng(52);
    auto shots = clustered_shots(rng, 500);
    const GaussianMixture gmm = fit_gmm(shots, rng);
    for (auto& s : shots) {
      if (s.label == 1) s.label = 0;
    }
    CHECK_THROWS_AS(build_confusion(gmm, shots), std::invalid_argument);
  }

  SUBCASE("validation rejects malformed matrices") {
    ConfusionMatrix cm;
    cm.c = reference_confusion();
    CHECK_NOTHROW(cm.validate());

    ConfusionMatrix bad_sum = cm;
    bad_sum.c(0, 0) += 0.01;
    CHECK_THROWS_AS(bad_sum.validate(), std::invalid_argument);

    ConfusionMatrix negative = cm;
    negative.c(0, 1) = -0.002625;
    negative.c(1, 1) += 2 * 0.002625;
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
  }
}

TEST_CASE("mitigation") {
  ConfusionMatrix cm;
  cm.c = reference_confusion();

  SUBCASE("inversion undoes the confusion map exactly") {
    const Eigen::Vector3d basis(1.0, 0.0, 0.0);
    const Eigen::Vector3d mixed(0.2, 0.5, 0.3);
    for (const auto& p_true : {basis, mixed}) {
      const Eigen::Vector3d measured = cm.c * p_true;
      const Eigen::Vector3d recovered = mitigate(cm, measured);
      CHECK((recovered - p_true).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  SUBCASE("identity confusion is a no-op") {
    ConfusionMatrix id;
    const Eigen::Vector3d v(0.1, 0.3, 0.6);
    CHECK((mitigate(id, v) - v).cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("out-of-simplex results can be clamped") {
    // Raw inversion of a vector outside the image of the simplex leaves
    // the simplex; the clamped variant projects back.
    const Eigen::Vector3d measured(1.0, 0.0, 0.0);
    const Eigen::Vector3d raw = mitigate(cm, measured);
    CHECK(raw.minCoeff() < 0.0);
    const Eigen::Vector3d clamped = mitigate(cm, measured, true);
    CHECK(clamped.minCoeff() >= 0.0);
    CHECK(clamped.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("ill-conditioned matrices are refused") {
    ConfusionMatrix flat;
    flat.c.setConstant(1.0 / 3.0);
    CHECK_NOTHROW(flat.validate());
    CHECK_THROWS_AS(mitigate(flat, Eigen::Vector3d(0.4, 0.3, 0.3)), std::runtime_error);
  }

  SUBCASE("mitigating averages equals averaging mitigated shots") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::Matrix<double, Eigen::Dynamic, 3> per_shot(40, 3);
    for (int s = 0; s < 40; ++s) {
      Eigen::Vector3d p(unit(rng), unit(rng), unit(rng));
      per_shot.row(s) = (p / p.sum()).transpose();
    }
    const Eigen::Vector3d avg_then_mitigate = mitigate(cm, average_shots(per_shot));
    Eigen::Vector3d mitigate_then_avg = Eigen::Vector3d::Zero();
    for (int s = 0; s < 40; ++s) {
      mitigate_then_avg += mitigate(cm, per_shot.row(s).transpose());
    }
    mitigate_then_avg /= 40.0;
    CHECK((avg_then_mitigate - mitigate_then_avg).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("shot averaging") {
  SUBCASE("single shot passes through") {
    Eigen::Matrix<double, Eigen::Dynamic, 3> one(1, 3);
    one << 0.2, 0.3, 0.5;
    const Eigen::Vector3d avg = average_shots(one);
    CHECK(avg[0] == 0.2);
    CHECK(avg[2] == 0.5);
  }

  SUBCASE("identical shots average to themselves") {
    Eigen::Matrix<double, Eigen::Dynamic, 3> many(100, 3);
    for (int s = 0; s < 100; ++s) many.row(s) << 0.25, 0.25, 0.5;
    const Eigen::Vector3d avg = average_shots(many);
    CHECK(avg[1] == doctest::Approx(0.25).epsilon(1e-15));
  }

  SUBCASE("averaging error shrinks like the square root of the count") {
    std::mt19937_64 rng(71);
    std::bernoulli_distribution coin(0.3);
    auto mean_err = [&](int n, int trials) {
      double acc = 0.0;
      for (int t = 0; t < trials; ++t) {
        Eigen::Matrix<double, Eigen::Dynamic, 3> shots(n, 3);
        for (int s = 0; s < n; ++s) {
          const bool one = coin(rng);
          shots.row(s) << (one ? 0.0 : 1.0), (one ? 1.0 : 0.0), 0.0;
        }
        acc += std::abs(average_shots(shots)[1] - 0.3);
      }
      return acc / trials;
    };
    const double err_small = mean_err(100, 200);
    const double err_large = mean_err(6400, 200);
    // An 64x sample increase should shrink the error by about 8x.
    CHECK(err_small / err_large > 4.0);
    CHECK(err_small / err_large < 16.0);
  }

  SUBCASE("empty input is rejected") {
    Eigen::Matrix<double, Eigen::Dynamic, 3> none(0, 3);
    CHECK_THROWS_AS(average_shots(none), std::invalid_argument);
  }
}

TEST_SUITE_END();
