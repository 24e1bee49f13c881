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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "quditchar/io.hpp"

using namespace qchar;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("quditchar_io_" + name);
}

std::vector<ProtocolConfig> all_protocols() {
  return {ProtocolConfig::ramsey01(oracles::drive01()),
          ProtocolConfig::ramsey12(oracles::drive12()), ProtocolConfig::decay1(),
          ProtocolConfig::decay2()};
}

}  // namespace

TEST_SUITE_BEGIN("test_io");

TEST_CASE("experiment CSV round trip") {
  std::mt19937_64 rng(3);
  const auto data =
      generate_synthetic(oracles::table_device(), all_protocols(), {0.01, 0.02, 0.0, 0.03}, rng);
  REQUIRE(data.size() == 4);
  for (const auto& d : data) {
    const auto path = temp_file("roundtrip.csv");
    write_experiment_csv(d, path);
    const auto back = read_experiment_csv(path);
    CHECK(back.kind == d.kind);
    CHECK(back.dt == d.dt);
    CHECK(back.drive == d.drive);
    CHECK(back.sigma == d.sigma);
    CHECK(back.provenance == d.provenance);
    REQUIRE(back.n_samples() == d.n_samples());
    CHECK((back.pops - d.pops).cwiseAbs().maxCoeff() == 0.0);
    for (int j = 0; j < d.n_samples(); ++j) CHECK(back.times[j] == d.times[j]);
  }
}

TEST_CASE("experiment validation") {
  std::mt19937_64 rng(4);
  auto data = generate_synthetic(oracles::table_device(), {ProtocolConfig::decay1(0.08, 10)},
                                 {0.0}, rng);
  auto& d = data[0];
  CHECK_NOTHROW(d.validate());

  auto warped = d;
  warped.times[5] += 1e-3;
  CHECK_THROWS_AS(warped.validate(), std::invalid_argument);

  auto truncated = d;
  truncated.times.pop_back();
  CHECK_THROWS_AS(truncated.validate(), std::invalid_argument);

  SUBCASE("unknown metadata key is rejected") {
    const auto path = temp_file("unknown_key.csv");
    write_experiment_csv(d, path);
    std::ofstream app(path, std::ios::app);
    app << "# mystery=1\n";
    app.close();
    CHECK_THROWS_AS(read_experiment_csv(path), std::runtime_error);
  }
}

TEST_CASE("synthetic generation") {
  SUBCASE("zero noise reproduces the model exactly") {
    std::mt19937_64 rng(9);
    const DeviceParams p = oracles::table_device();
    const auto cfgs = all_protocols();
    const auto data = generate_synthetic(p, cfgs, {0.0, 0.0, 0.0, 0.0}, rng);
    const auto model01 = simulate_ramsey_parity_averaged(p, cfgs[0]);
    CHECK((data[0].pops - model01.pops).cwiseAbs().maxCoeff() == 0.0);
    const auto model_d2 = simulate_decay(p, cfgs[3]);
    CHECK((data[3].pops - model_d2.pops).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("default grids") {
    std::mt19937_64 rng(9);
    const auto data =
        generate_synthetic(oracles::table_device(), all_protocols(), {0, 0, 0, 0}, rng);
    CHECK(data[0].dt == 0.020);
    CHECK(data[0].n_steps() == 250);
    CHECK(data[2].dt == 0.080);
    CHECK(data[2].n_steps() == 500);
  }

  SUBCASE("noise standard deviation matches the requested sigma") {
    const DeviceParams p = oracles::table_device();
    const auto cfg = ProtocolConfig::decay1(0.08, 2);
    const auto model = simulate_decay(p, cfg);
    std::mt19937_64 rng(123);
    double sum = 0.0, sum2 = 0.0;
    const int n = 1000;
    for (int trial = 0; trial < n; ++trial) {
      const auto data = generate_synthetic(p, {cfg}, {0.02}, rng);
      const double eps = data[0].pops(1, 1) - model.pops(1, 1);
      sum += eps;
      sum2 += eps * eps;
    }
    const double var = (sum2 - sum * sum / n) / (n - 1);
    CHECK(std::abs(std::sqrt(var) - 0.02) < 0.05 * 0.02);
  }

  SUBCASE("values are not clamped to [0, 1]") {
    std::mt19937_64 rng(5);
    const auto data = generate_synthetic(oracles::table_device(),
                                         {ProtocolConfig::decay1()}, {0.3}, rng);
    CHECK((data[0].pops.minCoeff() < 0.0 || data[0].pops.maxCoeff() > 1.0));
  }

  SUBCASE("negative sigma is rejected") {
    std::mt19937_64 rng(5);
    CHECK_THROWS_AS(generate_synthetic(oracles::table_device(),
                                       {ProtocolConfig::decay1()}, {-0.1}, rng),
                    std::invalid_argument);
  }

  SUBCASE("seeded generation is reproducible") {
    std::mt19937_64 rng_a(77), rng_b(77);
    const auto a = generate_synthetic(oracles::table_device(), all_protocols(),
                                      {0.02, 0.02, 0.02, 0.02}, rng_a);
    const auto b = generate_synthetic(oracles::table_device(), all_protocols(),
                                      {0.02, 0.02, 0.02, 0.02}, rng_b);
    for (size_t e = 0; e < a.size(); ++e) {
      CHECK((a[e].pops - b[e].pops).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("histogram") {
  const std::vector<double> values{0.0, 0.1, 0.2, 0.35, 0.5, 0.99, 1.0};
  const auto h = make_histogram(values, 4);
  REQUIRE(h.edges.size() == 5);
  REQUIRE(h.counts.size() == 4);
  long total = 0;
  for (long c : h.counts) total += c;
  CHECK(total == static_cast<long>(values.size()));
  CHECK(h.edges.front() == 0.0);
  CHECK(h.edges.back() == 1.0);
  CHECK(h.counts[3] == 2);  // 0.99 and the inclusive top edge

  const auto path = temp_file("hist.csv");
  write_histogram_csv(h, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "bin_lo,bin_hi,count");
}

TEST_CASE("IQ shot CSV round trip") {
  IQShotFile f;
  f.i = {0.5, -1.25, 3.0};
  f.q = {0.25, 0.75, -2.0};
  f.labels = {0, 2, 1};
  const auto path = temp_file("shots.csv");
  write_shots_csv(f, path);
  const auto back = read_shots_csv(path);
  REQUIRE(back.i.size() == 3);
  for (int s = 0; s < 3; ++s) {
    CHECK(back.i[s] == f.i[s]);
    CHECK(back.q[s] == f.q[s]);
    CHECK(back.labels[s] == f.labels[s]);
  }

  IQShotFile unlabeled;
  unlabeled.i = {1.0, 2.0};
  unlabeled.q = {3.0, 4.0};
  write_shots_csv(unlabeled, path);
  const auto back2 = read_shots_csv(path);
  CHECK(back2.labels.empty());
  CHECK(back2.i[1] == 2.0);
}

TEST_CASE("3x3 matrix JSON round trip") {
  Eigen::Matrix3d m;
  m << 0.997125, 0.002625, 0.000250, 0.016750, 0.981250, 0.002000, 0.006125, 0.043375,
      0.950500;
  const auto path = temp_file("matrix.json");
  write_matrix3_json(m, "confusion", path);
  const auto back = read_matrix3_json("confusion", path);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS(read_matrix3_json("other_key", path));
}

TEST_SUITE_END();
