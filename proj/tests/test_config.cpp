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

#include "quditchar/config.hpp"
#include "quditchar/units.hpp"

using namespace qchar;
namespace u = qchar::units;

namespace {

// Minimal valid document the error cases below mutate.
const char* kMinimal = R"({
  "device": {
    "omega01_ghz": 3.448646,
    "omega12_bar_ghz": 3.240254,
    "eps12_khz": 149.0,
    "t1_us": [258.39, 100.79],
    "t2_us": [38.44, 29.94]
  }
})";

}  // namespace

TEST_SUITE_BEGIN("test_config");

TEST_CASE("example config") {
  const RunConfig cfg = parse_run_config(example_config_json());

  SUBCASE("device values with unit conversion") {
    CHECK(cfg.device.omega01 == doctest::Approx(u::ghz_to_rad_us(3.448646)).epsilon(1e-15));
    CHECK(cfg.device.omega12_bar ==
          doctest::Approx(u::ghz_to_rad_us(3.240254)).epsilon(1e-15));
    CHECK(cfg.device.eps12 == doctest::Approx(u::khz_to_rad_us(149.0)).epsilon(1e-15));
    CHECK(cfg.device.gamma1[0] == doctest::Approx(1.0 / 258.39).epsilon(1e-12));
    CHECK(cfg.device.gamma2[0] == doctest::Approx(2.0 / 38.44).epsilon(1e-12));
    // Guard transition from the anharmonic extrapolation.
    CHECK(cfg.device.omega23 ==
          doctest::Approx(2.0 * cfg.device.omega12_bar - cfg.device.omega01).epsilon(1e-15));
  }

  SUBCASE("protocol grids") {
    REQUIRE(cfg.protocols.size() == 4);
    const ProtocolConfig& r01 = cfg.protocol(ProtocolKind::Ramsey01);
    CHECK(r01.dt == doctest::Approx(0.020).epsilon(1e-15));
    CHECK(r01.n_steps == 250);
    CHECK(r01.omega_d == doctest::Approx(u::ghz_to_rad_us(3.4476698)).epsilon(1e-15));
    const ProtocolConfig& d2 = cfg.protocol(ProtocolKind::Decay2);
    CHECK(d2.dt == doctest::Approx(0.080).epsilon(1e-15));
    CHECK(d2.n_steps == 500);
  }

  SUBCASE("synth and bayes sections") {
    CHECK(cfg.synth.sigma_for(ProtocolKind::Ramsey01) == 0.02);
    CHECK(cfg.synth.seed == 1);
    CHECK(cfg.bayes.prior_half_width ==
          doctest::Approx(u::khz_to_rad_us(500.0)).epsilon(1e-15));
    CHECK(cfg.bayes.sampler.n_iter == 10000);
    CHECK(cfg.bayes.sampler.thinning == 2);
    CHECK(cfg.bayes.sampler.proposal_support[1] ==
          doctest::Approx(u::khz_to_rad_us(8.0)).epsilon(1e-15));
  }

  SUBCASE("defaults for omitted sections") {
    const RunConfig minimal = parse_run_config(kMinimal);
    CHECK(minimal.protocols.empty());
    CHECK(minimal.synth.sigma_for(ProtocolKind::Decay1) == 0.0);
    CHECK(minimal.fit.bounds.contains(theta_from_device(minimal.device)));
    CHECK_FALSE(minimal.fit.init.has_value());
    CHECK(minimal.bayes.prior_half_width == 0.0);
    CHECK_FALSE(minimal.output_dir.has_value());
    CHECK_THROWS_AS(minimal.protocol(ProtocolKind::Ramsey01), ConfigError);
  }
}

TEST_CASE("device section rules") {
  SUBCASE("branch frequencies instead of bar and dispersion") {
    const RunConfig cfg = parse_run_config(R"({
      "device": {
        "omega01_ghz": 3.448646,
        "omega12_plus_ghz": 3.240403,
        "omega12_minus_ghz": 3.240105,
        "t1_us": [258.39, 100.79],
        "t2_us": [38.44, 29.94]
      }
    })");
    CHECK(u::rad_us_to_ghz(cfg.device.omega12_bar) == doctest::Approx(3.240254).epsilon(1e-12));
    CHECK(u::rad_us_to_khz(cfg.device.eps12) == doctest::Approx(149.0).epsilon(1e-9));
  }

  SUBCASE("mixing the two parameterizations is rejected") {
    CHECK_THROWS_AS(parse_run_config(R"({
      "device": {
        "omega01_ghz": 3.448646,
        "omega12_bar_ghz": 3.240254,
        "eps12_khz": 149.0,
        "omega12_plus_ghz": 3.240403,
        "omega12_minus_ghz": 3.240105,
        "t1_us": [258.39, 100.79],
        "t2_us": [38.44, 29.94]
      }
    })"),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({
      "device": {"omega01_ghz": 3.448646, "t1_us": [258.39, 100.79], "t2_us": [38.44, 29.94]}
    })"),
                    ConfigError);
  }

  SUBCASE("explicit guard frequency override") {
    const RunConfig cfg = parse_run_config(R"({
      "device": {
        "omega01_ghz": 3.448646,
        "omega12_bar_ghz": 3.240254,
        "eps12_khz": 149.0,
        "omega23_ghz": 3.1,
        "t1_us": [258.39, 100.79],
        "t2_us": [38.44, 29.94]
      }
    })");
    CHECK(u::rad_us_to_ghz(cfg.device.omega23) == doctest::Approx(3.1).epsilon(1e-12));
  }

  SUBCASE("invalid physical values surface as ConfigError") {
    CHECK_THROWS_AS(parse_run_config(R"({
      "device": {
        "omega01_ghz": 3.448646,
        "omega12_bar_ghz": 3.240254,
        "eps12_khz": 149.0,
        "t1_us": [-1.0, 100.79],
        "t2_us": [38.44, 29.94]
      }
    })"),
                    ConfigError);
  }
}

TEST_CASE("protocol section rules") {
  const std::string device = R"("device": {
    "omega01_ghz": 3.448646, "omega12_bar_ghz": 3.240254, "eps12_khz": 149.0,
    "t1_us": [258.39, 100.79], "t2_us": [38.44, 29.94]
  })";

  SUBCASE("drive is required for Ramsey and forbidden for decay") {
    CHECK_THROWS_AS(
        parse_run_config("{" + device + R"(, "protocols": [{"kind": "ramsey01"}]})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_run_config("{" + device +
                         R"(, "protocols": [{"kind": "decay1", "drive_ghz": 3.2}]})"),
        ConfigError);
    CHECK_NOTHROW(
        parse_run_config("{" + device + R"(, "protocols": [{"kind": "decay1"}]})"));
  }

  SUBCASE("grid validation runs before any simulation") {
    CHECK_THROWS_AS(
        parse_run_config("{" + device +
                         R"(, "protocols": [{"kind": "decay1", "dt_ns": -5.0}]})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_run_config("{" + device +
                         R"(, "protocols": [{"kind": "decay1", "n_steps": 0}]})"),
        ConfigError);
  }

  SUBCASE("unknown kinds are rejected") {
    CHECK_THROWS_AS(
        parse_run_config("{" + device + R"(, "protocols": [{"kind": "echo"}]})"),
        ConfigError);
  }
}

TEST_CASE("fit section") {
  const std::string device = R"("device": {
    "omega01_ghz": 3.448646, "omega12_bar_ghz": 3.240254, "eps12_khz": 149.0,
    "t1_us": [258.39, 100.79], "t2_us": [38.44, 29.94]
  })";

  SUBCASE("bounds and init are converted to internal units") {
    const RunConfig cfg = parse_run_config("{" + device + R"(, "fit": {
      "bounds": {
        "omega01_ghz": [3.4477, 3.4497],
        "omega12_bar_ghz": [3.2393, 3.2413],
        "eps12_khz": [15.0, 265.0],
        "gamma1_1_per_us": [0.00333, 0.1],
        "gamma1_2_per_us": [0.00333, 0.1],
        "gamma2_1_per_us": [0.00714, 10.0],
        "gamma2_2_per_us": [0.05, 0.5]
      },
      "init": {
        "omega01_ghz": 3.4487,
        "omega12_bar_ghz": 3.2403,
        "eps12_khz": 140.0,
        "gamma1_1_per_us": 0.004,
        "gamma1_2_per_us": 0.01,
        "gamma2_1_per_us": 0.05,
        "gamma2_2_per_us": 0.07
      },
      "barrier_stages": 4, "mu0_factor": 0.02, "mu_shrink": 0.2,
      "coarse_frequency_scan": false, "max_iterations": 150
    }})");
    CHECK(cfg.fit.bounds.lower[0] == doctest::Approx(u::ghz_to_rad_us(3.4477)).epsilon(1e-15));
    CHECK(cfg.fit.bounds.upper[2] == doctest::Approx(u::khz_to_rad_us(265.0)).epsilon(1e-15));
    CHECK(cfg.fit.bounds.upper[5] == 10.0);
    REQUIRE(cfg.fit.init.has_value());
    CHECK((*cfg.fit.init)[2] == doctest::Approx(u::khz_to_rad_us(140.0)).epsilon(1e-15));
    CHECK((*cfg.fit.init)[6] == 0.07);
    CHECK(cfg.fit.options.barrier_stages == 4);
    CHECK(cfg.fit.options.mu_shrink == 0.2);
    CHECK_FALSE(cfg.fit.options.coarse_frequency_scan);
    CHECK(cfg.fit.options.lbfgs.max_iterations == 150);
  }

  SUBCASE("inverted bounds are rejected") {
    CHECK_THROWS_AS(parse_run_config("{" + device + R"(, "fit": {"bounds": {
      "omega01_ghz": [3.4497, 3.4477],
      "omega12_bar_ghz": [3.2393, 3.2413],
      "eps12_khz": [15.0, 265.0],
      "gamma1_1_per_us": [0.00333, 0.1],
      "gamma1_2_per_us": [0.00333, 0.1],
      "gamma2_1_per_us": [0.00714, 10.0],
      "gamma2_2_per_us": [0.05, 0.5]
    }}})"),
                    ConfigError);
  }

  SUBCASE("schedule values out of range are rejected") {
    CHECK_THROWS_AS(parse_run_config("{" + device + R"(, "fit": {"mu_shrink": 1.5}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config("{" + device + R"(, "fit": {"barrier_stages": 0}})"),
                    ConfigError);
  }
}

TEST_CASE("unknown keys are rejected at every level") {
  const std::string device = R"("device": {
    "omega01_ghz": 3.448646, "omega12_bar_ghz": 3.240254, "eps12_khz": 149.0,
    "t1_us": [258.39, 100.79], "t2_us": [38.44, 29.94]
  })";

  CHECK_THROWS_AS(parse_run_config("{" + device + R"(, "extra": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({
    "device": {
      "omega01_ghz": 3.448646, "omega12_bar_ghz": 3.240254, "eps12_khz": 149.0,
      "t1_us": [258.39, 100.79], "t2_us": [38.44, 29.94], "color": "blue"
    }
  })"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_run_config("{" + device +
                       R"(, "protocols": [{"kind": "decay1", "shots": 100}]})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_run_config("{" + device + R"(, "synth": {"sigma": {"ramsey03": 0.1}}})"),
      ConfigError);
  CHECK_THROWS_AS(parse_run_config("{" + device + R"(, "fit": {"solver": "newton"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config("{" + device + R"(, "bayes": {"chains": 4}})"),
                  ConfigError);
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(parse_run_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{}"), ConfigError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/quditchar.json"), ConfigError);

  const std::string device = R"("device": {
    "omega01_ghz": 3.448646, "omega12_bar_ghz": 3.240254, "eps12_khz": 149.0,
    "t1_us": [258.39, 100.79], "t2_us": [38.44, 29.94]
  })";
  CHECK_THROWS_AS(parse_run_config("{" + device + R"(, "synth": {"seed": -3}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config("{" + device + R"(, "synth": {"sigma": {"decay1": -0.1}}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config("{" + device + R"(, "bayes": {"thinning": 0}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config("{" + device + R"(, "output_dir": 7})"), ConfigError);

  // ConfigError stays catchable through the standard hierarchy the CLI
  // exit-code mapping relies on.
  bool caught = false;
  try {
    parse_run_config("{}");
  } catch (const std::runtime_error&) {
    caught = true;
  }
  CHECK(caught);
}

TEST_SUITE_END();
