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

#include "quditchar/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "quditchar/units.hpp"

namespace qchar {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    if (allowed.count(item.key()) == 0) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  if (!obj.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return obj.at(key).get<double>();
}

double get_number_or(const json& obj, const std::string& where, const std::string& key,
                     double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return obj.at(key).get<double>();
}

std::array<double, 2> get_pair(const json& obj, const std::string& where,
                               const std::string& key) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(where + "." + key + ": expected [number, number]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

DeviceParams parse_device(const json& dev) {
  require_keys(dev, "device",
               {"omega01_ghz", "omega12_bar_ghz", "eps12_khz", "omega12_plus_ghz",
                "omega12_minus_ghz", "omega23_ghz", "t1_us", "t2_us"});
  const double omega01 = units::ghz_to_rad_us(get_number(dev, "device", "omega01_ghz"));
  double omega12_bar = 0.0;
  double eps12 = 0.0;
  const bool has_bar = dev.contains("omega12_bar_ghz") || dev.contains("eps12_khz");
  const bool has_branches =
      dev.contains("omega12_plus_ghz") || dev.contains("omega12_minus_ghz");
  if (has_bar == has_branches) {
    throw ConfigError(
        "device: give either omega12_bar_ghz + eps12_khz or "
        "omega12_plus_ghz + omega12_minus_ghz");
  }
  if (has_bar) {
    omega12_bar = units::ghz_to_rad_us(get_number(dev, "device", "omega12_bar_ghz"));
    eps12 = units::khz_to_rad_us(get_number(dev, "device", "eps12_khz"));
  } else {
    const double plus = units::ghz_to_rad_us(get_number(dev, "device", "omega12_plus_ghz"));
    const double minus = units::ghz_to_rad_us(get_number(dev, "device", "omega12_minus_ghz"));
    omega12_bar = 0.5 * (plus + minus);
    eps12 = 0.5 * (plus - minus);
  }
  const auto t1 = get_pair(dev, "device", "t1_us");
  const auto t2 = get_pair(dev, "device", "t2_us");
  try {
    DeviceParams p = DeviceParams::from_times(omega01, omega12_bar, eps12, t1[0], t1[1],
                                              t2[0], t2[1]);
    if (dev.contains("omega23_ghz")) {
      p.omega23 = units::ghz_to_rad_us(get_number(dev, "device", "omega23_ghz"));
    }
    p.validate();
    return p;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("device: ") + e.what());
  }
}

ProtocolConfig parse_protocol(const json& proto, int index) {
  const std::string where = "protocols[" + std::to_string(index) + "]";
  require_keys(proto, where, {"kind", "drive_ghz", "dt_ns", "n_steps"});
  if (!proto.contains("kind") || !proto.at("kind").is_string()) {
    throw ConfigError(where + ": missing string key 'kind'");
  }
  ProtocolConfig cfg;
  try {
    cfg.kind = protocol_kind_from_string(proto.at("kind").get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  const bool ramsey = is_ramsey(cfg.kind);
  if (ramsey != proto.contains("drive_ghz")) {
    throw ConfigError(where + ": drive_ghz is required for Ramsey kinds and "
                              "forbidden for decay kinds");
  }
  if (ramsey) cfg.omega_d = units::ghz_to_rad_us(get_number(proto, where, "drive_ghz"));
  cfg.dt = units::ns_to_us(get_number_or(proto, where, "dt_ns", ramsey ? 20.0 : 80.0));
  cfg.n_steps = static_cast<int>(get_number_or(proto, where, "n_steps", ramsey ? 250 : 500));
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return cfg;
}

SynthSection parse_synth(const json& synth) {
  require_keys(synth, "synth", {"sigma", "seed"});
  SynthSection out;
  if (synth.contains("sigma")) {
    const auto& s = synth.at("sigma");
    require_keys(s, "synth.sigma", {"ramsey01", "ramsey12", "decay1", "decay2"});
    for (const auto& item : s.items()) {
      if (!item.value().is_number() || item.value().get<double>() < 0.0) {
        throw ConfigError("synth.sigma." + item.key() + ": expected a number >= 0");
      }
      out.sigma[item.key()] = item.value().get<double>();
    }
  }
  if (synth.contains("seed")) {
    if (!synth.at("seed").is_number_unsigned()) {
      throw ConfigError("synth.seed: expected a non-negative integer");
    }
    out.seed = synth.at("seed").get<std::uint64_t>();
  }
  return out;
}

void read_theta(const json& obj, const std::string& where, ThetaVector& theta) {
  require_keys(obj, where,
               {"omega01_ghz", "omega12_bar_ghz", "eps12_khz", "gamma1_1_per_us",
                "gamma1_2_per_us", "gamma2_1_per_us", "gamma2_2_per_us"});
  theta[0] = units::ghz_to_rad_us(get_number(obj, where, "omega01_ghz"));
  theta[1] = units::ghz_to_rad_us(get_number(obj, where, "omega12_bar_ghz"));
  theta[2] = units::khz_to_rad_us(get_number(obj, where, "eps12_khz"));
  theta[3] = get_number(obj, where, "gamma1_1_per_us");
  theta[4] = get_number(obj, where, "gamma1_2_per_us");
  theta[5] = get_number(obj, where, "gamma2_1_per_us");
  theta[6] = get_number(obj, where, "gamma2_2_per_us");
}

ParameterBounds parse_bounds(const json& obj) {
  require_keys(obj, "fit.bounds",
               {"omega01_ghz", "omega12_bar_ghz", "eps12_khz", "gamma1_1_per_us",
                "gamma1_2_per_us", "gamma2_1_per_us", "gamma2_2_per_us"});
  ParameterBounds b;
  const char* keys[kNumFitParams] = {"omega01_ghz",    "omega12_bar_ghz", "eps12_khz",
                                     "gamma1_1_per_us", "gamma1_2_per_us", "gamma2_1_per_us",
                                     "gamma2_2_per_us"};
  for (int i = 0; i < kNumFitParams; ++i) {
    auto pair = get_pair(obj, "fit.bounds", keys[i]);
    if (i == 0 || i == 1) {
      pair = {units::ghz_to_rad_us(pair[0]), units::ghz_to_rad_us(pair[1])};
    } else if (i == 2) {
      pair = {units::khz_to_rad_us(pair[0]), units::khz_to_rad_us(pair[1])};
    }
    b.lower[i] = pair[0];
    b.upper[i] = pair[1];
  }
  try {
    b.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("fit.bounds: ") + e.what());
  }
  return b;
}

FitSection parse_fit(const json& fit) {
  require_keys(fit, "fit",
               {"bounds", "init", "barrier_stages", "mu0_factor", "mu_shrink",
                "coarse_frequency_scan", "max_iterations"});
  FitSection out;
  if (fit.contains("bounds")) out.bounds = parse_bounds(fit.at("bounds"));
  if (fit.contains("init")) {
    ThetaVector theta{};
    read_theta(fit.at("init"), "fit.init", theta);
    out.init = theta;
  }
  out.options.barrier_stages =
      static_cast<int>(get_number_or(fit, "fit", "barrier_stages", 6));
  out.options.mu0_factor = get_number_or(fit, "fit", "mu0_factor", 1e-2);
  out.options.mu_shrink = get_number_or(fit, "fit", "mu_shrink", 0.1);
  if (fit.contains("coarse_frequency_scan")) {
    if (!fit.at("coarse_frequency_scan").is_boolean()) {
      throw ConfigError("fit.coarse_frequency_scan: expected a boolean");
    }
    out.options.coarse_frequency_scan = fit.at("coarse_frequency_scan").get<bool>();
  }
  out.options.lbfgs.max_iterations = static_cast<int>(
      get_number_or(fit, "fit", "max_iterations", out.options.lbfgs.max_iterations));
  if (out.options.barrier_stages < 1 || out.options.mu0_factor <= 0.0 ||
      out.options.mu_shrink <= 0.0 || out.options.mu_shrink >= 1.0 ||
      out.options.lbfgs.max_iterations < 1) {
    throw ConfigError("fit: schedule values out of range");
  }
  return out;
}

BayesSection parse_bayes(const json& bayes) {
  require_keys(bayes, "bayes",
               {"prior_half_width_khz", "gamma_shape", "gamma_rate", "n_iter",
                "burn_in_fraction", "thinning", "proposal_khz", "seed"});
  BayesSection out;
  out.prior_half_width =
      units::khz_to_rad_us(get_number_or(bayes, "bayes", "prior_half_width_khz", 0.0));
  if (out.prior_half_width < 0.0) {
    throw ConfigError("bayes.prior_half_width_khz: expected >= 0");
  }
  if (bayes.contains("gamma_shape")) {
    out.gamma_shape = get_pair(bayes, "bayes", "gamma_shape");
  }
  if (bayes.contains("gamma_rate")) {
    out.gamma_rate = get_pair(bayes, "bayes", "gamma_rate");
  }
  out.sampler.n_iter =
      static_cast<int>(get_number_or(bayes, "bayes", "n_iter", out.sampler.n_iter));
  out.sampler.burn_in_fraction =
      get_number_or(bayes, "bayes", "burn_in_fraction", out.sampler.burn_in_fraction);
  out.sampler.thinning =
      static_cast<int>(get_number_or(bayes, "bayes", "thinning", out.sampler.thinning));
  const double r = units::khz_to_rad_us(get_number_or(bayes, "bayes", "proposal_khz", 8.0));
  out.sampler.proposal_support = {r, r, r};
  if (bayes.contains("seed")) {
    if (!bayes.at("seed").is_number_unsigned()) {
      throw ConfigError("bayes.seed: expected a non-negative integer");
    }
    out.sampler.rng_seed = bayes.at("seed").get<std::uint64_t>();
  }
  try {
    out.sampler.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bayes: ") + e.what());
  }
  return out;
}

}  // namespace

double SynthSection::sigma_for(ProtocolKind kind) const {
  const auto it = sigma.find(to_string(kind));
  return it == sigma.end() ? 0.0 : it->second;
}

const ProtocolConfig& RunConfig::protocol(ProtocolKind kind) const {
  for (const auto& cfg : protocols) {
    if (cfg.kind == kind) return cfg;
  }
  throw ConfigError("config: no protocol block of kind '" + to_string(kind) + "'");
}

RunConfig parse_run_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  require_keys(doc, "config",
               {"device", "protocols", "synth", "fit", "bayes", "output_dir"});
  if (!doc.contains("device")) throw ConfigError("config: missing 'device' section");

  RunConfig cfg;
  cfg.device = parse_device(doc.at("device"));
  if (doc.contains("protocols")) {
    if (!doc.at("protocols").is_array()) {
      throw ConfigError("protocols: expected an array");
    }
    int index = 0;
    for (const auto& proto : doc.at("protocols")) {
      cfg.protocols.push_back(parse_protocol(proto, index++));
    }
  }
  if (doc.contains("synth")) cfg.synth = parse_synth(doc.at("synth"));
  if (doc.contains("fit")) cfg.fit = parse_fit(doc.at("fit"));
  if (doc.contains("bayes")) cfg.bayes = parse_bayes(doc.at("bayes"));
  if (doc.contains("output_dir")) {
    if (!doc.at("output_dir").is_string()) {
      throw ConfigError("output_dir: expected a string");
    }
    cfg.output_dir = doc.at("output_dir").get<std::string>();
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string example_config_json() {
  return R"({
  "device": {
    "omega01_ghz": 3.448646,
    "omega12_bar_ghz": 3.240254,
    "eps12_khz": 149.0,
    "t1_us": [258.39, 100.79],
    "t2_us": [38.44, 29.94]
  },
  "protocols": [
    {"kind": "ramsey01", "drive_ghz": 3.4476698, "dt_ns": 20.0, "n_steps": 250},
    {"kind": "ramsey12", "drive_ghz": 3.2392576, "dt_ns": 20.0, "n_steps": 250},
    {"kind": "decay1", "dt_ns": 80.0, "n_steps": 500},
    {"kind": "decay2", "dt_ns": 80.0, "n_steps": 500}
  ],
  "synth": {
    "sigma": {"ramsey01": 0.02, "ramsey12": 0.02, "decay1": 0.02, "decay2": 0.02},
    "seed": 1
  },
  "fit": {"barrier_stages": 6, "coarse_frequency_scan": true},
  "bayes": {
    "prior_half_width_khz": 500.0,
    "n_iter": 10000,
    "burn_in_fraction": 0.5,
    "thinning": 2,
    "proposal_khz": 8.0,
    "seed": 0
  }
})";
}

}  // namespace qchar
