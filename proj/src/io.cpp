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

#include "quditchar/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qchar {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << std::setprecision(17);
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

void ExperimentData::validate() const {
  if (n_samples() < 2) throw std::invalid_argument("ExperimentData: too few samples");
  if (!(dt > 0.0)) throw std::invalid_argument("ExperimentData: dt must be > 0");
  if (pops.cols() != n_samples()) {
    throw std::invalid_argument("ExperimentData: population/time size mismatch");
  }
  for (int j = 0; j < n_samples(); ++j) {
    if (std::abs(times[j] - j * dt) > 1e-9 * std::max(1.0, times.back())) {
      throw std::invalid_argument("ExperimentData: non-uniform time grid");
    }
  }
  if (is_ramsey(kind) && !(drive > 0.0)) {
    throw std::invalid_argument("ExperimentData: Ramsey data needs a drive frequency");
  }
}

ProtocolConfig ExperimentData::protocol() const {
  ProtocolConfig cfg;
  cfg.kind = kind;
  cfg.omega_d = drive;
  cfg.dt = dt;
  cfg.n_steps = n_steps();
  return cfg;
}

ExperimentData ExperimentData::from_series(const PopulationSeries& s, double drive,
                                           const std::string& provenance, double sigma,
                                           int shots) {
  ExperimentData d;
  d.kind = s.kind;
  d.times = s.times;
  d.dt = s.times.size() > 1 ? s.times[1] - s.times[0] : 0.0;
  d.pops = s.pops;
  d.drive = drive;
  d.provenance = provenance;
  d.sigma = sigma;
  d.shots = shots;
  d.validate();
  return d;
}

void write_experiment_csv(const ExperimentData& d, const std::filesystem::path& path) {
  d.validate();
  auto out = open_out(path);
  out << "# kind=" << to_string(d.kind) << "\n";
  out << "# dt_us=" << d.dt << "\n";
  if (is_ramsey(d.kind)) out << "# drive_rad_us=" << d.drive << "\n";
  out << "# provenance=" << d.provenance << "\n";
  if (d.sigma > 0.0) out << "# sigma=" << d.sigma << "\n";
  if (d.shots > 0) out << "# shots=" << d.shots << "\n";
  out << "t_us,p0,p1,p2\n";
  for (int j = 0; j < d.n_samples(); ++j) {
    out << d.times[j] << "," << d.pops(0, j) << "," << d.pops(1, j) << ","
        << d.pops(2, j) << "\n";
  }
}

ExperimentData read_experiment_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  ExperimentData d;
  std::string line;
  std::vector<std::array<double, 4>> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string value = line.substr(eq + 1);
      if (key == "kind") d.kind = protocol_kind_from_string(value);
      else if (key == "dt_us") d.dt = std::stod(value);
      else if (key == "drive_rad_us") d.drive = std::stod(value);
      else if (key == "provenance") d.provenance = value;
      else if (key == "sigma") d.sigma = std::stod(value);
      else if (key == "shots") d.shots = std::stoi(value);
      else throw std::runtime_error("unknown metadata key in " + path.string() + ": " + key);
      continue;
    }
    if (!header_seen) {
      if (line != "t_us,p0,p1,p2") {
        throw std::runtime_error("bad column header in " + path.string());
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_csv(line);
    if (fields.size() != 4) throw std::runtime_error("bad data row in " + path.string());
    rows.push_back({std::stod(fields[0]), std::stod(fields[1]), std::stod(fields[2]),
                    std::stod(fields[3])});
  }
  d.times.resize(rows.size());
  d.pops.resize(3, static_cast<Eigen::Index>(rows.size()));
  for (size_t j = 0; j < rows.size(); ++j) {
    d.times[j] = rows[j][0];
    for (int n = 0; n < 3; ++n) d.pops(n, static_cast<Eigen::Index>(j)) = rows[j][n + 1];
  }
  d.validate();
  return d;
}

std::vector<ExperimentData> generate_synthetic(const DeviceParams& theta_true,
                                               const std::vector<ProtocolConfig>& cfgs,
                                               const std::vector<double>& sigma,
                                               std::mt19937_64& rng) {
  if (sigma.size() != cfgs.size()) {
    throw std::invalid_argument("generate_synthetic: one sigma per protocol required");
  }
  std::vector<ExperimentData> out;
  out.reserve(cfgs.size());
  for (size_t e = 0; e < cfgs.size(); ++e) {
    if (sigma[e] < 0.0) throw std::invalid_argument("generate_synthetic: sigma must be >= 0");
    PopulationSeries s = is_ramsey(cfgs[e].kind)
        ? simulate_ramsey_parity_averaged(theta_true, cfgs[e])
        : simulate_decay(theta_true, cfgs[e]);
    if (sigma[e] > 0.0) {
      std::normal_distribution<double> noise(0.0, sigma[e]);
      for (Eigen::Index j = 0; j < s.pops.cols(); ++j) {
        for (int n = 0; n < 3; ++n) s.pops(n, j) += noise(rng);
      }
    }
    out.push_back(ExperimentData::from_series(s, cfgs[e].omega_d, "synthetic", sigma[e]));
  }
  return out;
}

Histogram make_histogram(const std::vector<double>& values, int n_bins) {
  if (values.empty()) throw std::invalid_argument("make_histogram: empty input");
  if (n_bins < 1) throw std::invalid_argument("make_histogram: n_bins must be >= 1");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) hi = lo + 1.0;  // degenerate chain: single occupied bin
  Histogram h;
  h.edges.resize(n_bins + 1);
  h.counts.assign(n_bins, 0);
  const double width = (hi - lo) / n_bins;
  for (int b = 0; b <= n_bins; ++b) h.edges[b] = lo + b * width;
  for (double v : values) {
    int b = static_cast<int>((v - lo) / width);
    b = std::clamp(b, 0, n_bins - 1);
    ++h.counts[b];
  }
  return h;
}

void write_histogram_csv(const Histogram& h, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "bin_lo,bin_hi,count\n";
  for (size_t b = 0; b < h.counts.size(); ++b) {
    out << h.edges[b] << "," << h.edges[b + 1] << "," << h.counts[b] << "\n";
  }
}

IQShotFile read_shots_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  IQShotFile shots;
  std::string line;
  bool header_seen = false;
  bool labeled = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv(line);
    if (!header_seen) {
      if (fields.size() < 3 || fields[0] != "shot_index") {
        throw std::runtime_error("bad shot header in " + path.string());
      }
      labeled = fields.size() == 4;
      header_seen = true;
      continue;
    }
    if (fields.size() != (labeled ? 4u : 3u)) {
      throw std::runtime_error("bad shot row in " + path.string());
    }
    shots.i.push_back(std::stod(fields[1]));
    shots.q.push_back(std::stod(fields[2]));
    if (labeled) shots.labels.push_back(std::stoi(fields[3]));
  }
  return shots;
}

void write_shots_csv(const IQShotFile& shots, const std::filesystem::path& path) {
  auto out = open_out(path);
  const bool labeled = !shots.labels.empty();
  out << (labeled ? "shot_index,I,Q,label\n" : "shot_index,I,Q\n");
  for (size_t s = 0; s < shots.i.size(); ++s) {
    out << s << "," << shots.i[s] << "," << shots.q[s];
    if (labeled) out << "," << shots.labels[s];
    out << "\n";
  }
}

void write_matrix3_json(const Eigen::Matrix3d& m, const std::string& key,
                        const std::filesystem::path& path) {
  nlohmann::json j;
  for (int r = 0; r < 3; ++r) {
    j[key].push_back({m(r, 0), m(r, 1), m(r, 2)});
  }
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

Eigen::Matrix3d read_matrix3_json(const std::string& key, const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json j;
  in >> j;
  if (!j.contains(key)) throw std::runtime_error("missing key '" + key + "' in " + path.string());
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = j[key].at(r).at(c).get<double>();
  }
  return m;
}

}  // namespace qchar
