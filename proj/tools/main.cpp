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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quditchar/bayes.hpp"
#include "quditchar/config.hpp"
#include "quditchar/fit.hpp"
#include "quditchar/io.hpp"
#include "quditchar/readout.hpp"
#include "quditchar/units.hpp"

namespace fs = std::filesystem;
using namespace qchar;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitUsage = 64;

const char* kUsage =
    "usage: quditchar <subcommand> [options]\n"
    "\n"
    "subcommands:\n"
    "  simulate   emit noiseless model population series for a config\n"
    "  synth      generate noisy synthetic data\n"
    "  fit        deterministic box-constrained least-squares fit\n"
    "  sample     MH-within-Gibbs posterior chain over the frequencies\n"
    "  summarize  re-summarize an existing chain file\n"
    "  mitigate   GMM readout classification and confusion-matrix inversion\n"
    "  fft        amplitude spectrum of a population series\n"
    "\n"
    "run 'quditchar <subcommand> --help' for the options of one subcommand.\n";

// Returns an exit code when parsing ended the command (help or a bad
// flag); flag errors map to the config-error exit code.
std::optional<int> try_parse(CLI::App& app, std::vector<std::string>& args) {
  try {
    app.parse(args);
    return std::nullopt;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
}

fs::path default_outdir() {
  if (const char* env = std::getenv("QUDITCHAR_OUT_DIR")) return fs::path(env);
  return fs::path(".");
}

std::vector<ExperimentData> synth_from_config(const RunConfig& cfg,
                                              std::optional<std::uint64_t> seed,
                                              std::optional<double> sigma_override,
                                              bool noiseless) {
  std::vector<double> sigma;
  sigma.reserve(cfg.protocols.size());
  for (const auto& proto : cfg.protocols) {
    double s = noiseless ? 0.0
               : sigma_override ? *sigma_override
                                : cfg.synth.sigma_for(proto.kind);
    sigma.push_back(s);
  }
  std::mt19937_64 rng(seed.value_or(cfg.synth.seed));
  return generate_synthetic(cfg.device, cfg.protocols, sigma, rng);
}

std::vector<ExperimentData> load_or_synth(const RunConfig& cfg,
                                          const std::vector<std::string>& data_files,
                                          std::optional<std::uint64_t> seed) {
  if (data_files.empty()) return synth_from_config(cfg, seed, std::nullopt, false);
  std::vector<ExperimentData> data;
  data.reserve(data_files.size());
  for (const auto& f : data_files) data.push_back(read_experiment_csv(f));
  return data;
}

const ExperimentData& find_kind(const std::vector<ExperimentData>& data, ProtocolKind kind) {
  for (const auto& d : data) {
    if (d.kind == kind) return d;
  }
  throw ConfigError("no data series of kind '" + to_string(kind) + "'");
}

void write_fit_json(const FitResult& res, const fs::path& path) {
  nlohmann::json j;
  j["omega01_ghz"] = units::rad_us_to_ghz(res.theta_hat[0]);
  j["omega12_bar_ghz"] = units::rad_us_to_ghz(res.theta_hat[1]);
  j["eps12_khz"] = units::rad_us_to_khz(res.theta_hat[2]);
  j["omega12_plus_ghz"] = units::rad_us_to_ghz(res.device.omega12_plus());
  j["omega12_minus_ghz"] = units::rad_us_to_ghz(res.device.omega12_minus());
  j["gamma1_1_per_us"] = res.theta_hat[3];
  j["gamma1_2_per_us"] = res.theta_hat[4];
  j["gamma2_1_per_us"] = res.theta_hat[5];
  j["gamma2_2_per_us"] = res.theta_hat[6];
  j["t1_1_us"] = 1.0 / res.theta_hat[3];
  j["t1_2_us"] = 1.0 / res.theta_hat[4];
  j["t2_1_us"] = 2.0 / res.theta_hat[5];
  const double d21 = std::sqrt(res.theta_hat[6]) - std::sqrt(res.theta_hat[5]);
  j["t2_2_us"] = 2.0 / (d21 * d21);
  j["objective"] = res.objective_value;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["residual_norms"] = res.residual_norms;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

void print_fit_table(const FitResult& res) {
  std::printf("parameter        value\n");
  std::printf("omega01          %.6f GHz\n", units::rad_us_to_ghz(res.theta_hat[0]));
  std::printf("omega12_bar      %.6f GHz\n", units::rad_us_to_ghz(res.theta_hat[1]));
  std::printf("omega12_plus     %.6f GHz\n", units::rad_us_to_ghz(res.device.omega12_plus()));
  std::printf("omega12_minus    %.6f GHz\n", units::rad_us_to_ghz(res.device.omega12_minus()));
  std::printf("eps12            %.3f kHz\n", units::rad_us_to_khz(res.theta_hat[2]));
  std::printf("T1,1             %.2f us\n", 1.0 / res.theta_hat[3]);
  std::printf("T1,2             %.2f us\n", 1.0 / res.theta_hat[4]);
  std::printf("T2,1             %.2f us\n", 2.0 / res.theta_hat[5]);
  const double d21 = std::sqrt(res.theta_hat[6]) - std::sqrt(res.theta_hat[5]);
  std::printf("T2,2             %.2f us\n", 2.0 / (d21 * d21));
  std::printf("objective        %.6e\n", res.objective_value);
}

int cmd_simulate_or_synth(const std::string& name, std::vector<std::string> args) {
  CLI::App app{name == "simulate" ? "Emit noiseless model series" : "Generate noisy data"};
  std::string config_file, out_file, experiment;
  std::string outdir = default_outdir().string();
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma_override;
  app.add_option("--config", config_file, "run config (JSON)")->required();
  app.add_option("--out", out_file, "output CSV (requires --experiment)");
  app.add_option("--outdir", outdir, "output directory for per-experiment files");
  app.add_option("--experiment", experiment, "protocol kind (ramsey01|ramsey12|decay1|decay2)");
  if (name == "synth") {
    app.add_option("--seed", seed, "RNG seed override");
    app.add_option("--sigma", sigma_override, "noise S.D. override for every experiment");
  }
  if (auto rc = try_parse(app, args)) return *rc;

  const RunConfig cfg = load_run_config(config_file);
  auto data = synth_from_config(cfg, seed, sigma_override, name == "simulate");
  if (!experiment.empty()) {
    const auto& d = find_kind(data, protocol_kind_from_string(experiment));
    const fs::path path = out_file.empty() ? fs::path(outdir) / (experiment + ".csv")
                                           : fs::path(out_file);
    write_experiment_csv(d, path);
    std::cout << path.string() << "\n";
    return kExitOk;
  }
  if (!out_file.empty()) {
    throw ConfigError("--out needs --experiment; use --outdir for all series");
  }
  for (const auto& d : data) {
    const fs::path path = fs::path(outdir) / (to_string(d.kind) + ".csv");
    write_experiment_csv(d, path);
    std::cout << path.string() << "\n";
  }
  return kExitOk;
}

int cmd_fit(std::vector<std::string> args) {
  CLI::App app{"Deterministic box-constrained fit"};
  std::string config_file, out_file;
  std::vector<std::string> data_files;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_file, "run config (JSON)")->required();
  app.add_option("--data", data_files, "experiment CSV files (default: synthesize)");
  app.add_option("--out", out_file, "fit result JSON");
  app.add_option("--seed", seed, "RNG seed override for synthesized data");
  if (auto rc = try_parse(app, args)) return *rc;

  const RunConfig cfg = load_run_config(config_file);
  auto data = load_or_synth(cfg, data_files, seed);
  FitProblem problem;
  problem.data = data;
  problem.bounds = cfg.fit.bounds;
  problem.init = cfg.fit.init ? *cfg.fit.init : initialize_from_fft(data, cfg.fit.bounds);
  const FitResult res = fit(problem, cfg.fit.options);
  print_fit_table(res);
  const fs::path path =
      out_file.empty() ? default_outdir() / "fit_result.json" : fs::path(out_file);
  write_fit_json(res, path);
  return kExitOk;
}

int cmd_sample(std::vector<std::string> args) {
  CLI::App app{"MH-within-Gibbs posterior sampling"};
  std::string config_file, out_file;
  std::string outdir = default_outdir().string();
  std::vector<std::string> data_files;
  std::optional<std::uint64_t> seed;
  int draws = 0;
  app.add_option("--config", config_file, "run config (JSON)")->required();
  app.add_option("--data", data_files, "Ramsey CSV files (default: synthesize)");
  app.add_option("--out", out_file, "chain CSV");
  app.add_option("--outdir", outdir, "directory for summary and histograms");
  app.add_option("--seed", seed, "chain RNG seed override");
  app.add_option("--draws", draws, "posterior-predictive draws to emit");
  if (auto rc = try_parse(app, args)) return *rc;

  const RunConfig cfg = load_run_config(config_file);
  auto data = load_or_synth(cfg, data_files, std::nullopt);
  const auto& r01 = find_kind(data, ProtocolKind::Ramsey01);
  const auto& r12 = find_kind(data, ProtocolKind::Ramsey12);

  RamseyLikelihood lik(cfg.device, r01, r12);
  const FreqVector centers{cfg.device.omega01, cfg.device.omega12_plus(),
                           cfg.device.omega12_minus()};
  const double half = cfg.bayes.prior_half_width > 0.0 ? cfg.bayes.prior_half_width
                                                       : units::khz_to_rad_us(500.0);
  PriorSpec prior = PriorSpec::around(centers, half);
  prior.gamma_shape = cfg.bayes.gamma_shape;
  prior.gamma_rate = cfg.bayes.gamma_rate;
  SamplerConfig sc = cfg.bayes.sampler;
  if (seed) sc.rng_seed = *seed;

  const Chain chain = run_chain(lik, prior, sc, centers, TauVector{1.0, 1.0});
  const PosteriorSummary summary = summarize(chain);

  const fs::path chain_path =
      out_file.empty() ? fs::path(outdir) / "chain.csv" : fs::path(out_file);
  write_chain_csv(chain, chain_path);
  write_summary_json(summary, chain.acceptance_rate, fs::path(outdir) / "summary.json");

  const char* names[3] = {"omega01", "omega12_plus", "omega12_minus"};
  for (int i = 0; i < 3; ++i) {
    std::vector<double> ghz;
    ghz.reserve(chain.theta.size());
    for (const auto& t : chain.theta) ghz.push_back(units::rad_us_to_ghz(t[i]));
    write_histogram_csv(make_histogram(ghz, 50),
                        fs::path(outdir) / ("hist_" + std::string(names[i]) + ".csv"));
  }

  if (draws > 0) {
    std::mt19937_64 rng(sc.rng_seed + 1);
    const auto pred = posterior_predictive(chain, draws, lik, rng);
    for (size_t d = 0; d < pred.size(); ++d) {
      write_experiment_csv(ExperimentData::from_series(pred[d].first, r01.drive),
                           fs::path(outdir) / ("predictive_ramsey01_" + std::to_string(d) +
                                               ".csv"));
      write_experiment_csv(ExperimentData::from_series(pred[d].second, r12.drive),
                           fs::path(outdir) / ("predictive_ramsey12_" + std::to_string(d) +
                                               ".csv"));
    }
  }

  for (int i = 0; i < 3; ++i) {
    std::printf("%-14s mean %.6f GHz, sd %.3f kHz, range %.3f kHz\n", names[i],
                summary.mean_ghz(i), summary.sd_khz(i), summary.range_khz(i));
  }
  std::printf("acceptance     %.3f\n", chain.acceptance_rate);
  return kExitOk;
}

int cmd_summarize(std::vector<std::string> args) {
  CLI::App app{"Summarize an existing chain"};
  std::string chain_file, out_file;
  app.add_option("--chain", chain_file, "chain CSV")->required();
  app.add_option("--out", out_file, "summary JSON");
  if (auto rc = try_parse(app, args)) return *rc;

  const Chain chain = read_chain_csv(chain_file);
  const PosteriorSummary summary = summarize(chain);
  const fs::path path =
      out_file.empty() ? default_outdir() / "summary.json" : fs::path(out_file);
  write_summary_json(summary, chain.acceptance_rate, path);
  const char* names[3] = {"omega01", "omega12_plus", "omega12_minus"};
  for (int i = 0; i < 3; ++i) {
    std::printf("%-14s mean %.6f GHz, sd %.3f kHz, range %.3f kHz\n", names[i],
                summary.mean_ghz(i), summary.sd_khz(i), summary.range_khz(i));
  }
  return kExitOk;
}

int cmd_mitigate(std::vector<std::string> args) {
  CLI::App app{"Readout mitigation pipeline"};
  std::string train_file, apply_file, out_file;
  std::uint64_t seed = 0;
  app.add_option("--train", train_file, "labeled IQ shots CSV")->required();
  app.add_option("--apply", apply_file, "unlabeled IQ shots CSV to mitigate");
  app.add_option("--out", out_file, "confusion matrix JSON");
  app.add_option("--seed", seed, "GMM seeding RNG seed");
  if (auto rc = try_parse(app, args)) return *rc;

  const IQShotFile train = read_shots_csv(train_file);
  if (train.labels.empty()) throw ConfigError("--train shots must carry labels");
  std::vector<IQShot> shots(train.i.size());
  for (size_t s = 0; s < shots.size(); ++s) {
    shots[s] = {train.i[s], train.q[s], train.labels[s]};
  }
  std::mt19937_64 rng(seed);
  const GaussianMixture gmm = fit_gmm(shots, rng);
  const ConfusionMatrix confusion = build_confusion(gmm, shots);
  const fs::path path =
      out_file.empty() ? default_outdir() / "confusion.json" : fs::path(out_file);
  write_matrix3_json(confusion.c, "confusion", path);
  std::cout << "confusion matrix written to " << path.string() << "\n";

  if (!apply_file.empty()) {
    const IQShotFile raw = read_shots_csv(apply_file);
    Eigen::Matrix<double, Eigen::Dynamic, 3> pops(raw.i.size(), 3);
    for (size_t s = 0; s < raw.i.size(); ++s) {
      pops.row(s) = classify(gmm, {raw.i[s], raw.q[s], -1}).transpose();
    }
    const Eigen::Vector3d measured = average_shots(pops);
    const Eigen::Vector3d mitigated = mitigate(confusion, measured);
    std::printf("measured   %.6f %.6f %.6f\n", measured[0], measured[1], measured[2]);
    std::printf("mitigated  %.6f %.6f %.6f\n", mitigated[0], mitigated[1], mitigated[2]);
  }
  return kExitOk;
}

int cmd_fft(std::vector<std::string> args) {
  CLI::App app{"Amplitude spectrum of a population series"};
  std::string data_file, out_file;
  int row = -1;
  app.add_option("--data", data_file, "experiment CSV")->required();
  app.add_option("--row", row, "population row 0..2 (default: fringe row)");
  app.add_option("--out", out_file, "spectrum CSV");
  if (auto rc = try_parse(app, args)) return *rc;

  const ExperimentData d = read_experiment_csv(data_file);
  if (row < 0) row = is_ramsey(d.kind) ? prepared_level(d.kind) + 1 : prepared_level(d.kind);
  if (row > 2) throw ConfigError("--row must be 0..2");
  PopulationSeries series{d.kind, d.times, d.pops};
  const auto [freqs, mags] = fft_amplitude_spectrum(series, row);
  const fs::path path =
      out_file.empty() ? default_outdir() / "spectrum.csv" : fs::path(out_file);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "'");
  out << "freq_mhz,magnitude\n";
  out.precision(17);
  for (size_t m = 0; m < freqs.size(); ++m) out << freqs[m] << "," << mags[m] << "\n";
  std::cout << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return kExitUsage;
  }
  const std::string cmd = argv[1];
  if (cmd == "--help" || cmd == "-h" || cmd == "help") {
    std::cout << kUsage;
    return kExitOk;
  }
  const std::vector<std::string> known{"simulate", "synth",    "fit", "sample",
                                       "summarize", "mitigate", "fft"};
  if (std::find(known.begin(), known.end(), cmd) == known.end()) {
    std::cerr << "unknown subcommand '" << cmd << "'\n" << kUsage;
    return kExitUsage;
  }
  // app.parse(vector) expects the arguments reversed, argv[0] removed.
  std::vector<std::string> args(argv + 2, argv + argc);
  std::reverse(args.begin(), args.end());
  try {
    if (cmd == "simulate" || cmd == "synth") return cmd_simulate_or_synth(cmd, args);
    if (cmd == "fit") return cmd_fit(args);
    if (cmd == "sample") return cmd_sample(args);
    if (cmd == "summarize") return cmd_summarize(args);
    if (cmd == "mitigate") return cmd_mitigate(args);
    return cmd_fft(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
