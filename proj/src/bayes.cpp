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

#include "quditchar/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "quditchar/units.hpp"

namespace qchar {

void PriorSpec::validate() const {
  for (const auto& [lo, hi] : freq_supports) {
    if (!(lo < hi)) throw std::invalid_argument("PriorSpec: support must have l < u");
  }
  for (int k = 0; k < 2; ++k) {
    if (!(gamma_shape[k] > 0.0) || !(gamma_rate[k] > 0.0)) {
      throw std::invalid_argument("PriorSpec: Gamma shape/rate must be positive");
    }
  }
}

bool PriorSpec::in_support(const FreqVector& theta) const {
  for (int i = 0; i < 3; ++i) {
    if (theta[i] < freq_supports[i].first || theta[i] > freq_supports[i].second) return false;
  }
  return true;
}

PriorSpec PriorSpec::around(const FreqVector& centers, double half_width) {
  if (!(half_width > 0.0)) throw std::invalid_argument("PriorSpec::around: bad half width");
  PriorSpec prior;
  for (int i = 0; i < 3; ++i) {
    prior.freq_supports[i] = {centers[i] - half_width, centers[i] + half_width};
  }
  return prior;
}

void SamplerConfig::validate() const {
  if (n_iter < 1) throw std::invalid_argument("SamplerConfig: n_iter must be >= 1");
  if (burn_in_fraction < 0.0 || burn_in_fraction >= 1.0) {
    throw std::invalid_argument("SamplerConfig: burn_in_fraction must be in [0, 1)");
  }
  if (thinning < 1) throw std::invalid_argument("SamplerConfig: thinning must be >= 1");
  for (double r : proposal_support) {
    if (!(r > 0.0)) throw std::invalid_argument("SamplerConfig: proposal support must be > 0");
  }
}

SamplerConfig SamplerConfig::defaults(std::uint64_t seed) {
  SamplerConfig cfg;
  const double r = units::khz_to_rad_us(8.0);
  cfg.proposal_support = {r, r, r};
  cfg.rng_seed = seed;
  return cfg;
}

RamseyLikelihood::RamseyLikelihood(DeviceParams point_estimate, ExperimentData ramsey01,
                                   ExperimentData ramsey12, bool include_j0)
    : point_estimate_(point_estimate),
      ramsey01_(std::move(ramsey01)),
      ramsey12_(std::move(ramsey12)),
      include_j0_(include_j0) {
  point_estimate_.validate();
  ramsey01_.validate();
  ramsey12_.validate();
  if (ramsey01_.kind != ProtocolKind::Ramsey01 || ramsey12_.kind != ProtocolKind::Ramsey12) {
    throw std::invalid_argument("RamseyLikelihood: wrong experiment kinds");
  }
  if (ramsey01_.n_steps() != ramsey12_.n_steps()) {
    throw std::invalid_argument("RamseyLikelihood: the two Ramsey grids must share N_T");
  }
  n_t_ = include_j0_ ? ramsey01_.n_samples() : ramsey01_.n_steps();
}

DeviceParams RamseyLikelihood::device_at(const FreqVector& theta) const {
  DeviceParams p = point_estimate_;
  p.omega01 = theta[0];
  p.omega12_bar = 0.5 * (theta[1] + theta[2]);
  // The parity-averaged model is symmetric in the dispersion sign, so a
  // sampler crossing omega+ < omega- stays well defined.
  p.eps12 = 0.5 * std::abs(theta[1] - theta[2]);
  p.validate();
  return p;
}

std::array<double, 2> RamseyLikelihood::ssr(const FreqVector& theta) const {
  const DeviceParams p = device_at(theta);
  std::array<double, 2> out{};
  for (int k = 0; k < 2; ++k) {
    const ExperimentData& d = data(k);
    // The 0<->1 branches coincide (no dispersion on omega01), so one
    // branch suffices there.
    const PopulationSeries s = (k == 0)
        ? simulate_ramsey_branch(p, d.protocol(), +1)
        : simulate_ramsey_parity_averaged(p, d.protocol());
    const int j0 = include_j0_ ? 0 : 1;
    double ssr_k = 0.0;
    for (int j = j0; j < d.n_samples(); ++j) {
      for (int n = 0; n < 3; ++n) {
        const double r = d.pops(n, j) - s.pops(n, j);
        ssr_k += r * r;
      }
    }
    out[k] = ssr_k;
  }
  return out;
}

double RamseyLikelihood::log_likelihood(const FreqVector& theta, const TauVector& tau) const {
  for (double t : tau) {
    if (!(t > 0.0)) throw std::domain_error("log_likelihood: tau must be positive");
  }
  const auto ssr_k = ssr(theta);
  double ll = 0.0;
  for (int k = 0; k < 2; ++k) {
    ll += 1.5 * n_t_ * std::log(tau[k]) - 0.5 * tau[k] * ssr_k[k];
  }
  return ll;
}

std::array<std::pair<double, double>, 2> gamma_posterior_params(
    const std::array<double, 2>& ssr, int n_t, const PriorSpec& prior) {
  prior.validate();
  std::array<std::pair<double, double>, 2> out;
  for (int k = 0; k < 2; ++k) {
    out[k] = {prior.gamma_shape[k] + 1.5 * n_t, prior.gamma_rate[k] + 0.5 * ssr[k]};
  }
  return out;
}

TauVector sample_tau_given_ssr(const std::array<double, 2>& ssr, int n_t,
                               const PriorSpec& prior, std::mt19937_64& rng) {
  const auto params = gamma_posterior_params(ssr, n_t, prior);
  TauVector tau{};
  for (int k = 0; k < 2; ++k) {
    const auto [shape, rate] = params[k];
    std::gamma_distribution<double> gamma(shape, 1.0 / rate);
    tau[k] = gamma(rng);
  }
  return tau;
}

TauVector gibbs_update_tau(const FreqVector& theta, const RamseyLikelihood& lik,
                           const PriorSpec& prior, std::mt19937_64& rng) {
  return sample_tau_given_ssr(lik.ssr(theta), lik.n_t(), prior, rng);
}

double log_acceptance(double log_post_proposed, double log_post_current) {
  return std::min(0.0, log_post_proposed - log_post_current);
}

namespace {

FreqVector propose_uniform(const FreqVector& theta, const FreqVector& r,
                           std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FreqVector proposed{};
  for (int i = 0; i < 3; ++i) {
    proposed[i] = theta[i] + r[i] * (unit(rng) - 0.5);
  }
  return proposed;
}

}  // namespace

MhStepResult mh_step(const FreqVector& theta, const TauVector& tau,
                     const RamseyLikelihood& lik, const PriorSpec& prior,
                     const FreqVector& r, std::mt19937_64& rng) {
  const FreqVector proposed = propose_uniform(theta, r, rng);
  if (!prior.in_support(proposed)) {
    return {theta, false};  // zero prior mass, always rejected
  }
  const double log_gamma =
      log_acceptance(lik.log_likelihood(proposed, tau), lik.log_likelihood(theta, tau));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (std::log(unit(rng)) <= log_gamma) {
    return {proposed, true};
  }
  return {theta, false};
}

Chain run_chain(const RamseyLikelihood& lik, const PriorSpec& prior,
                const SamplerConfig& cfg, const FreqVector& theta0, const TauVector& tau0) {
  prior.validate();
  cfg.validate();
  if (!prior.in_support(theta0)) {
    throw std::invalid_argument("run_chain: theta0 must lie in the prior support");
  }
  for (double t : tau0) {
    if (!(t > 0.0)) throw std::invalid_argument("run_chain: tau0 must be positive");
  }

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  FreqVector theta = theta0;
  std::array<double, 2> ssr_cur = lik.ssr(theta);
  for (double s : ssr_cur) {
    if (!std::isfinite(s)) throw std::runtime_error("run_chain: non-finite SSR at theta0");
  }

  const int burn = static_cast<int>(cfg.burn_in_fraction * cfg.n_iter);
  Chain chain;
  long accepted_post_burn = 0;
  long proposals_post_burn = 0;

  for (int m = 0; m < cfg.n_iter; ++m) {
    const TauVector tau = sample_tau_given_ssr(ssr_cur, lik.n_t(), prior, rng);

    bool accepted = false;
    const FreqVector proposed = propose_uniform(theta, cfg.proposal_support, rng);
    if (prior.in_support(proposed)) {
      const auto ssr_prop = lik.ssr(proposed);
      double delta = 0.0;
      for (int k = 0; k < 2; ++k) delta += 0.5 * tau[k] * (ssr_cur[k] - ssr_prop[k]);
      if (!std::isfinite(delta)) {
        throw std::runtime_error("run_chain: non-finite likelihood at iteration " +
                                 std::to_string(m));
      }
      if (std::log(unit(rng)) <= log_acceptance(delta, 0.0)) {
        theta = proposed;
        ssr_cur = ssr_prop;
        accepted = true;
      }
    }

    if (m >= burn) {
      ++proposals_post_burn;
      accepted_post_burn += accepted ? 1 : 0;
      if ((m - burn) % cfg.thinning == cfg.thinning - 1) {
        chain.theta.push_back(theta);
        chain.tau.push_back(tau);
        chain.accepted.push_back(accepted ? 1 : 0);
      }
    }
  }
  chain.acceptance_rate =
      proposals_post_burn > 0 ? static_cast<double>(accepted_post_burn) / proposals_post_burn
                              : 0.0;
  return chain;
}

PosteriorSummary summarize(const Chain& chain) {
  const size_t m = chain.theta.size();
  if (m == 0) throw std::invalid_argument("summarize: empty chain");
  PosteriorSummary summary;
  for (int i = 0; i < 3; ++i) {
    double sum = 0.0, lo = chain.theta[0][i], hi = chain.theta[0][i];
    for (const auto& t : chain.theta) {
      sum += t[i];
      lo = std::min(lo, t[i]);
      hi = std::max(hi, t[i]);
    }
    const double mean = sum / static_cast<double>(m);
    double ss = 0.0;
    for (const auto& t : chain.theta) {
      const double d = t[i] - mean;
      ss += d * d;
    }
    summary.params[i].mean = mean;
    summary.params[i].sd = m > 1 ? std::sqrt(ss / static_cast<double>(m - 1)) : 0.0;
    summary.params[i].range = hi - lo;
  }
  return summary;
}

double PosteriorSummary::mean_ghz(int i) const { return units::rad_us_to_ghz(params[i].mean); }
double PosteriorSummary::sd_khz(int i) const { return units::rad_us_to_khz(params[i].sd); }
double PosteriorSummary::range_khz(int i) const { return units::rad_us_to_khz(params[i].range); }

std::vector<std::pair<PopulationSeries, PopulationSeries>> posterior_predictive(
    const Chain& chain, int n_draws, const RamseyLikelihood& lik, std::mt19937_64& rng) {
  if (n_draws < 0 || static_cast<size_t>(n_draws) > chain.theta.size()) {
    throw std::invalid_argument("posterior_predictive: n_draws exceeds chain length");
  }
  std::vector<size_t> indices(chain.theta.size());
  for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  std::vector<size_t> picked;
  std::sample(indices.begin(), indices.end(), std::back_inserter(picked),
              static_cast<size_t>(n_draws), rng);
  std::vector<std::pair<PopulationSeries, PopulationSeries>> out;
  out.reserve(picked.size());
  for (size_t idx : picked) {
    const DeviceParams p = lik.device_at(chain.theta[idx]);
    out.emplace_back(simulate_ramsey_branch(p, lik.data(0).protocol(), +1),
                     simulate_ramsey_parity_averaged(p, lik.data(1).protocol()));
  }
  return out;
}

void write_chain_csv(const Chain& chain, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << std::setprecision(17);
  out << "# acceptance_rate=" << chain.acceptance_rate << "\n";
  out << "m,omega01_ghz,omega12_plus_ghz,omega12_minus_ghz,tau0,tau1,accepted\n";
  for (size_t m = 0; m < chain.theta.size(); ++m) {
    out << m;
    for (int i = 0; i < 3; ++i) out << "," << units::rad_us_to_ghz(chain.theta[m][i]);
    out << "," << chain.tau[m][0] << "," << chain.tau[m][1] << ","
        << static_cast<int>(chain.accepted[m]) << "\n";
  }
}

Chain read_chain_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  Chain chain;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos && line.find("acceptance_rate") != std::string::npos) {
        chain.acceptance_rate = std::stod(line.substr(eq + 1));
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<double> vals;
    while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
    if (vals.size() != 7) throw std::runtime_error("bad chain row in " + path.string());
    chain.theta.push_back({units::ghz_to_rad_us(vals[1]), units::ghz_to_rad_us(vals[2]),
                           units::ghz_to_rad_us(vals[3])});
    chain.tau.push_back({vals[4], vals[5]});
    chain.accepted.push_back(vals[6] != 0.0 ? 1 : 0);
  }
  return chain;
}

void write_summary_json(const PosteriorSummary& summary, double acceptance_rate,
                        const std::filesystem::path& path) {
  static const char* kNames[3] = {"omega01", "omega12_plus", "omega12_minus"};
  nlohmann::json j;
  for (int i = 0; i < 3; ++i) {
    j["parameters"][kNames[i]] = {{"mean_ghz", summary.mean_ghz(i)},
                                  {"sd_khz", summary.sd_khz(i)},
                                  {"range_khz", summary.range_khz(i)}};
  }
  j["acceptance_rate"] = acceptance_rate;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace qchar
