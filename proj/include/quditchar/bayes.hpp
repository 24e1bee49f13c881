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
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "quditchar/io.hpp"

namespace qchar {

// Sampled parameter vector: (omega01, omega12_plus, omega12_minus), rad/us.
using FreqVector = std::array<double, 3>;
// Precision hyper-parameters, one per Ramsey experiment.
using TauVector = std::array<double, 2>;

struct PriorSpec {
  std::array<std::pair<double, double>, 3> freq_supports{};  // (l_i, u_i), rad/us
  std::array<double, 2> gamma_shape{0.01, 0.01};             // alpha_k
  std::array<double, 2> gamma_rate{0.01, 0.01};              // beta_k

  void validate() const;
  bool in_support(const FreqVector& theta) const;

  /// +/- half_width around the given branch frequencies.
  static PriorSpec around(const FreqVector& centers, double half_width);
};

struct SamplerConfig {
  int n_iter = 10000;
  double burn_in_fraction = 0.5;
  int thinning = 2;
  FreqVector proposal_support{};  // r, rad/us
  std::uint64_t rng_seed = 0;

  void validate() const;

  static SamplerConfig defaults(std::uint64_t seed = 0);  // r = 8 kHz per coordinate
};

struct Chain {
  std::vector<FreqVector> theta;      // retained samples
  std::vector<TauVector> tau;
  std::vector<std::uint8_t> accepted; // per retained iteration
  double acceptance_rate = 0.0;       // over post-burn-in proposals
};

struct ParameterSummary {
  double mean = 0.0;   // rad/us
  double sd = 0.0;     // rad/us, denominator M-1
  double range = 0.0;  // max - min, rad/us
};

struct PosteriorSummary {
  std::array<ParameterSummary, 3> params;

  double mean_ghz(int i) const;
  double sd_khz(int i) const;
  double range_khz(int i) const;
};

/// Gaussian likelihood over the two Ramsey experiments with the
/// decoherence rates frozen at a point estimate. The likelihood sums
/// dark times from j=1 by default; theta supplies the branch
/// frequencies directly (omega12_bar and eps12 are recovered as their
/// half-sum and half-difference).
class RamseyLikelihood {
 public:
  RamseyLikelihood(DeviceParams point_estimate, ExperimentData ramsey01,
                   ExperimentData ramsey12, bool include_j0 = false);

  /// Sum of squared residuals per experiment k = 0, 1.
  std::array<double, 2> ssr(const FreqVector& theta) const;

  /// log Pr(D | theta, tau) up to an additive constant:
  /// sum_k (3 N_T / 2) log tau_k - (tau_k / 2) SSR_k. Throws for tau <= 0.
  double log_likelihood(const FreqVector& theta, const TauVector& tau) const;

  /// Number of dark times entering each per-experiment sum.
  int n_t() const { return n_t_; }

  const ExperimentData& data(int k) const { return k == 0 ? ramsey01_ : ramsey12_; }
  DeviceParams device_at(const FreqVector& theta) const;

 private:
  DeviceParams point_estimate_;
  ExperimentData ramsey01_;
  ExperimentData ramsey12_;
  bool include_j0_;
  int n_t_;
};

/// Conjugate Gamma posterior parameters given SSR values:
/// alpha*_k = alpha_k + 3 N_T / 2, beta*_k = beta_k + SSR_k / 2.
std::array<std::pair<double, double>, 2> gamma_posterior_params(
    const std::array<double, 2>& ssr, int n_t, const PriorSpec& prior);

/// Draws tau_k ~ Gamma(alpha*_k, beta*_k) (shape-rate).
TauVector sample_tau_given_ssr(const std::array<double, 2>& ssr, int n_t,
                               const PriorSpec& prior, std::mt19937_64& rng);

/// Gibbs update for the precision hyper-parameters at fixed theta.
TauVector gibbs_update_tau(const FreqVector& theta, const RamseyLikelihood& lik,
                           const PriorSpec& prior, std::mt19937_64& rng);

/// log of the Metropolis acceptance probability for a symmetric proposal,
/// clamped at 0 (i.e. log min{1, exp(delta)}).
double log_acceptance(double log_post_proposed, double log_post_current);

struct MhStepResult {
  FreqVector theta{};
  bool accepted = false;
};

/// One Metropolis-Hastings move with the componentwise uniform
/// random-walk proposal of half-width r/2. Proposals outside the prior
/// support are rejected without a likelihood evaluation.
MhStepResult mh_step(const FreqVector& theta, const TauVector& tau,
                     const RamseyLikelihood& lik, const PriorSpec& prior,
                     const FreqVector& r, std::mt19937_64& rng);

/// Alternates the Gibbs tau-update with the MH theta-update, discards
/// burn-in, thins, and records the post-burn-in acceptance rate.
/// Deterministic given cfg.rng_seed.
Chain run_chain(const RamseyLikelihood& lik, const PriorSpec& prior,
                const SamplerConfig& cfg, const FreqVector& theta0, const TauVector& tau0);

PosteriorSummary summarize(const Chain& chain);

/// Simulates both Ramsey experiments at n_draws parameter values sampled
/// uniformly without replacement from the retained chain.
std::vector<std::pair<PopulationSeries, PopulationSeries>> posterior_predictive(
    const Chain& chain, int n_draws, const RamseyLikelihood& lik, std::mt19937_64& rng);

void write_chain_csv(const Chain& chain, const std::filesystem::path& path);
Chain read_chain_csv(const std::filesystem::path& path);
void write_summary_json(const PosteriorSummary& summary, double acceptance_rate,
                        const std::filesystem::path& path);

}  // namespace qchar
