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

#include "quditchar/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "quditchar/units.hpp"

namespace qchar {

namespace {

// y-coordinates used by the optimizer and finite differences:
// frequencies as offsets in kHz, rates in log-space.
constexpr double kFreqScale = units::kTwoPi * 1e-3;  // 1 kHz in rad/us

bool is_frequency_param(int i) { return i < 3; }

// Which experiments an individual parameter can influence. Decay
// populations ignore dephasing, Ramsey 0<->1 never populates level 2,
// and level shifts common to a coherence pair cancel.
bool param_affects(int i, ProtocolKind kind) {
  switch (i) {
    case 0: return kind == ProtocolKind::Ramsey01;
    case 1:
    case 2: return kind == ProtocolKind::Ramsey12;
    case 3: return true;  // gamma1_1 feeds every protocol
    case 4: return kind == ProtocolKind::Ramsey12 || kind == ProtocolKind::Decay2;
    case 5: return kind == ProtocolKind::Ramsey01 || kind == ProtocolKind::Ramsey12;
    case 6: return kind == ProtocolKind::Ramsey12;
    default: throw std::logic_error("param_affects: bad index");
  }
}

double experiment_term(const ThetaVector& theta, const ExperimentData& d) {
  const PopulationSeries s = simulate_for_data(theta, d);
  double ssr = 0.0;
  for (int j = 0; j < d.n_samples(); ++j) {
    for (int n = 0; n < 3; ++n) {
      const double r = s.pops(n, j) - d.pops(n, j);
      ssr += r * r;
    }
  }
  return d.dt * ssr;
}

struct Scaling {
  ThetaVector center{};  // frequency offsets are taken from here

  Eigen::VectorXd to_y(const ThetaVector& theta) const {
    Eigen::VectorXd y(kNumFitParams);
    for (int i = 0; i < kNumFitParams; ++i) {
      y[i] = is_frequency_param(i) ? (theta[i] - center[i]) / kFreqScale
                                   : std::log(theta[i]);
    }
    return y;
  }

  ThetaVector to_theta(const Eigen::VectorXd& y) const {
    ThetaVector theta{};
    for (int i = 0; i < kNumFitParams; ++i) {
      theta[i] = is_frequency_param(i) ? center[i] + kFreqScale * y[i] : std::exp(y[i]);
    }
    return theta;
  }
};

double log_barrier(const ThetaVector& theta, const ParameterBounds& b) {
  double barrier = 0.0;
  for (int i = 0; i < kNumFitParams; ++i) {
    const double lo = theta[i] - b.lower[i];
    const double hi = b.upper[i] - theta[i];
    if (!(lo > 0.0) || !(hi > 0.0)) return std::numeric_limits<double>::infinity();
    barrier -= std::log(lo) + std::log(hi);
  }
  return barrier;
}

double clamp_interior(double x, double lo, double hi, double margin_frac = 0.02) {
  const double margin = margin_frac * (hi - lo);
  return std::clamp(x, lo + margin, hi - margin);
}

}  // namespace

DeviceParams device_from_theta(const ThetaVector& t) {
  DeviceParams p;
  p.omega01 = t[0];
  p.omega12_bar = t[1];
  p.eps12 = t[2];
  p.omega23 = 2.0 * t[1] - t[0];
  p.gamma1 = {t[3], t[4], t[4]};
  p.gamma2 = {t[5], t[6], t[6]};
  p.validate();
  return p;
}

ThetaVector theta_from_device(const DeviceParams& p) {
  return {p.omega01, p.omega12_bar, p.eps12, p.gamma1[0], p.gamma1[1], p.gamma2[0], p.gamma2[1]};
}

void ParameterBounds::validate() const {
  for (int i = 0; i < kNumFitParams; ++i) {
    if (!(lower[i] < upper[i])) {
      throw std::invalid_argument("ParameterBounds: lower must be < upper");
    }
  }
}

bool ParameterBounds::contains(const ThetaVector& theta) const {
  for (int i = 0; i < kNumFitParams; ++i) {
    if (theta[i] < lower[i] || theta[i] > upper[i]) return false;
  }
  return true;
}

bool ParameterBounds::strictly_interior(const ThetaVector& theta) const {
  for (int i = 0; i < kNumFitParams; ++i) {
    if (!(theta[i] > lower[i] && theta[i] < upper[i])) return false;
  }
  return true;
}

ParameterBounds ParameterBounds::defaults() {
  using units::ghz_to_rad_us;
  using units::khz_to_rad_us;
  ParameterBounds b;
  b.lower = {ghz_to_rad_us(3.4477), ghz_to_rad_us(3.2393), khz_to_rad_us(15.0),
             3.33e-3, 3.33e-3, 7.14e-3, 0.05};
  b.upper = {ghz_to_rad_us(3.4497), ghz_to_rad_us(3.2413), khz_to_rad_us(265.0),
             0.1, 0.1, 10.0, 0.5};
  return b;
}

PopulationSeries simulate_for_data(const ThetaVector& theta, const ExperimentData& d) {
  const DeviceParams p = device_from_theta(theta);
  const ProtocolConfig cfg = d.protocol();
  return is_ramsey(d.kind) ? simulate_ramsey_parity_averaged(p, cfg)
                           : simulate_decay(p, cfg);
}

std::vector<double> objective_terms(const ThetaVector& theta,
                                    const std::vector<ExperimentData>& data) {
  std::vector<double> terms;
  terms.reserve(data.size());
  for (const auto& d : data) terms.push_back(experiment_term(theta, d));
  return terms;
}

double objective(const ThetaVector& theta, const std::vector<ExperimentData>& data) {
  double j = 0.0;
  for (const auto& d : data) j += experiment_term(theta, d);
  return j;
}

ThetaVector objective_gradient(const ThetaVector& theta,
                               const std::vector<ExperimentData>& data) {
  ThetaVector grad{};
  for (int i = 0; i < kNumFitParams; ++i) {
    // Central difference in the rescaled coordinate, restricted to the
    // experiments this parameter can influence (the rest cancel exactly).
    // The step balances truncation against simulation roundoff: J varies
    // on a scale of hundreds of kHz (and order-one relative rate
    // changes), so 1e-4 keeps the truncation term far below the noise
    // floor of the propagated series.
    const double h = 1e-4;
    ThetaVector tp = theta;
    ThetaVector tm = theta;
    double dtheta_dy;
    if (is_frequency_param(i)) {
      tp[i] += kFreqScale * h;
      tm[i] -= kFreqScale * h;
      dtheta_dy = kFreqScale;
    } else {
      if (!(theta[i] > 0.0)) {
        throw std::invalid_argument("objective_gradient: rates must be positive");
      }
      tp[i] = theta[i] * std::exp(h);
      tm[i] = theta[i] * std::exp(-h);
      dtheta_dy = theta[i];
    }
    double diff = 0.0;
    for (const auto& d : data) {
      if (!param_affects(i, d.kind)) continue;
      diff += experiment_term(tp, d) - experiment_term(tm, d);
    }
    grad[i] = diff / (2.0 * h) / dtheta_dy;
  }
  return grad;
}

namespace {

// 1-D / 2-D grid refinement of the oscillatory frequency parameters.
// J has local minima roughly every 1/T_dark in each frequency, so the
// quasi-Newton stage needs a start inside the right basin.
ThetaVector coarse_frequency_scan(const ThetaVector& init, const ParameterBounds& b,
                                  const std::vector<ExperimentData>& data) {
  ThetaVector theta = init;
  const double step = units::khz_to_rad_us(25.0);
  const ExperimentData* r01 = nullptr;
  const ExperimentData* r12 = nullptr;
  for (const auto& d : data) {
    if (d.kind == ProtocolKind::Ramsey01) r01 = &d;
    if (d.kind == ProtocolKind::Ramsey12) r12 = &d;
  }
  if (r01 != nullptr) {
    double best = std::numeric_limits<double>::infinity();
    double best_w = theta[0];
    for (double w = b.lower[0] + 0.5 * step; w < b.upper[0]; w += step) {
      ThetaVector cand = theta;
      cand[0] = w;
      const double term = experiment_term(cand, *r01);
      if (term < best) { best = term; best_w = w; }
    }
    theta[0] = best_w;
  }
  if (r12 != nullptr) {
    double best = std::numeric_limits<double>::infinity();
    double best_w = theta[1], best_e = theta[2];
    for (double w = b.lower[1] + 0.5 * step; w < b.upper[1]; w += step) {
      for (double e = b.lower[2] + 0.5 * step; e < b.upper[2]; e += step) {
        ThetaVector cand = theta;
        cand[1] = w;
        cand[2] = e;
        const double term = experiment_term(cand, *r12);
        if (term < best) { best = term; best_w = w; best_e = e; }
      }
    }
    theta[1] = best_w;
    theta[2] = best_e;
  }
  return theta;
}

}  // namespace

FitResult fit(const FitProblem& problem, const FitOptions& opts) {
  problem.bounds.validate();
  if (problem.data.empty()) throw std::invalid_argument("fit: no experiment data");
  for (const auto& d : problem.data) d.validate();
  if (!problem.bounds.strictly_interior(problem.init)) {
    throw std::invalid_argument("fit: initial point must be strictly inside the box");
  }

  ThetaVector theta = problem.init;
  if (opts.coarse_frequency_scan) {
    theta = coarse_frequency_scan(theta, problem.bounds, problem.data);
  }

  Scaling scaling;
  for (int i = 0; i < kNumFitParams; ++i) {
    scaling.center[i] = 0.5 * (problem.bounds.lower[i] + problem.bounds.upper[i]);
  }

  const double j_start = objective(theta, problem.data);
  if (!std::isfinite(j_start)) {
    throw std::runtime_error("fit: objective is not finite at the start point");
  }

  FitResult result;
  Eigen::VectorXd y = scaling.to_y(theta);
  double mu = opts.mu0_factor * std::max(j_start, 1e-10);
  bool last_converged = false;

  for (int stage = 0; stage < opts.barrier_stages && mu > opts.mu_min; ++stage) {
    auto penalized = [&](const Eigen::VectorXd& yy) {
      const ThetaVector t = scaling.to_theta(yy);
      const double barrier = log_barrier(t, problem.bounds);
      if (!std::isfinite(barrier)) return std::numeric_limits<double>::infinity();
      return objective(t, problem.data) + mu * barrier;
    };
    auto penalized_grad = [&](const Eigen::VectorXd& yy) {
      Eigen::VectorXd h(kNumFitParams);
      for (int i = 0; i < kNumFitParams; ++i) {
        // Same truncation/roundoff balance as objective_gradient: J is
        // smooth on much larger coordinate scales, so a 1e-4 step keeps
        // the difference above the simulation noise floor.
        h[i] = 1e-4 * std::max(std::abs(yy[i]), 1.0);
        // Shrink toward the boundary so both stencil points stay feasible.
        for (int tries = 0; tries < 40; ++tries) {
          Eigen::VectorXd probe = yy;
          probe[i] = yy[i] + h[i];
          const bool hi_ok = problem.bounds.strictly_interior(scaling.to_theta(probe));
          probe[i] = yy[i] - h[i];
          const bool lo_ok = problem.bounds.strictly_interior(scaling.to_theta(probe));
          if (hi_ok && lo_ok) break;
          h[i] *= 0.5;
          if (tries == 39) {
            throw std::runtime_error("fit: cannot take a feasible difference step");
          }
        }
      }
      return fd_gradient(penalized, yy, h);
    };

    LbfgsResult stage_res = lbfgs_minimize(penalized, penalized_grad, y, opts.lbfgs);
    y = stage_res.x;
    result.iterations += stage_res.iterations;
    last_converged = stage_res.converged;
    mu *= opts.mu_shrink;
  }

  result.theta_hat = scaling.to_theta(y);
  result.device = device_from_theta(result.theta_hat);
  result.objective_value = objective(result.theta_hat, problem.data);
  result.converged = last_converged;
  for (const auto& d : problem.data) {
    result.residual_norms.push_back(std::sqrt(experiment_term(result.theta_hat, d) / d.dt));
  }
  return result;
}

std::vector<SpectralPeak> find_spectral_peaks(const std::vector<double>& freqs,
                                              const std::vector<double>& mags) {
  if (mags.size() < 3) return {};
  std::vector<double> sorted(mags.begin(), mags.end());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  // The absolute floor keeps rounding residue of near-constant series
  // (populations are O(1), genuine peaks are many orders larger) from
  // registering as peaks when the median itself is at the noise level.
  const double threshold = std::max(3.0 * sorted[sorted.size() / 2], 1e-9);
  std::vector<SpectralPeak> peaks;
  for (size_t m = 1; m + 1 < mags.size(); ++m) {
    if (mags[m] > threshold && mags[m] >= mags[m - 1] && mags[m] > mags[m + 1]) {
      peaks.push_back({freqs[m], mags[m]});
    }
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const auto& a, const auto& b) { return a.magnitude > b.magnitude; });
  return peaks;
}

namespace {

// Least-squares slope of log(p) against t; returns the decay rate or a
// fallback when too few usable points remain.
double decay_rate_from_slope(const std::vector<double>& times,
                             const Eigen::Matrix<double, 3, Eigen::Dynamic>& pops, int row,
                             double fallback) {
  std::vector<double> ts, logs;
  for (Eigen::Index j = 0; j < pops.cols(); ++j) {
    const double p = pops(row, j);
    if (p > 0.02) {
      ts.push_back(times[static_cast<size_t>(j)]);
      logs.push_back(std::log(p));
    }
  }
  if (ts.size() < 3) return fallback;
  const double n = static_cast<double>(ts.size());
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (size_t j = 0; j < ts.size(); ++j) {
    st += ts[j];
    sl += logs[j];
    stt += ts[j] * ts[j];
    stl += ts[j] * logs[j];
  }
  const double denom = n * stt - st * st;
  if (denom <= 0.0) return fallback;
  const double slope = (n * stl - st * sl) / denom;
  return slope < 0.0 ? -slope : fallback;
}

}  // namespace

ThetaVector initialize_from_fft(const std::vector<ExperimentData>& data,
                                const ParameterBounds& bounds) {
  bounds.validate();
  ThetaVector theta{};
  for (int i = 0; i < kNumFitParams; ++i) {
    // Box-center fallback; geometric center for the log-scaled rates.
    theta[i] = is_frequency_param(i)
        ? 0.5 * (bounds.lower[i] + bounds.upper[i])
        : std::sqrt(bounds.lower[i] * bounds.upper[i]);
  }

  for (const auto& d : data) {
    if (d.kind == ProtocolKind::Ramsey01) {
      const auto [freqs, mags] = fft_amplitude_spectrum({d.kind, d.times, d.pops}, 1);
      const auto peaks = find_spectral_peaks(freqs, mags);
      if (!peaks.empty()) {
        double w = d.drive + units::mhz_to_rad_us(peaks[0].freq_mhz);
        if (w > bounds.upper[0]) w = d.drive - units::mhz_to_rad_us(peaks[0].freq_mhz);
        theta[0] = clamp_interior(w, bounds.lower[0], bounds.upper[0]);
      }
    } else if (d.kind == ProtocolKind::Ramsey12) {
      const auto [freqs, mags] = fft_amplitude_spectrum({d.kind, d.times, d.pops}, 2);
      const auto peaks = find_spectral_peaks(freqs, mags);
      if (peaks.size() >= 2) {
        const double fa = std::min(peaks[0].freq_mhz, peaks[1].freq_mhz);
        const double fb = std::max(peaks[0].freq_mhz, peaks[1].freq_mhz);
        double wbar = d.drive + units::mhz_to_rad_us(0.5 * (fa + fb));
        if (wbar > bounds.upper[1]) wbar = d.drive - units::mhz_to_rad_us(0.5 * (fa + fb));
        theta[1] = clamp_interior(wbar, bounds.lower[1], bounds.upper[1]);
        theta[2] = clamp_interior(units::mhz_to_rad_us(0.5 * (fb - fa)), bounds.lower[2],
                                  bounds.upper[2]);
      } else if (peaks.size() == 1) {
        double wbar = d.drive + units::mhz_to_rad_us(peaks[0].freq_mhz);
        if (wbar > bounds.upper[1]) wbar = d.drive - units::mhz_to_rad_us(peaks[0].freq_mhz);
        theta[1] = clamp_interior(wbar, bounds.lower[1], bounds.upper[1]);
      }
    } else if (d.kind == ProtocolKind::Decay1) {
      theta[3] = clamp_interior(
          decay_rate_from_slope(d.times, d.pops, 1, theta[3]), bounds.lower[3],
          bounds.upper[3]);
    } else if (d.kind == ProtocolKind::Decay2) {
      theta[4] = clamp_interior(
          decay_rate_from_slope(d.times, d.pops, 2, theta[4]), bounds.lower[4],
          bounds.upper[4]);
    }
  }
  return theta;
}

}  // namespace qchar
