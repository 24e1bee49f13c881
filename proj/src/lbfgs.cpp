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

#include "quditchar/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qchar {

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& h) {
  if (h.size() != x.size()) throw std::invalid_argument("fd_gradient: step size mismatch");
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(h[i] > 0.0)) throw std::invalid_argument("fd_gradient: steps must be positive");
    xp[i] = x[i] + h[i];
    const double fp = f(xp);
    xp[i] = x[i] - h[i];
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h[i]);
  }
  return g;
}

LbfgsResult lbfgs_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                           const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                           const Eigen::VectorXd& x0, const LbfgsOptions& opts) {
  LbfgsResult res;
  res.x = x0;
  res.fx = f(res.x);
  if (!std::isfinite(res.fx)) {
    throw std::runtime_error("lbfgs_minimize: objective not finite at the initial point");
  }
  Eigen::VectorXd g = grad(res.x);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  int plateau_run = 0;

  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.grad_tolerance) {
      res.converged = true;
      res.grad_tol_met = true;
      return res;
    }

    // Two-loop recursion.
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd direction = -q;
    double dir_deriv = g.dot(direction);
    if (!(dir_deriv < 0.0)) {  // not a descent direction; restart from steepest descent
      direction = -g;
      dir_deriv = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double step = 1.0;
    double fx_new = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      x_new = res.x + step * direction;
      fx_new = f(x_new);
      if (std::isfinite(fx_new) &&
          fx_new <= res.fx + opts.sufficient_decrease * step * dir_deriv) {
        accepted = true;
        break;
      }
      step *= opts.step_shrink;
    }
    if (!accepted) {
      // No representable step makes progress; treat as converged to
      // line-search resolution.
      res.converged = true;
      return res;
    }

    const Eigen::VectorXd g_new = grad(x_new);
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double decrease = res.fx - fx_new;
    res.x = x_new;
    res.fx = fx_new;
    g = g_new;

    if (decrease <= opts.plateau_tolerance * std::max(1.0, std::abs(res.fx))) {
      if (++plateau_run >= opts.plateau_patience) {
        ++res.iterations;
        res.converged = true;
        return res;
      }
    } else {
      plateau_run = 0;
    }
  }
  res.converged = g.lpNorm<Eigen::Infinity>() <= opts.grad_tolerance;
  res.grad_tol_met = res.converged;
  return res;
}

}  // namespace qchar
