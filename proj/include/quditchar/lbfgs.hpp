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

#include <functional>

#include <Eigen/Dense>

namespace qchar {

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 400;
  double grad_tolerance = 1e-8;      // on the infinity norm
  double sufficient_decrease = 1e-4; // Armijo c1
  double step_shrink = 0.5;
  int max_backtracks = 60;
  // Plateau stop: quit once the relative objective decrease stays below
  // this for plateau_patience consecutive accepted steps.
  double plateau_tolerance = 1e-10;
  int plateau_patience = 5;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;   // gradient tolerance reached or step underflow
  bool grad_tol_met = false;
};

/// Limited-memory quasi-Newton minimization with a backtracking line
/// search (sufficient-decrease condition). `f` may return +inf to mark
/// infeasible points; the line search backs off.
LbfgsResult lbfgs_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                           const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                           const Eigen::VectorXd& x0, const LbfgsOptions& opts = {});

/// Central finite-difference gradient with per-coordinate steps h.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& h);

}  // namespace qchar
