/* Copyright (c) 2026 The strme Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include <cmath>
#include <limits>

#include "strme/harness.hpp"
#include "strme/logging.hpp"
#include "strme/subproblem.hpp"

namespace strme {

void DiagnosticsConfig::validate() const {
  if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("nu must lie in (0, 1)");
  if (!(l_smooth > 0.0)) throw ConfigError("L must be positive");
}

double compute_phi(const DiagnosticsConfig& diag, double f_val, double mu,
                   double grad_norm) {
  return diag.nu * (f_val - diag.f_star) +
         (1.0 - diag.nu) * mu * grad_norm * grad_norm /
             (diag.l_smooth * diag.l_smooth);
}

double success_fail_ratio(std::size_t successes, std::size_t failures) {
  if (failures == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(successes) / static_cast<double>(failures);
}

double success_fail_ratio(std::span<const StepRecord> trace) {
  std::size_t successes = 0;
  for (const StepRecord& r : trace) successes += r.success;
  return success_fail_ratio(successes, trace.size() - successes);
}

std::optional<std::size_t> measure_stopping_time(std::span<const double> values,
                                                 double eps) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] <= eps) return k;
  }
  return std::nullopt;
}

std::pair<Vector, Vector> adagrad_step(const Vector& x, const Vector& g,
                                       const Vector& accum, double eta,
                                       double eps) {
  require_same_dim(static_cast<std::size_t>(x.size()),
                   static_cast<std::size_t>(g.size()), "adagrad");
  require_same_dim(static_cast<std::size_t>(x.size()),
                   static_cast<std::size_t>(accum.size()), "adagrad");
  Vector next_accum = accum + g.cwiseProduct(g);
  Vector next_x = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (g[i] != 0.0) next_x[i] -= eta * g[i] / (std::sqrt(next_accum[i]) + eps);
  }
  return {std::move(next_x), std::move(next_accum)};
}

std::pair<double, Vector> compute_fstar(const Problem& problem, Vector x,
                                        double tol,
                                        std::size_t max_iterations) {
  if (!problem.has_hessian()) throw Error("f* solve needs Hessians");
  const Batch all = problem.components() ? full_batch(problem)
                                         : Batch::population(1, 0);
  double f = problem.full_value(x);
  Vector g = problem.full_gradient(x);
  double delta = std::max(1.0, g.norm());
  for (std::size_t it = 0; it < max_iterations && g.norm() > tol; ++it) {
    const Matrix h = problem.batch_hessian(x, all);
    const TrsSolution sol = dogleg(g, h, delta);
    const Vector trial = x + sol.d;
    const double f_trial = problem.full_value(trial);
    // Once the predicted decrease is at rounding level the ratio is noise;
    // Newton steps are taken as they are.
    const bool at_noise_floor = sol.pred <= 1e-14 * std::max(1.0, std::abs(f));
    const double rho = (f - f_trial) / sol.pred;
    if (at_noise_floor || rho > 1e-4) {
      x = trial;
      f = f_trial;
      g = problem.full_gradient(x);
    }
    if (!at_noise_floor) {
      if (rho < 0.25) {
        delta = 0.25 * sol.d.norm();
      } else if (rho > 0.75 && sol.status != TrsStatus::interior) {
        delta *= 2.0;
      }
    }
    if (!(delta > 0.0)) break;
  }
  if (g.norm() > tol) {
    log_warning("f* solve stopped at |grad f| = " + std::to_string(g.norm()));
  }
  return {f, std::move(x)};
}

}  // namespace strme
