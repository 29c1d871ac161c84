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

#include "strme/core.hpp"
#include "strme/logging.hpp"

namespace strme {

void OptConfig::validate(const RadiusRule& rule) const {
  if (!(gamma > 1.0)) throw ConfigError("gamma must be > 1");
  if (!(eta1 > 0.0 && eta1 < 1.0)) throw ConfigError("eta1 must lie in (0, 1)");
  if (eta2 && !(*eta2 >= 0.0)) throw ConfigError("eta2 must be >= 0");
  if (!(mu0 > 0.0 && mu0 <= mu_max)) {
    throw ConfigError("need 0 < mu0 <= mu_max");
  }
  if (const auto* p = std::get_if<PowerRule>(&rule)) {
    if (!(p->r1 >= 0.0 && p->r2 >= 0.0)) {
      throw ConfigError("radius exponents must be >= 0");
    }
    if (eta2 && *eta2 > 0.0 && mu_max > 1.0 / *eta2) {
      throw ConfigError("power rule needs mu_max <= 1 / eta2");
    }
  }
}

double radius(const RadiusRule& rule, double mu, double grad_norm) {
  if (!(mu > 0.0)) throw Error("radius: mu must be positive");
  if (!(grad_norm >= 0.0)) throw Error("radius: gradient norm must be >= 0");
  if (is_constant_rule(rule)) return mu;
  const auto& p = std::get<PowerRule>(rule);
  if (p.r1 == 1.0 && p.r2 == 1.0) return mu * grad_norm;
  return std::pow(mu, p.r1) * std::pow(grad_norm, p.r2);
}

double ratio(double f0_est, double fd_est, double pred) {
  if (!(pred > 0.0)) {
    throw SubproblemContractError("subproblem step has no predicted decrease");
  }
  return (f0_est - fd_est) / pred;
}

TrustRegionState accept_update(double rho, double grad_norm, double delta,
                               const TrustRegionState& state,
                               const OptConfig& cfg, const RadiusRule& rule,
                               const Vector& d) {
  bool success = rho >= cfg.eta1;
  if (is_constant_rule(rule)) {
    success = success && grad_norm >= cfg.eta2.value_or(0.0) * delta;
  }
  TrustRegionState next = state;
  if (success) {
    require_same_dim(static_cast<std::size_t>(d.size()),
                     static_cast<std::size_t>(state.x.size()), "step");
    next.x += d;
    next.mu = std::min(cfg.gamma * state.mu, cfg.mu_max);
  } else {
    next.mu = state.mu / cfg.gamma;
  }
  next.k = state.k + 1;
  next.last_rho = rho;
  next.last_success = success;
  return next;
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::budget_exhausted: return "budget_exhausted";
    case RunStatus::iteration_limit: return "iteration_limit";
    case RunStatus::zero_gradient: return "zero_gradient_model";
    case RunStatus::radius_collapse: return "radius_collapse";
    case RunStatus::stopped: return "stopped";
  }
  return "unknown";
}

RunResult run(const Problem& problem, ModelBuilder& builder,
              const TrsSolver& solver, Estimator& estimator,
              const OptConfig& cfg, const RadiusRule& rule, Vector x0,
              const StepObserver& observer) {
  cfg.validate(rule);
  require_same_dim(static_cast<std::size_t>(x0.size()), problem.dim(),
                   "initial point");
  RunResult out;
  TrustRegionState& state = out.state;
  state.x = std::move(x0);
  state.mu = cfg.mu0;
  std::optional<double> prev_delta;

  while (state.sfo_count < cfg.sfo_max) {
    if (cfg.max_iterations && state.k >= *cfg.max_iterations) {
      out.status = RunStatus::iteration_limit;
      return out;
    }
    const std::optional<double> delta_ref =
        is_constant_rule(rule) ? std::optional<double>(state.mu) : prev_delta;
    const ModelSample sample = builder.build(state.x, state.k, delta_ref);
    state.sfo_count += sample.sfo;

    const double grad_norm = sample.model.g.norm();
    const double delta = radius(rule, state.mu, grad_norm);
    if (grad_norm == 0.0) {
      out.status = RunStatus::zero_gradient;
      return out;
    }
    if (delta == 0.0) {
      out.status = RunStatus::radius_collapse;
      return out;
    }

    const TrsSolution sol = solver.solve(sample.model, delta);
    const Vector x_trial = state.x + sol.d;
    const EstimatePair est =
        estimator.estimate(state.x, x_trial, sample, state.k, delta);
    const double rho = ratio(est.f0, est.fd, sol.pred);
    state.sfo_count += builder.observe_step(state.x, sol.d, sample);

    StepRecord rec;
    rec.k = state.k;
    rec.delta = delta;
    rec.mu_before = state.mu;
    rec.rho = rho;
    rec.pred = sol.pred;
    rec.grad_norm = grad_norm;
    rec.batch_size_used = sample.batch.count;
    rec.f0 = est.f0;
    rec.fd = est.fd;
    rec.trs_status = sol.status;

    state = accept_update(rho, grad_norm, delta, state, cfg, rule, sol.d);
    rec.mu_after = state.mu;
    rec.success = state.last_success;
    rec.sfo_after = state.sfo_count;
    out.trace.push_back(rec);
    prev_delta = delta;

    if (state.mu < std::numeric_limits<double>::min()) {
      log_warning("relative radius underflowed; stopping");
      out.status = RunStatus::radius_collapse;
      return out;
    }
    if (observer && !observer(rec, state)) {
      out.status = RunStatus::stopped;
      return out;
    }
  }
  out.status = RunStatus::budget_exhausted;
  return out;
}

}  // namespace strme
