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

#pragma once

// Stochastic trust-region driver.
//
// Each iteration builds a random model m_k, sets the radius from the relative
// radius mu_k, solves the subproblem, estimates f at x_k and x_k + d_k, and
// accepts the step when the estimated ratio clears eta1. The power rule
// delta = mu^r1 |g|^r2 with r1 = r2 = 1 gives STRME; the constant rule
// delta = mu gives STORM.

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "strme/common.hpp"
#include "strme/problems.hpp"
#include "strme/sampling.hpp"
#include "strme/subproblem.hpp"

namespace strme {

struct PowerRule {
  double r1 = 1.0;
  double r2 = 1.0;
};
struct ConstantRule {};
using RadiusRule = std::variant<PowerRule, ConstantRule>;

inline bool is_constant_rule(const RadiusRule& rule) {
  return std::holds_alternative<ConstantRule>(rule);
}

struct OptConfig {
  double gamma = 2.0;
  double eta1 = 0.1;
  std::optional<double> eta2;  // gradient test of the constant rule
  double mu0 = 1.0;
  double mu_max = 1e3;
  std::uint64_t sfo_max = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_iterations;

  /// Under the power rule a supplied eta2 requires mu_max <= 1 / eta2, which
  /// makes the gradient test hold automatically.
  void validate(const RadiusRule& rule) const;
};

/// mu^r1 |g|^r2 for the power rule, mu for the constant rule.
double radius(const RadiusRule& rule, double mu, double grad_norm);

/// (f0 - fd) / pred; throws SubproblemContractError unless pred > 0.
double ratio(double f0_est, double fd_est, double pred);

struct TrustRegionState {
  Vector x;
  double mu = 1.0;
  std::size_t k = 0;
  std::uint64_t sfo_count = 0;
  std::optional<double> last_rho;
  bool last_success = false;
};

/// Success test and mu update. x moves only on success.
TrustRegionState accept_update(double rho, double grad_norm, double delta,
                               const TrustRegionState& state,
                               const OptConfig& cfg, const RadiusRule& rule,
                               const Vector& d);

struct StepRecord {
  std::size_t k = 0;
  double delta = 0.0;
  double mu_before = 0.0;
  double mu_after = 0.0;
  double rho = 0.0;
  double pred = 0.0;
  bool success = false;
  double grad_norm = 0.0;
  std::size_t batch_size_used = 0;
  std::uint64_t sfo_after = 0;
  double f0 = 0.0;
  double fd = 0.0;
  TrsStatus trs_status = TrsStatus::interior;
};

enum class RunStatus {
  budget_exhausted,
  iteration_limit,
  zero_gradient,
  radius_collapse,
  stopped,
};
std::string_view to_string(RunStatus status);

struct RunResult {
  std::vector<StepRecord> trace;
  TrustRegionState state;
  RunStatus status = RunStatus::budget_exhausted;
};

/// Called after every iteration; returning false ends the run.
using StepObserver =
    std::function<bool(const StepRecord&, const TrustRegionState&)>;

RunResult run(const Problem& problem, ModelBuilder& builder,
              const TrsSolver& solver, Estimator& estimator,
              const OptConfig& cfg, const RadiusRule& rule, Vector x0,
              const StepObserver& observer = {});

}  // namespace strme
