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

// Experiment configuration, diagnostics and the experiment runner.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "strme/common.hpp"
#include "strme/core.hpp"
#include "strme/lsr1.hpp"
#include "strme/problems.hpp"
#include "strme/sampling.hpp"

namespace strme {

enum class Algorithm {
  strme_1st,
  strme_2nd_dogleg,
  strme_lsr1,
  storm_1st,
  storm_2nd,
  storm_lsr1,
  adagrad,
};
std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
bool is_storm(Algorithm a);

enum class ProblemKind { logistic, mlp, quadratic, rosenbrock };
std::string_view to_string(ProblemKind p);

enum class EstimatePolicy { shared, resample };

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::logistic;
  // LIBSVM file (logistic) or directory holding the four IDX files (mlp).
  std::string dataset;
  std::string test_dataset;  // LIBSVM test file; split `dataset` when empty
  double train_fraction = 0.75;
  bool shuffle_split = true;
  std::size_t train_limit = 0;  // mlp: keep the first rows only (0 = all)
  std::size_t test_limit = 0;
  double lambda = 1e-4;
  std::size_t hidden = 50;

  // Synthetic problems.
  std::size_t synthetic_dim = 10;
  double synthetic_condition = 100.0;
  std::uint64_t problem_seed = 1;
  double v_f = 0.0;
  double v_g = 0.0;
  double nominal_n = 1000.0;  // component count used for effective passes

  Algorithm algorithm = Algorithm::strme_1st;
  OptConfig opt;
  double storm_delta0 = 1.0;
  double storm_delta_max = 10.0;
  BatchSchedule schedule;  // b0 = 0 means feature dimension + 1
  AccuracyParams accuracy;
  EstimatePolicy estimates = EstimatePolicy::shared;
  Lsr1Params lsr1;
  double adagrad_eta = 1.0;
  double adagrad_eps = 1e-8;
  std::size_t adagrad_batch = 0;  // 0 means b0

  double sfo_max_passes = 10.0;
  std::size_t eval_every = 0;  // iterations between evaluation rows; 0 = auto
  std::string init = "zero";   // zero | uniform
  bool warm_start = false;  // one charged epoch of minibatch SGD first
  double warm_start_lr = 0.5;
  std::size_t warm_start_batch = 32;

  std::uint64_t seed = 0;
  std::string out_dir;

  // Diagnostics; Phi is logged when f* is known.
  double nu = 0.5;
  std::optional<double> l_smooth;
  std::optional<double> f_star;
  bool use_fstar_cache = true;

  void validate() const;
};

/// Sets one `key=value` field. Unknown keys and bad values throw ConfigError.
void apply_setting(ExperimentConfig& cfg, std::string_view key,
                   std::string_view value);
/// Every key accepted by apply_setting, with the current value.
std::vector<std::pair<std::string, std::string>> config_entries(
    const ExperimentConfig& cfg);

/// Flat `key = value` text; `#` starts a comment.
void parse_config(std::istream& in, ExperimentConfig& cfg);
void load_config(const std::filesystem::path& path, ExperimentConfig& cfg);

/// logistic-a9a, logistic-ijcnn1, dnn-1st, dnn-lsr1.
ExperimentConfig preset(std::string_view name, Algorithm algorithm);
std::vector<std::string_view> preset_names();

// ---------------------------------------------------------------------------
// Diagnostics

struct DiagnosticsConfig {
  double nu = 0.5;
  double l_smooth = 1.0;
  double f_star = 0.0;

  void validate() const;
};

/// nu (f - f*) + (1 - nu) mu |grad f|^2 / L^2.
double compute_phi(const DiagnosticsConfig& diag, double f_val, double mu,
                   double grad_norm);

/// Successes over failures; +infinity when there is no failure.
double success_fail_ratio(std::span<const StepRecord> trace);
double success_fail_ratio(std::size_t successes, std::size_t failures);

/// First index whose value is <= eps.
std::optional<std::size_t> measure_stopping_time(std::span<const double> values,
                                                 double eps);

/// accum += g*g; x -= eta g / (sqrt(accum) + eps).
std::pair<Vector, Vector> adagrad_step(const Vector& x, const Vector& g,
                                       const Vector& accum, double eta,
                                       double eps = 1e-8);

/// Deterministic full-batch trust-region Newton solve to |grad f| <= tol.
/// The problem must provide Hessians.
std::pair<double, Vector> compute_fstar(const Problem& problem, Vector x0,
                                        double tol = 1e-10,
                                        std::size_t max_iterations = 500);

// ---------------------------------------------------------------------------
// Experiments

struct MetricsRow {
  std::size_t k = 0;
  double effective_passes = 0.0;
  std::optional<double> train_loss;
  std::optional<double> test_accuracy;
  std::optional<double> delta;
  std::optional<double> mu;
  std::optional<double> rho;
  std::optional<bool> success;
  std::optional<double> grad_norm_model;
  std::optional<std::size_t> batch_size;
  std::optional<double> phi;
  std::optional<double> varsigma;
  bool is_eval_row = false;
};

inline constexpr std::string_view kTraceHeader =
    "k,effective_passes,train_loss,test_accuracy,delta,mu,rho,success,"
    "grad_norm_model,batch_size,phi,varsigma,is_eval_row";

void write_trace_csv(std::ostream& out, std::span<const MetricsRow> rows);

/// Loaded problem data for one experiment.
struct ExperimentData {
  std::unique_ptr<Problem> train;
  std::unique_ptr<Problem> test;  // may be null
  std::size_t feature_dim = 0;    // logistic d or mlp input width
};
ExperimentData load_experiment_data(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  Vector x;
  RunStatus status = RunStatus::budget_exhausted;
  std::size_t iterations = 0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  std::uint64_t sfo = 0;
  double final_train_loss = 0.0;
  std::optional<double> final_test_accuracy;
  std::optional<double> f_star;
  double wall_seconds = 0.0;
};

/// Runs the configured algorithm to its budget. Writes trace.csv and
/// summary.json under cfg.out_dir when it is set.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const ExperimentData& data);

/// f* for the configured problem: analytic for synthetic problems, otherwise
/// a full-batch solve cached next to the dataset.
std::optional<double> resolve_fstar(const ExperimentConfig& cfg,
                                    const ExperimentData& data);

}  // namespace strme
