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
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "strme/harness.hpp"

using namespace strme;

namespace {

const std::string kData = STRME_DATA_DIR;

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("strme-test-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

ExperimentConfig quadratic_config() {
  ExperimentConfig cfg;
  cfg.problem = ProblemKind::quadratic;
  cfg.synthetic_dim = 5;
  cfg.synthetic_condition = 1.0;  // Q = I
  cfg.problem_seed = 3;
  cfg.v_f = 1e-4;
  cfg.v_g = 1e-4;
  cfg.algorithm = Algorithm::strme_1st;
  cfg.schedule.t0 = 1;
  cfg.schedule.b0 = 10;
  cfg.schedule.b_max = 2000;
  // mu below 1 keeps the first step from landing on the minimizer of Q = I.
  cfg.opt.mu0 = 0.1;
  cfg.opt.mu_max = 0.5;
  cfg.sfo_max_passes = 200.0;
  cfg.eval_every = 3;
  cfg.seed = 9;
  return cfg;
}

ExperimentConfig logistic_config(Algorithm a) {
  ExperimentConfig cfg;
  cfg.problem = ProblemKind::logistic;
  cfg.dataset = kData + "/synthetic_200x20.svm";
  cfg.lambda = 1e-3;
  cfg.algorithm = a;
  cfg.schedule.t0 = 2;
  cfg.schedule.b0 = 10;
  cfg.sfo_max_passes = 20.0;
  cfg.use_fstar_cache = false;
  cfg.seed = 4;
  return cfg;
}

}  // namespace

TEST_CASE("adagrad step") {
  Vector x(3), g(3);
  x << 1, 1, 1;
  g << 1, -2, 0;
  const auto [x1, a1] = adagrad_step(x, g, Vector::Zero(3), 0.5, 0.0);
  CHECK(a1[0] == 1.0);
  CHECK(a1[1] == 4.0);
  CHECK(a1[2] == 0.0);
  CHECK(x1[0] == doctest::Approx(0.5));
  CHECK(x1[1] == doctest::Approx(1.5));
  CHECK(x1[2] == 1.0);
  const auto [x2, a2] = adagrad_step(x1, g, a1, 0.5, 0.0);
  CHECK(a2[1] == 8.0);
  CHECK(x2[0] == doctest::Approx(0.5 - 0.5 / std::sqrt(2.0)));
  CHECK_THROWS_AS(adagrad_step(x, Vector::Zero(2), Vector::Zero(3), 1.0), DimensionError);
}

TEST_CASE("diagnostics") {
  const DiagnosticsConfig diag{0.5, 2.0, 1.0};
  CHECK(compute_phi(diag, 3.0, 4.0, 2.0) == doctest::Approx(0.5 * 2.0 + 0.5 * 4.0 * 4.0 / 4.0));
  CHECK_THROWS_AS((DiagnosticsConfig{1.0, 1.0, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((DiagnosticsConfig{0.5, 0.0, 0.0}.validate()), ConfigError);

  CHECK(success_fail_ratio(3, 1) == 3.0);
  CHECK(std::isinf(success_fail_ratio(2, 0)));
  std::vector<StepRecord> trace(4);
  trace[0].success = trace[1].success = trace[3].success = true;
  CHECK(success_fail_ratio(trace) == 3.0);

  const std::vector<double> v{5.0, 2.0, 0.5, 0.1, 0.7};
  CHECK(measure_stopping_time(v, 0.5) == 2u);
  CHECK(measure_stopping_time(v, 10.0) == 0u);
  CHECK_FALSE(measure_stopping_time(v, 0.01).has_value());
}

TEST_CASE("trace csv") {
  MetricsRow a;
  a.k = 3;
  a.effective_passes = 0.25;
  a.delta = 0.5;
  a.success = true;
  a.batch_size = 12;
  a.varsigma = std::numeric_limits<double>::infinity();
  MetricsRow b;
  b.k = 4;
  b.effective_passes = 1.0;
  b.train_loss = 0.75;
  b.is_eval_row = true;
  std::ostringstream out;
  const std::vector<MetricsRow> rows{a, b};
  write_trace_csv(out, rows);
  CHECK(out.str() == std::string(kTraceHeader) + "\n3,0.25,,,0.5,,,1,,12,,,0\n4,1,0.75,,,,,,,,,,1\n");
}

TEST_CASE("config parsing") {
  ExperimentConfig cfg;
  std::istringstream in(
      "# comment\n"
      "algorithm = storm_lsr1\n"
      "problem=quadratic   # trailing\n"
      "\n"
      "t0 = 7\n"
      "eta2 = 0.01\n"
      "max_iterations = 12\n"
      "batch_mode = chebyshev\n");
  parse_config(in, cfg);
  CHECK(cfg.algorithm == Algorithm::storm_lsr1);
  CHECK(cfg.problem == ProblemKind::quadratic);
  CHECK(cfg.schedule.t0 == 7);
  CHECK(cfg.opt.eta2 == 0.01);
  CHECK(cfg.opt.max_iterations == 12u);
  CHECK(cfg.schedule.mode == BatchMode::chebyshev);

  apply_setting(cfg, "eta2", "none");
  CHECK_FALSE(cfg.opt.eta2.has_value());
  CHECK_THROWS_AS(apply_setting(cfg, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "t0", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "problem", "svm"), ConfigError);
  CHECK_THROWS_AS(parse_algorithm("sgd"), ConfigError);

  std::istringstream bad("t0 = 1\nseed = 2\nbogus = 3\n");
  try {
    parse_config(bad, cfg);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream no_eq("t0 1\n");
  CHECK_THROWS_AS(parse_config(no_eq, cfg), ParseError);

  // Every entry reads back into an identical configuration.
  ExperimentConfig copy;
  for (const auto& [key, value] : config_entries(cfg)) apply_setting(copy, key, value);
  CHECK(config_entries(copy) == config_entries(cfg));
}

TEST_CASE("algorithm names round trip") {
  for (Algorithm a : {Algorithm::strme_1st, Algorithm::strme_2nd_dogleg, Algorithm::strme_lsr1,
                      Algorithm::storm_1st, Algorithm::storm_2nd, Algorithm::storm_lsr1,
                      Algorithm::adagrad}) {
    CHECK(parse_algorithm(to_string(a)) == a);
  }
  CHECK(is_storm(Algorithm::storm_2nd));
  CHECK_FALSE(is_storm(Algorithm::strme_lsr1));
}

TEST_CASE("presets") {
  for (std::string_view name : preset_names()) {
    const ExperimentConfig cfg = preset(name, Algorithm::strme_1st);
    CHECK(cfg.schedule.b0 == 0);
    CHECK(cfg.opt.gamma == 2.0);
    CHECK(cfg.opt.eta1 == 0.1);
  }
  CHECK(preset("logistic-a9a", Algorithm::strme_1st).train_fraction == 0.95);
  CHECK(preset("logistic-ijcnn1", Algorithm::strme_1st).opt.mu0 == 10.0);
  CHECK(preset("logistic-ijcnn1", Algorithm::strme_2nd_dogleg).opt.mu0 == 1.0);
  CHECK(preset("dnn-1st", Algorithm::strme_1st).opt.mu_max == 2.0);
  CHECK(preset("dnn-lsr1", Algorithm::strme_lsr1).lsr1.memory == 30);
  CHECK(preset("dnn-lsr1", Algorithm::storm_lsr1).storm_delta_max == 1.0);
  CHECK_THROWS_AS(preset("cifar", Algorithm::strme_1st), ConfigError);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = logistic_config(Algorithm::strme_1st);
  CHECK_NOTHROW(cfg.validate());
  cfg.dataset.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = logistic_config(Algorithm::strme_1st);
  cfg.init = "random";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = logistic_config(Algorithm::strme_1st);
  cfg.schedule.b_max = 5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = logistic_config(Algorithm::strme_2nd_dogleg);
  cfg.problem = ProblemKind::mlp;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = logistic_config(Algorithm::strme_1st);
  cfg.opt.eta2 = 1e-3;
  cfg.opt.mu_max = 1e4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("experiment trace") {
  const auto dir = scratch_dir("trace");
  ExperimentConfig cfg = quadratic_config();
  cfg.out_dir = dir.string();
  const ExperimentResult r = run_experiment(cfg);
  REQUIRE(r.f_star.has_value());
  REQUIRE(r.rows.size() > 10);
  CHECK(r.rows.front().is_eval_row);
  CHECK(r.rows.back().is_eval_row);
  CHECK(r.successes + r.failures == r.iterations);
  CHECK(r.sfo <= static_cast<std::uint64_t>(cfg.sfo_max_passes * cfg.nominal_n) + 2000);

  double last_passes = 0.0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  std::size_t eval_rows = 0;
  for (const MetricsRow& row : r.rows) {
    CHECK(row.effective_passes >= last_passes);
    last_passes = row.effective_passes;
    if (row.is_eval_row) {
      ++eval_rows;
      REQUIRE(row.train_loss.has_value());
      REQUIRE(row.mu.has_value());
      REQUIRE(row.phi.has_value());
      // Q = I, so |grad f|^2 = 2 (f - f*) and L = 1.
      const double gap = *row.train_loss - *r.f_star;
      const double expected = 0.5 * gap + 0.5 * *row.mu * 2.0 * gap;
      // f - f* cancels near the optimum, so allow rounding of f itself.
      const double tol = 1e-8 * expected + 1e-14 * std::abs(*row.train_loss) * (1.0 + *row.mu);
      CHECK(std::abs(*row.phi - expected) <= tol);
      continue;
    }
    REQUIRE(row.success.has_value());
    (*row.success ? successes : failures) += 1;
    REQUIRE(row.varsigma.has_value());
    if (failures == 0) {
      CHECK(std::isinf(*row.varsigma));
    } else {
      CHECK(*row.varsigma == doctest::Approx(double(successes) / double(failures)));
    }
    CHECK(*row.batch_size >= cfg.schedule.b0);
  }
  CHECK(eval_rows >= r.iterations / cfg.eval_every);
  CHECK(r.final_train_loss < r.rows.front().train_loss.value());

  const std::string csv = slurp(dir / "trace.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == kTraceHeader);
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    CHECK(split_csv(line).size() == 13);
    ++count;
  }
  CHECK(count == r.rows.size());

  const std::string summary = slurp(dir / "summary.json");
  CHECK(summary.find("\"algorithm\": \"strme_1st\"") != std::string::npos);
  CHECK(summary.find("\"iterations\": " + std::to_string(r.iterations)) != std::string::npos);
  CHECK(summary.find("\"config\"") != std::string::npos);

  // Same configuration, same bytes.
  const auto dir2 = scratch_dir("trace-rerun");
  cfg.out_dir = dir2.string();
  run_experiment(cfg);
  CHECK(slurp(dir2 / "trace.csv") == csv);
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("every algorithm runs on logistic regression") {
  for (Algorithm a : {Algorithm::strme_1st, Algorithm::strme_2nd_dogleg, Algorithm::strme_lsr1,
                      Algorithm::storm_1st, Algorithm::storm_2nd, Algorithm::storm_lsr1,
                      Algorithm::adagrad}) {
    CAPTURE(to_string(a));
    ExperimentConfig cfg = logistic_config(a);
    if (is_storm(a)) cfg.opt.eta2 = 1e-3;
    const ExperimentData data = load_experiment_data(cfg);
    CHECK(data.train->components() == 150u);
    CHECK(data.test->components() == 50u);
    const ExperimentResult r = run_experiment(cfg, data);
    CHECK(r.iterations > 0);
    CHECK(r.final_train_loss < std::log(2.0));
    REQUIRE(r.final_test_accuracy.has_value());
    CHECK(*r.final_test_accuracy > 0.5);
    CHECK(r.sfo <= 20 * 150 + 2 * 200);
    REQUIRE(r.f_star.has_value());
    CHECK(r.final_train_loss >= *r.f_star - 1e-9);
  }
}

TEST_CASE("warm start is charged") {
  ExperimentConfig cfg = logistic_config(Algorithm::strme_1st);
  cfg.warm_start = true;
  cfg.sfo_max_passes = 3.0;
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.rows.front().effective_passes == doctest::Approx(1.0));
  CHECK(r.sfo >= 150);
}

TEST_CASE("f* solve") {
  ExperimentConfig cfg = logistic_config(Algorithm::strme_1st);
  const ExperimentData data = load_experiment_data(cfg);
  const auto [f, x] = compute_fstar(*data.train, Vector::Zero(20));
  CHECK(data.train->full_gradient(x).norm() <= 1e-9);
  CHECK(f <= data.train->full_value(Vector::Zero(20)));
  CHECK(resolve_fstar(cfg, data) == f);
}
