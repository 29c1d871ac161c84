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

// Command-line front end: run experiments, self-checks and f* solves.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "strme/checks.hpp"
#include "strme/harness.hpp"
#include "strme/logging.hpp"

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::string algorithm;
  std::string dataset;
  std::optional<std::uint64_t> seed;
  std::optional<double> passes;
  std::string out;
  std::vector<std::string> settings;
  bool verbose = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "flat key=value configuration file");
  cmd->add_option("--preset", o.preset, "logistic-a9a | logistic-ijcnn1 | dnn-1st | dnn-lsr1");
  cmd->add_option("--algorithm", o.algorithm,
                  "strme_1st | strme_2nd_dogleg | strme_lsr1 | storm_1st | "
                  "storm_2nd | storm_lsr1 | adagrad");
  cmd->add_option("--dataset", o.dataset, "LIBSVM file or MNIST IDX directory");
  cmd->add_option("--seed", o.seed, "root RNG seed");
  cmd->add_option("--sfo-max-passes", o.passes, "budget in effective passes");
  cmd->add_option("--out", o.out, "output directory for trace.csv and summary.json");
  cmd->add_option("--set", o.settings, "extra key=value overrides")->take_all();
  cmd->add_flag("-v,--verbose", o.verbose, "log progress to stderr");
}

// Preset, then config file, then flags; later sources win.
strme::ExperimentConfig build_config(const Options& o) {
  const strme::Algorithm algorithm = o.algorithm.empty()
                                         ? strme::Algorithm::strme_1st
                                         : strme::parse_algorithm(o.algorithm);
  strme::ExperimentConfig cfg =
      o.preset.empty() ? strme::ExperimentConfig{} : strme::preset(o.preset, algorithm);
  cfg.algorithm = algorithm;
  if (!o.config.empty()) strme::load_config(o.config, cfg);
  if (!o.algorithm.empty()) cfg.algorithm = algorithm;
  if (!o.dataset.empty()) cfg.dataset = o.dataset;
  if (o.seed) cfg.seed = *o.seed;
  if (o.passes) cfg.sfo_max_passes = *o.passes;
  if (!o.out.empty()) cfg.out_dir = o.out;
  for (const std::string& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw strme::ConfigError("--set expects key=value");
    strme::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic trust-region optimization experiments"};
  app.require_subcommand(1);

  Options run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
  add_common(run_cmd, run_opts);

  std::uint64_t check_seed = 0;
  CLI::App* check_cmd = app.add_subcommand("check", "run the built-in oracle checks");
  check_cmd->add_option("--seed", check_seed, "root RNG seed");

  Options fstar_opts;
  CLI::App* fstar_cmd =
      app.add_subcommand("fstar", "compute and cache the reference optimum f*");
  add_common(fstar_cmd, fstar_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      if (run_opts.verbose) strme::set_log_level(strme::LogLevel::info);
      const strme::ExperimentConfig cfg = build_config(run_opts);
      const strme::ExperimentResult r = strme::run_experiment(cfg);
      std::printf("%s: %zu iterations, %zu successes, final train loss %.10g",
                  std::string(strme::to_string(cfg.algorithm)).c_str(),
                  r.iterations, r.successes, r.final_train_loss);
      if (r.final_test_accuracy) {
        std::printf(", test accuracy %.4f", *r.final_test_accuracy);
      }
      std::printf(" (%s)\n", std::string(strme::to_string(r.status)).c_str());
      if (!cfg.out_dir.empty()) std::printf("wrote %s/trace.csv\n", cfg.out_dir.c_str());
      return 0;
    }
    if (*check_cmd) {
      bool ok = true;
      for (const strme::CheckResult& c : strme::run_self_checks(check_seed)) {
        std::printf("%s  %s (%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.detail.c_str());
        ok = ok && c.passed;
      }
      return ok ? 0 : 1;
    }
    if (*fstar_cmd) {
      strme::ExperimentConfig cfg = build_config(fstar_opts);
      const strme::ExperimentData data = strme::load_experiment_data(cfg);
      const auto f = strme::resolve_fstar(cfg, data);
      if (!f) {
        std::fprintf(stderr, "no reference optimum for problem '%s'\n",
                     std::string(strme::to_string(cfg.problem)).c_str());
        return 1;
      }
      std::printf("%.17g\n", *f);
      return 0;
    }
  } catch (const strme::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
