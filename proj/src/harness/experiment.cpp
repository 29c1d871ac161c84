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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "strme/harness.hpp"
#include "strme/logging.hpp"
#include "strme/subproblem.hpp"

namespace strme {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
void put(std::ostream& out, const std::optional<T>& v) {
  out << ',';
  if (!v) return;
  if constexpr (std::is_same_v<T, bool>) {
    out << (*v ? 1 : 0);
  } else if constexpr (std::is_integral_v<T>) {
    out << *v;
  } else {
    if (std::isfinite(*v)) out << fmt(*v);
  }
}

double finite_sum_size(const ExperimentConfig& cfg, const Problem& p) {
  if (const auto n = p.components()) return static_cast<double>(*n);
  return cfg.nominal_n;
}

// Upper bound on the largest Hessian eigenvalue, used by Phi.
std::optional<double> smoothness(const ExperimentConfig& cfg,
                                 const Problem& p) {
  if (cfg.l_smooth) return cfg.l_smooth;
  if (const auto* s = dynamic_cast<const SyntheticProblem*>(&p)) {
    return s->smoothness();
  }
  if (const auto* l = dynamic_cast<const LogisticProblem*>(&p)) {
    double max_sq = 0.0;
    for (std::size_t i = 0; i < l->data().size(); ++i) {
      const SparseRow r = l->data().row(i);
      double sq = 0.0;
      for (double v : r.val) sq += v * v;
      max_sq = std::max(max_sq, sq);
    }
    return l->lambda() + 0.25 * max_sq;
  }
  return std::nullopt;
}

Vector initial_point(const ExperimentConfig& cfg, const Problem& p) {
  if (cfg.problem == ProblemKind::rosenbrock) return Vector{{-1.2, 1.0}};
  if (cfg.init == "zero") return Vector::Zero(p.dim());
  Rng rng = make_stream(cfg.seed, "init");
  if (const auto* mlp = dynamic_cast<const MlpProblem*>(&p)) {
    return mlp->initial_point(rng);
  }
  const double r = 1.0 / std::sqrt(static_cast<double>(p.dim()));
  std::uniform_real_distribution<double> u(-r, r);
  Vector x(p.dim());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = u(rng);
  return x;
}

// One epoch of plain minibatch SGD over a random permutation. Returns the
// number of component gradients it used.
std::uint64_t warm_start(const ExperimentConfig& cfg, const Problem& p, Vector& x) {
  const auto n = p.components();
  if (!n) return 0;
  Rng rng = make_stream(cfg.seed, "warm-start");
  const std::vector<std::size_t> order = sample_indices(*n, *n, rng);
  const std::size_t b = std::max<std::size_t>(1, cfg.warm_start_batch);
  for (std::size_t s = 0; s < order.size(); s += b) {
    const std::size_t e = std::min(order.size(), s + b);
    const Batch batch = Batch::of({order.begin() + s, order.begin() + e});
    x -= cfg.warm_start_lr * p.batch_gradient(x, batch);
  }
  return *n;
}

std::string fstar_key(const ExperimentConfig& cfg) {
  std::ostringstream key;
  key << "lambda=" << fmt(cfg.lambda) << ";fraction=" << fmt(cfg.train_fraction)
      << ";shuffle=" << cfg.shuffle_split << ";seed=" << cfg.seed
      << ";test=" << cfg.test_dataset;
  return key.str();
}

class Recorder {
 public:
  // `sfo_offset` counts gradient evaluations spent before the run (warm start).
  Recorder(const ExperimentData& data, double n_components,
           std::uint64_t sfo_offset, std::optional<DiagnosticsConfig> diag)
      : data_(data), n_(n_components), offset_(sfo_offset), diag_(diag) {}

  void iteration(const StepRecord& rec) {
    successes_ += rec.success;
    failures_ += !rec.success;
    MetricsRow row;
    row.k = rec.k;
    row.effective_passes = passes(rec.sfo_after);
    row.delta = rec.delta;
    row.mu = rec.mu_before;
    row.rho = rec.rho;
    row.success = rec.success;
    row.grad_norm_model = rec.grad_norm;
    row.batch_size = rec.batch_size_used;
    row.varsigma = success_fail_ratio(successes_, failures_);
    rows.push_back(row);
  }

  void plain_iteration(std::size_t k, std::uint64_t sfo, double grad_norm,
                       std::size_t batch) {
    MetricsRow row;
    row.k = k;
    row.effective_passes = passes(sfo);
    row.grad_norm_model = grad_norm;
    row.batch_size = batch;
    rows.push_back(row);
  }

  void evaluation(std::size_t k, std::uint64_t sfo, const Vector& x,
                  std::optional<double> mu) {
    MetricsRow row;
    row.k = k;
    row.effective_passes = passes(sfo);
    row.train_loss = data_.train->full_value(x);
    row.test_accuracy =
        data_.test ? data_.test->accuracy(x) : data_.train->accuracy(x);
    row.mu = mu;
    if (diag_ && mu) {
      row.phi = compute_phi(*diag_, *row.train_loss, *mu,
                            data_.train->full_gradient(x).norm());
    }
    row.is_eval_row = true;
    rows.push_back(row);
  }

  std::vector<MetricsRow> rows;
  std::size_t successes_ = 0;
  std::size_t failures_ = 0;

 private:
  double passes(std::uint64_t sfo) const {
    return static_cast<double>(sfo + offset_) / n_;
  }

  const ExperimentData& data_;
  double n_;
  std::uint64_t offset_;
  std::optional<DiagnosticsConfig> diag_;
};

void write_summary(const ExperimentConfig& cfg, const ExperimentResult& r,
                   const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["algorithm"] = std::string(to_string(cfg.algorithm));
  j["problem"] = std::string(to_string(cfg.problem));
  j["seed"] = cfg.seed;
  j["status"] = std::string(to_string(r.status));
  j["iterations"] = r.iterations;
  j["successes"] = r.successes;
  j["failures"] = r.failures;
  const double ratio = success_fail_ratio(r.successes, r.failures);
  if (std::isfinite(ratio)) {
    j["varsigma"] = ratio;
  } else {
    j["varsigma"] = "inf";
  }
  j["sfo"] = r.sfo;
  j["final_train_loss"] = r.final_train_loss;
  if (r.final_test_accuracy) {
    j["final_test_accuracy"] = *r.final_test_accuracy;
  } else {
    j["final_test_accuracy"] = nullptr;
  }
  if (r.f_star) {
    j["f_star"] = *r.f_star;
  } else {
    j["f_star"] = nullptr;
  }
  j["wall_seconds"] = r.wall_seconds;
  nlohmann::ordered_json config;
  for (const auto& [key, value] : config_entries(cfg)) config[key] = value;
  j["config"] = config;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

void write_trace_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << kTraceHeader << '\n';
  for (const MetricsRow& r : rows) {
    out << r.k << ',' << fmt(r.effective_passes);
    put(out, r.train_loss);
    put(out, r.test_accuracy);
    put(out, r.delta);
    put(out, r.mu);
    put(out, r.rho);
    put(out, r.success);
    put(out, r.grad_norm_model);
    put(out, r.batch_size);
    put(out, r.phi);
    put(out, r.varsigma);
    out << ',' << (r.is_eval_row ? 1 : 0) << '\n';
  }
}

ExperimentData load_experiment_data(const ExperimentConfig& cfg) {
  ExperimentData out;
  const NoiseSpec noise{cfg.v_f, cfg.v_g, true, mix_seed(cfg.seed, hash_name("noise"))};
  switch (cfg.problem) {
    case ProblemKind::logistic: {
      SparseDataset all = load_libsvm(cfg.dataset);
      SparseDataset train;
      SparseDataset test;
      if (!cfg.test_dataset.empty()) {
        test = load_libsvm(cfg.test_dataset, all.dim());
        all.set_dim(test.dim());
        train = std::move(all);
      } else {
        std::tie(train, test) =
            split(all, {cfg.train_fraction, cfg.seed, cfg.shuffle_split});
      }
      out.feature_dim = train.dim();
      out.train = std::make_unique<LogisticProblem>(std::move(train), cfg.lambda);
      out.test = std::make_unique<LogisticProblem>(std::move(test), cfg.lambda);
      break;
    }
    case ProblemKind::mlp: {
      const std::filesystem::path dir(cfg.dataset);
      DenseDataset train = load_mnist(dir / "train-images-idx3-ubyte",
                                      dir / "train-labels-idx1-ubyte");
      DenseDataset test = load_mnist(dir / "t10k-images-idx3-ubyte",
                                     dir / "t10k-labels-idx1-ubyte");
      auto limit = [](DenseDataset& d, std::size_t n) {
        if (n == 0 || n >= d.size()) return;
        d.x.resize(n * d.features);
        d.labels.resize(n);
      };
      limit(train, cfg.train_limit);
      limit(test, cfg.test_limit);
      const MlpArchitecture arch{train.features, cfg.hidden, 10};
      out.feature_dim = train.features;
      out.train = std::make_unique<MlpProblem>(std::move(train), arch, cfg.lambda);
      out.test = std::make_unique<MlpProblem>(std::move(test), arch, cfg.lambda);
      break;
    }
    case ProblemKind::quadratic:
      out.train = std::make_unique<SyntheticProblem>(make_conditioned_quadratic(
          cfg.synthetic_dim, cfg.synthetic_condition, cfg.problem_seed, noise));
      out.feature_dim = cfg.synthetic_dim;
      break;
    case ProblemKind::rosenbrock:
      out.train = std::make_unique<SyntheticProblem>(SyntheticProblem::rosenbrock(noise));
      out.feature_dim = 2;
      break;
  }
  return out;
}

std::optional<double> resolve_fstar(const ExperimentConfig& cfg,
                                    const ExperimentData& data) {
  if (cfg.f_star) return cfg.f_star;
  if (const auto* s = dynamic_cast<const SyntheticProblem*>(data.train.get())) {
    return s->f_star();
  }
  if (cfg.problem != ProblemKind::logistic) return std::nullopt;

  const std::filesystem::path cache = cfg.dataset + ".fstar";
  const std::string key = fstar_key(cfg);
  if (cfg.use_fstar_cache) {
    std::ifstream in(cache);
    std::string k;
    double v = 0.0;
    while (in >> k >> v) {
      if (k == key) return v;
    }
  }
  const double f = compute_fstar(*data.train, Vector::Zero(data.train->dim())).first;
  if (cfg.use_fstar_cache) {
    std::ofstream out(cache, std::ios::app);
    if (out) {
      out << key << ' ' << fmt(f) << '\n';
    } else {
      log_warning("cannot write f* cache " + cache.string());
    }
  }
  return f;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ExperimentData data = load_experiment_data(cfg);
  return run_experiment(cfg, data);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const ExperimentData& data) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const Problem& problem = *data.train;
  const double n = finite_sum_size(cfg, problem);

  BatchSchedule schedule = cfg.schedule;
  if (schedule.b0 == 0) schedule.b0 = data.feature_dim + 1;
  if (const auto nc = problem.components()) {
    schedule.b_max = std::min(schedule.b_max, *nc);
    schedule.b0 = std::min(schedule.b0, schedule.b_max);
  }
  AccuracyParams accuracy = cfg.accuracy;
  accuracy.v_f = cfg.v_f;
  accuracy.v_g = cfg.v_g;
  const SampleSizer sizer{schedule, accuracy};

  ExperimentResult result;
  result.f_star = resolve_fstar(cfg, data);
  std::optional<DiagnosticsConfig> diag;
  if (result.f_star) {
    if (const auto l = smoothness(cfg, problem)) {
      diag = DiagnosticsConfig{cfg.nu, *l, *result.f_star};
      diag->validate();
    }
  }

  Vector x0 = initial_point(cfg, problem);
  const std::uint64_t sfo_offset = cfg.warm_start ? warm_start(cfg, problem, x0) : 0;
  const auto sfo_total =
      static_cast<std::uint64_t>(std::floor(cfg.sfo_max_passes * n));
  const std::uint64_t sfo_max = sfo_total > sfo_offset ? sfo_total - sfo_offset : 0;
  const std::size_t every =
      cfg.eval_every > 0
          ? cfg.eval_every
          : std::max<std::size_t>(
                1, static_cast<std::size_t>(std::ceil(
                       n / (10.0 * static_cast<double>(schedule.b0)))));

  Recorder rec(data, n, sfo_offset, diag);

  if (cfg.algorithm == Algorithm::adagrad) {
    const std::size_t b = cfg.adagrad_batch > 0 ? cfg.adagrad_batch : schedule.b0;
    Rng rng = make_stream(cfg.seed, "model-batch");
    Vector x = std::move(x0);
    Vector accum = Vector::Zero(x.size());
    std::uint64_t sfo = 0;
    std::size_t k = 0;
    rec.evaluation(0, 0, x, std::nullopt);
    while (sfo < sfo_max && (!cfg.opt.max_iterations || k < *cfg.opt.max_iterations)) {
      const Batch batch = draw_batch(problem, b, rng);
      const Vector g = problem.batch_gradient(x, batch);
      sfo += batch.count;
      std::tie(x, accum) = adagrad_step(x, g, accum, cfg.adagrad_eta, cfg.adagrad_eps);
      rec.plain_iteration(k, sfo, g.norm(), batch.count);
      ++k;
      if (k % every == 0) rec.evaluation(k, sfo, x, std::nullopt);
    }
    if (!rec.rows.back().is_eval_row) rec.evaluation(k, sfo, x, std::nullopt);
    result.x = std::move(x);
    result.iterations = k;
    result.sfo = sfo + sfo_offset;
    result.status = sfo >= sfo_max ? RunStatus::budget_exhausted
                                   : RunStatus::iteration_limit;
  } else {
    const bool storm = is_storm(cfg.algorithm);
    const RadiusRule rule = storm ? RadiusRule{ConstantRule{}} : RadiusRule{PowerRule{}};
    OptConfig opt = cfg.opt;
    opt.sfo_max = sfo_max;
    opt.seed = cfg.seed;
    if (storm) {
      opt.mu0 = cfg.storm_delta0;
      opt.mu_max = cfg.storm_delta_max;
    }

    std::unique_ptr<ModelBuilder> builder;
    std::unique_ptr<TrsSolver> solver;
    switch (cfg.algorithm) {
      case Algorithm::strme_1st:
      case Algorithm::storm_1st:
        builder = std::make_unique<SampledModelBuilder>(problem, sizer,
                                                        ModelOrder::first, cfg.seed);
        solver = std::make_unique<CauchySolver>();
        break;
      case Algorithm::strme_2nd_dogleg:
      case Algorithm::storm_2nd:
        builder = std::make_unique<SampledModelBuilder>(problem, sizer,
                                                        ModelOrder::second, cfg.seed);
        solver = std::make_unique<DoglegSolver>();
        break;
      case Algorithm::strme_lsr1:
      case Algorithm::storm_lsr1:
        builder = std::make_unique<Lsr1ModelBuilder>(problem, sizer, cfg.lsr1, cfg.seed);
        solver = std::make_unique<Lsr1Solver>();
        break;
      case Algorithm::adagrad:
        break;
    }
    std::unique_ptr<Estimator> estimator;
    if (cfg.estimates == EstimatePolicy::shared) {
      estimator = std::make_unique<SharedBatchEstimator>(problem);
    } else {
      estimator = std::make_unique<ResampleEstimator>(problem, sizer, cfg.seed);
    }

    rec.evaluation(0, 0, x0, opt.mu0);
    const RunResult run_result =
        run(problem, *builder, *solver, *estimator, opt, rule, std::move(x0),
            [&](const StepRecord& r, const TrustRegionState& s) {
              rec.iteration(r);
              if (s.k % every == 0) rec.evaluation(s.k, s.sfo_count, s.x, s.mu);
              return true;
            });
    const TrustRegionState& s = run_result.state;
    if (!rec.rows.back().is_eval_row) rec.evaluation(s.k, s.sfo_count, s.x, s.mu);
    result.x = s.x;
    result.iterations = s.k;
    result.sfo = s.sfo_count + sfo_offset;
    result.status = run_result.status;
  }

  result.successes = rec.successes_;
  result.failures = rec.failures_;
  result.rows = std::move(rec.rows);
  const MetricsRow& last = result.rows.back();
  result.final_train_loss = *last.train_loss;
  result.final_test_accuracy = last.test_accuracy;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  if (!cfg.out_dir.empty()) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir / "trace.csv");
    if (!csv) throw IoError("cannot write " + (dir / "trace.csv").string());
    write_trace_csv(csv, result.rows);
    write_summary(cfg, result, dir / "summary.json");
  }
  return result;
}

}  // namespace strme
