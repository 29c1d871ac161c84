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
#include <memory>

#include "doctest.h"
#include "oracles.hpp"
#include "strme/core.hpp"
#include "strme/data.hpp"
#include "strme/kernels.hpp"
#include "strme/lsr1.hpp"
#include "strme/problems.hpp"
#include "strme/sampling.hpp"
#include "strme/subproblem.hpp"

using namespace strme;

namespace {

const LogisticProblem& small_logistic() {
  static const LogisticProblem p(
      load_libsvm(std::string(STRME_DATA_DIR) + "/synthetic_200x20.svm"), 1e-3);
  return p;
}

// g = grad f(x) and B = the true Hessian of a noise-free quadratic.
class ExactQuadraticBuilder final : public ModelBuilder {
 public:
  explicit ExactQuadraticBuilder(const SyntheticProblem& p) : p_(p) {}
  ModelSample build(const Vector& x, std::size_t, std::optional<double>) override {
    const Batch b = Batch::population(1, 0);
    return {{p_.full_gradient(x), HessianOperator::dense(p_.batch_hessian(x, b)),
             p_.full_value(x)},
            b,
            1};
  }

 private:
  const SyntheticProblem& p_;
};

class ExactEstimator final : public Estimator {
 public:
  explicit ExactEstimator(const Problem& p) : p_(p) {}
  EstimatePair estimate(const Vector& x, const Vector& xt, const ModelSample&,
                        std::size_t, double) override {
    return {p_.full_value(x), p_.full_value(xt), 1};
  }

 private:
  const Problem& p_;
};

struct Captured {
  RunResult result;
  std::vector<Vector> before;  // iterate at the start of each iteration
  std::vector<Vector> after;
};

Captured run_logistic(const RadiusRule& rule, bool lsr1, std::uint64_t seed,
                      std::uint64_t sfo_max = 20000) {
  const LogisticProblem& p = small_logistic();
  SampleSizer sizer;
  sizer.schedule.t0 = 2;
  sizer.schedule.b0 = 8;
  std::unique_ptr<ModelBuilder> builder;
  std::unique_ptr<TrsSolver> solver;
  if (lsr1) {
    builder = std::make_unique<Lsr1ModelBuilder>(p, sizer, Lsr1Params{}, seed);
    solver = std::make_unique<Lsr1Solver>();
  } else {
    builder = std::make_unique<SampledModelBuilder>(p, sizer, ModelOrder::first, seed);
    solver = std::make_unique<CauchySolver>();
  }
  SharedBatchEstimator estimator(p);
  OptConfig cfg;
  cfg.sfo_max = sfo_max;
  cfg.seed = seed;
  cfg.mu_max = 50.0;
  if (is_constant_rule(rule)) cfg.eta2 = 1e-3;
  Captured c;
  Vector x = Vector::Zero(p.dim());
  c.result = run(p, *builder, *solver, estimator, cfg, rule, x,
                 [&](const StepRecord&, const TrustRegionState& st) {
                   c.before.push_back(x);
                   c.after.push_back(st.x);
                   x = st.x;
                   return true;
                 });
  return c;
}

}  // namespace

TEST_CASE("radius follows the configured rule") {
  CHECK(radius(PowerRule{1, 1}, 2.0, 3.0) == 6.0);
  CHECK(radius(ConstantRule{}, 0.7, 100.0) == 0.7);
  CHECK(radius(PowerRule{1, 0.5}, 1.0, 4.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(radius(PowerRule{1, 1}, 3.0, 0.0) == 0.0);

  Rng rng = make_stream(1, "radius");
  std::uniform_real_distribution<double> u(1e-6, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double mu = u(rng);
    const double g = u(rng);
    CHECK(radius(PowerRule{}, mu, g) == mu * g);
  }
}

TEST_CASE("pred_reduction is the model decrease") {
  Vector g(2);
  g << 1, 0;
  Vector d(2);
  d << -1, 0;
  CHECK(pred_reduction({g, HessianOperator::zero(2), {}}, d) == 1.0);

  g << 2, 0;
  d << -2, 0;
  CHECK(pred_reduction({g, HessianOperator::dense(Matrix::Identity(2, 2)), {}}, d) == 2.0);

  Rng rng = make_stream(2, "pred");
  for (int t = 0; t < 20; ++t) {
    const Vector gr = strme::testing::gaussian_vector(5, rng);
    const Matrix a = strme::testing::gaussian_matrix(5, 5, rng);
    const Matrix b = 0.5 * (a + a.transpose());
    const Vector x = strme::testing::gaussian_vector(5, rng);
    const Vector dr = strme::testing::gaussian_vector(5, rng);
    const double f0 = 0.3;
    auto m = [&](const Vector& z) {
      const Vector s = z - x;
      return f0 + gr.dot(s) + 0.5 * s.dot(b * s);
    };
    const double expected = m(x) - m(x + dr);
    const double got = pred_reduction({gr, HessianOperator::dense(b), f0}, dr);
    CHECK(std::abs(got - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
  }

  CHECK_THROWS_AS(pred_reduction({g, HessianOperator::zero(2), {}}, Vector::Zero(3)),
                  DimensionError);
}

TEST_CASE("ratio") {
  CHECK(ratio(10, 9.8, 1.0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(ratio(5, 5, 2) == 0.0);
  CHECK_THROWS_AS(ratio(1, 3, 0), SubproblemContractError);
  CHECK_THROWS_AS(ratio(1, 3, -1e-9), SubproblemContractError);
}

TEST_CASE("accept_update") {
  OptConfig cfg;  // gamma 2, eta1 0.1, mu_max 1000
  TrustRegionState st;
  st.x = Vector::Ones(2);
  st.mu = 1.0;
  const Vector d = Vector::Constant(2, 0.5);

  SUBCASE("success expands mu and moves x") {
    const auto next = accept_update(0.2, 1.0, 1.0, st, cfg, PowerRule{}, d);
    CHECK(next.last_success);
    CHECK(next.mu == 2.0);
    CHECK(next.x == st.x + d);
    CHECK(next.k == 1);
  }
  SUBCASE("failure shrinks mu and keeps x") {
    const auto next = accept_update(0.05, 1.0, 1.0, st, cfg, PowerRule{}, d);
    CHECK_FALSE(next.last_success);
    CHECK(next.mu == 0.5);
    CHECK(next.x == st.x);
    CHECK(next.k == 1);
  }
  SUBCASE("mu is clamped at mu_max") {
    st.mu = 800;
    CHECK(accept_update(0.5, 1.0, 1.0, st, cfg, PowerRule{}, d).mu == 1000.0);
  }
  SUBCASE("the constant rule adds the gradient test") {
    cfg.eta2 = 0.5;
    CHECK_FALSE(accept_update(0.9, 0.4, 1.0, st, cfg, ConstantRule{}, d).last_success);
    CHECK(accept_update(0.9, 0.5, 1.0, st, cfg, ConstantRule{}, d).last_success);
  }
  SUBCASE("the power rule applies no gradient test") {
    cfg.eta2 = 1e-3;
    CHECK(accept_update(0.9, 1e-9, 1.0, st, cfg, PowerRule{}, d).last_success);
  }
}

TEST_CASE("OptConfig validation") {
  OptConfig cfg;
  CHECK_NOTHROW(cfg.validate(PowerRule{}));
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(cfg.validate(PowerRule{}), ConfigError);
  cfg = {};
  cfg.eta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(PowerRule{}), ConfigError);
  cfg = {};
  cfg.mu0 = 2e3;
  CHECK_THROWS_AS(cfg.validate(PowerRule{}), ConfigError);
  cfg = {};
  cfg.eta2 = 1e-2;  // needs mu_max <= 100
  CHECK_THROWS_AS(cfg.validate(PowerRule{}), ConfigError);
  CHECK_NOTHROW(cfg.validate(ConstantRule{}));
  cfg.mu_max = 100.0;
  CHECK_NOTHROW(cfg.validate(PowerRule{}));
}

TEST_CASE("Hessian operators are symmetric") {
  Rng rng = make_stream(3, "symmetry");
  const Matrix a = strme::testing::gaussian_matrix(6, 6, rng);
  const HessianOperator dense = HessianOperator::dense(a + a.transpose());
  auto state = std::make_shared<Lsr1State>(6);
  for (int i = 0; i < 4; ++i) {
    state->try_update(strme::testing::gaussian_vector(6, rng),
                      strme::testing::gaussian_vector(6, rng));
  }
  const HessianOperator compact = HessianOperator::lsr1(state);
  for (const HessianOperator* op : {&dense, &compact}) {
    for (int t = 0; t < 10; ++t) {
      const Vector u = strme::testing::gaussian_vector(6, rng);
      const Vector v = strme::testing::gaussian_vector(6, rng);
      const double l = u.dot(op->apply(v));
      const double r = v.dot(op->apply(u));
      CHECK(std::abs(l - r) <= 1e-10 * std::max(1.0, std::abs(l)));
    }
  }
  CHECK(HessianOperator::zero(6).apply(Vector::Ones(6)) == Vector::Zero(6));
}

TEST_CASE("exact model on its own quadratic: every step succeeds with rho = 1") {
  const SyntheticProblem p =
      SyntheticProblem::quadratic(Matrix::Identity(3, 3), Vector::Zero(3));
  ExactQuadraticBuilder builder(p);
  ExactEstimator estimator(p);
  const DoglegSolver solver;
  OptConfig cfg;
  cfg.mu0 = 0.25;
  cfg.sfo_max = 30;
  Vector x0(3);
  x0 << 1, -2, 3;
  const RunResult r = run(p, builder, solver, estimator, cfg, PowerRule{}, x0);
  REQUIRE(!r.trace.empty());
  double prev = x0.norm();
  for (const StepRecord& rec : r.trace) {
    CHECK(rec.success);
    CHECK(rec.rho == doctest::Approx(1.0).epsilon(1e-10));
    // Step length mu |g| with mu doubling until the Newton step fits.
    CHECK(rec.grad_norm <= prev);
    prev = rec.grad_norm;
  }
  // The Newton step lands on the minimizer, so the run ends on a zero model
  // gradient.
  CHECK(r.status == RunStatus::zero_gradient);
  CHECK(r.state.x.norm() == 0.0);
}

TEST_CASE("exact model with a short radius converges geometrically") {
  const SyntheticProblem p = make_conditioned_quadratic(4, 10.0, 5);
  ExactQuadraticBuilder builder(p);
  ExactEstimator estimator(p);
  const DoglegSolver solver;
  OptConfig cfg;
  cfg.mu0 = 0.01;
  cfg.mu_max = 0.05;  // never long enough for the Newton step
  cfg.sfo_max = 60;
  const RunResult r = run(p, builder, solver, estimator, cfg, PowerRule{}, Vector::Ones(4));
  REQUIRE(r.trace.size() == 60);
  for (const StepRecord& rec : r.trace) {
    CHECK(rec.success);
    CHECK(rec.rho == doctest::Approx(1.0).epsilon(1e-10));
  }
  // Contraction of at least 1 - mu_max * lambda_min per step.
  CHECK(r.trace.back().grad_norm <= std::pow(1.0 - 0.05, 50) * r.trace.front().grad_norm);
}

TEST_CASE("zero budget leaves the initial state") {
  const LogisticProblem& p = small_logistic();
  SampledModelBuilder builder(p, {}, ModelOrder::first, 1);
  SharedBatchEstimator estimator(p);
  OptConfig cfg;
  cfg.sfo_max = 0;
  const Vector x0 = Vector::Constant(p.dim(), 0.1);
  const RunResult r = run(p, builder, CauchySolver{}, estimator, cfg, PowerRule{}, x0);
  CHECK(r.trace.empty());
  CHECK(r.state.x == x0);
  CHECK(r.state.k == 0);
  CHECK(r.state.sfo_count == 0);
  CHECK(r.status == RunStatus::budget_exhausted);
}

TEST_CASE("a zero model gradient stops the run") {
  const SyntheticProblem p =
      SyntheticProblem::quadratic(Matrix::Identity(2, 2), Vector::Ones(2));
  SampledModelBuilder builder(p, {}, ModelOrder::first, 1);
  ExactEstimator estimator(p);
  OptConfig cfg;
  cfg.sfo_max = 100;
  const RunResult r =
      run(p, builder, CauchySolver{}, estimator, cfg, PowerRule{}, -Vector::Ones(2));
  CHECK(r.status == RunStatus::zero_gradient);
  CHECK(r.trace.empty());
}

TEST_CASE("iteration limit and observer stop") {
  const LogisticProblem& p = small_logistic();
  SampledModelBuilder builder(p, {}, ModelOrder::first, 1);
  SharedBatchEstimator estimator(p);
  OptConfig cfg;
  cfg.sfo_max = 1000000;
  cfg.max_iterations = 7;
  RunResult r = run(p, builder, CauchySolver{}, estimator, cfg, PowerRule{},
                    Vector::Zero(p.dim()));
  CHECK(r.status == RunStatus::iteration_limit);
  CHECK(r.trace.size() == 7);

  cfg.max_iterations.reset();
  r = run(p, builder, CauchySolver{}, estimator, cfg, PowerRule{}, Vector::Zero(p.dim()),
          [](const StepRecord& rec, const TrustRegionState&) { return rec.k < 4; });
  CHECK(r.status == RunStatus::stopped);
  CHECK(r.trace.size() == 5);
}

TEST_CASE("trace invariants") {
  for (const bool lsr1 : {false, true}) {
    for (const RadiusRule rule : {RadiusRule{PowerRule{}}, RadiusRule{ConstantRule{}}}) {
      CAPTURE(lsr1);
      CAPTURE(is_constant_rule(rule));
      const Captured c = run_logistic(rule, lsr1, 17);
      const auto& trace = c.result.trace;
      REQUIRE(trace.size() > 20);
      OptConfig cfg;
      cfg.mu_max = 50.0;
      std::uint64_t sfo = 0;
      std::size_t failures = 0;
      for (std::size_t i = 0; i < trace.size(); ++i) {
        const StepRecord& rec = trace[i];
        CHECK(rec.k == i);
        CHECK(rec.delta == radius(rule, rec.mu_before, rec.grad_norm));
        if (!is_constant_rule(rule)) CHECK(rec.delta == rec.mu_before * rec.grad_norm);
        bool expect = rec.rho >= cfg.eta1;
        if (is_constant_rule(rule)) expect = expect && rec.grad_norm >= 1e-3 * rec.delta;
        CHECK(rec.success == expect);
        if (rec.success) {
          CHECK(rec.mu_after == std::min(cfg.gamma * rec.mu_before, cfg.mu_max));
        } else {
          CHECK(rec.mu_after == rec.mu_before / cfg.gamma);
          CHECK(c.after[i] == c.before[i]);
          ++failures;
        }
        CHECK(rec.mu_after > 0.0);
        CHECK(rec.mu_after <= cfg.mu_max);
        // Charged: the model batch, plus the y batch for L-SR1.
        const std::uint64_t charged = rec.batch_size_used * (lsr1 ? 2 : 1);
        CHECK(rec.sfo_after == sfo + charged);
        sfo = rec.sfo_after;
        CHECK(rec.pred > 0.0);
      }
      CHECK(failures > 0);
      CHECK(failures < trace.size());
      // The budget is overrun by at most one iteration.
      CHECK(c.result.state.sfo_count >= 20000);
      CHECK(c.result.state.sfo_count - trace.back().batch_size_used * (lsr1 ? 2 : 1) < 20000);
    }
  }
}

TEST_CASE("runs are deterministic") {
  for (const bool lsr1 : {false, true}) {
    const Captured a = run_logistic(PowerRule{}, lsr1, 5);
    const Captured b = run_logistic(PowerRule{}, lsr1, 5);
    REQUIRE(a.result.trace.size() == b.result.trace.size());
    for (std::size_t i = 0; i < a.result.trace.size(); ++i) {
      const StepRecord& x = a.result.trace[i];
      const StepRecord& y = b.result.trace[i];
      CHECK(x.delta == y.delta);
      CHECK(x.rho == y.rho);
      CHECK(x.mu_after == y.mu_after);
      CHECK(x.batch_size_used == y.batch_size_used);
      CHECK(a.after[i] == b.after[i]);
    }
    const Captured other = run_logistic(PowerRule{}, lsr1, 6);
    CHECK(other.result.state.x != a.result.state.x);
  }
}

TEST_CASE("the constant rule matches a reference STORM loop") {
  const LogisticProblem& p = small_logistic();
  strme::testing::ReferenceStormParams ref;
  ref.t0 = 3;
  ref.b0 = 5;
  ref.b_max = 150;
  ref.seed = 77;
  ref.iterations = 60;
  const kernels::Isa isa = kernels::active_isa();
  kernels::force_isa(kernels::Isa::scalar);
  const auto expected = strme::testing::reference_storm(p, Vector::Zero(p.dim()), ref);

  SampleSizer sizer;
  sizer.schedule.t0 = ref.t0;
  sizer.schedule.b0 = ref.b0;
  sizer.schedule.b_max = ref.b_max;
  SampledModelBuilder builder(p, sizer, ModelOrder::first, ref.seed);
  SharedBatchEstimator estimator(p);
  OptConfig cfg;
  cfg.eta2 = ref.eta2;
  cfg.mu0 = ref.delta0;
  cfg.mu_max = ref.delta_max;
  cfg.sfo_max = std::numeric_limits<std::uint64_t>::max();
  cfg.max_iterations = ref.iterations;
  std::vector<Vector> xs;
  const RunResult r = run(p, builder, CauchySolver{}, estimator, cfg, ConstantRule{},
                          Vector::Zero(p.dim()),
                          [&](const StepRecord&, const TrustRegionState& st) {
                            xs.push_back(st.x);
                            return true;
                          });
  kernels::force_isa(isa);
  REQUIRE(r.trace.size() == expected.delta.size());
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].delta == expected.delta[k]);
    CHECK(r.trace[k].success == expected.success[k]);
    if (k + 1 < expected.x.size()) CHECK(xs[k] == expected.x[k + 1]);
  }
}
