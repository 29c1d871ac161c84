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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "strme/sampling.hpp"

namespace strme {
namespace {

// ceil(v) as a count in [1, cap]. The tiny relative shave keeps values such
// as 1 / (1 - 0.9) = 10.000000000000002 from rounding up to 11.
std::size_t ceil_count(double v, std::size_t cap) {
  if (std::isnan(v)) throw Error("batch size is NaN");
  const double shaved = v - 1e-12 * std::abs(v);
  if (!(shaved < static_cast<double>(cap))) return cap;
  return std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(std::max(shaved, 1.0))), 1, cap);
}

void require_positive_delta(double delta) {
  if (!(delta > 0.0)) throw Error("batch size: delta must be positive");
}

}  // namespace

void BatchSchedule::validate() const {
  if (b0 < 1) throw ConfigError("batch schedule: b0 must be >= 1");
  if (b_max < b0) throw ConfigError("batch schedule: b_max must be >= b0");
  if (!(scale > 0.0)) throw ConfigError("batch schedule: scale must be positive");
}

void AccuracyParams::validate() const {
  if (!(kappa_ef > 0.0 && kappa_eg > 0.0 && eps_f > 0.0)) {
    throw ConfigError("accuracy: kappa_ef, kappa_eg and eps_F must be positive");
  }
  if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0)) {
    throw ConfigError("accuracy: alpha and beta must lie in (0, 1)");
  }
  if (!(v_f >= 0.0 && v_g >= 0.0)) {
    throw ConfigError("accuracy: variance bounds must be >= 0");
  }
}

std::size_t batch_size(std::size_t k, double delta, const BatchSchedule& sched) {
  require_positive_delta(delta);
  const double linear = static_cast<double>(sched.t0) * static_cast<double>(k) +
                        static_cast<double>(sched.b0);
  const double inv = static_cast<double>(
      ceil_count(1.0 / (delta * delta), std::numeric_limits<std::size_t>::max()));
  return ceil_count(sched.scale * std::max(linear, inv), sched.b_max);
}

ChebyshevSizes chebyshev_sizes(const AccuracyParams& acc, double delta,
                               std::size_t cap) {
  require_positive_delta(delta);
  acc.validate();
  const double alpha1 = std::sqrt(acc.alpha);
  const double d2 = delta * delta;
  const double d4 = d2 * d2;
  const double p = std::max(
      acc.v_f / ((1.0 - alpha1) * acc.kappa_ef * acc.kappa_ef * d4),
      acc.v_g / ((1.0 - alpha1) * acc.kappa_eg * acc.kappa_eg * d2));
  const double q = acc.v_f / ((1.0 - acc.beta) * acc.eps_f * acc.eps_f * d4);
  return {ceil_count(p, cap), ceil_count(q, cap)};
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t b, Rng& rng) {
  if (b < 1 || b > n) throw Error("sample_indices: need 1 <= b <= n");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < b; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(b);
  return pool;
}

Batch draw_batch(const Problem& problem, std::size_t b, Rng& rng) {
  if (const auto n = problem.components()) {
    return Batch::of(sample_indices(*n, std::min(b, *n), rng));
  }
  return Batch::population(b, rng());
}

QuadraticModel build_model(const Problem& problem, const Vector& x,
                           const Batch& batch, ModelOrder order) {
  Evaluation e = problem.batch_value_grad(x, batch);
  if (!std::isfinite(e.value) || !e.grad.allFinite()) {
    throw Error("model: non-finite sample average");
  }
  if (order == ModelOrder::first) {
    return {std::move(e.grad), HessianOperator::zero(problem.dim()), e.value};
  }
  if (!problem.has_hessian()) throw Error("model: problem has no Hessian");
  return {std::move(e.grad),
          HessianOperator::dense(problem.batch_hessian(x, batch)), e.value};
}

EstimatePair estimate_pair(const Problem& problem, const Vector& x,
                           const Vector& x_trial, const Batch& batch) {
  return {problem.batch_value(x, batch), problem.batch_value(x_trial, batch),
          batch.count};
}

void SampleSizer::validate() const {
  schedule.validate();
  if (schedule.mode == BatchMode::chebyshev) {
    if (!accuracy) throw ConfigError("chebyshev batches need accuracy parameters");
    accuracy->validate();
  }
}

std::size_t SampleSizer::model_size(std::size_t k,
                                    std::optional<double> delta) const {
  const BatchSchedule& s = schedule;
  if (!delta) {
    const double linear =
        static_cast<double>(s.t0) * static_cast<double>(k) + static_cast<double>(s.b0);
    return ceil_count(s.scale * linear, s.b_max);
  }
  if (s.mode == BatchMode::linear_delta) return batch_size(k, *delta, s);
  const double p = static_cast<double>(chebyshev_sizes(*accuracy, *delta).p);
  return ceil_count(s.scale * std::max(p, static_cast<double>(s.b0)), s.b_max);
}

std::size_t SampleSizer::estimate_size(std::size_t k,
                                       std::optional<double> delta) const {
  if (!delta || schedule.mode == BatchMode::linear_delta) {
    return model_size(k, delta);
  }
  const double q = static_cast<double>(chebyshev_sizes(*accuracy, *delta).q);
  return ceil_count(schedule.scale * std::max(q, static_cast<double>(schedule.b0)),
                    schedule.b_max);
}

SampledModelBuilder::SampledModelBuilder(const Problem& problem,
                                         SampleSizer sizer, ModelOrder order,
                                         std::uint64_t seed)
    : problem_(problem),
      sizer_(std::move(sizer)),
      order_(order),
      rng_(make_stream(seed, "model-batch")) {
  sizer_.validate();
}

ModelSample SampledModelBuilder::build(const Vector& x, std::size_t k,
                                       std::optional<double> delta_ref) {
  Batch batch = draw_batch(problem_, sizer_.model_size(k, delta_ref), rng_);
  QuadraticModel model = build_model(problem_, x, batch, order_);
  const std::size_t sfo = batch.count;
  return {std::move(model), std::move(batch), sfo};
}

Lsr1ModelBuilder::Lsr1ModelBuilder(const Problem& problem, SampleSizer sizer,
                                   Lsr1Params params, std::uint64_t seed)
    : problem_(problem),
      sizer_(std::move(sizer)),
      state_(std::make_shared<Lsr1State>(problem.dim(), params)),
      rng_(make_stream(seed, "model-batch")) {
  sizer_.validate();
}

ModelSample Lsr1ModelBuilder::build(const Vector& x, std::size_t k,
                                    std::optional<double> delta_ref) {
  ModelSample out{{Vector(), HessianOperator::lsr1(state_), std::nullopt}, {}, 0};
  out.batch = draw_batch(problem_, sizer_.model_size(k, delta_ref), rng_);
  Evaluation e = problem_.batch_value_grad(x, out.batch);
  if (!std::isfinite(e.value) || !e.grad.allFinite()) {
    throw Error("model: non-finite sample average");
  }
  out.model.g = std::move(e.grad);
  out.model.f0 = e.value;
  out.sfo = out.batch.count;
  return out;
}

std::size_t Lsr1ModelBuilder::observe_step(const Vector& x, const Vector& d,
                                           const ModelSample& sample) {
  const Vector g_trial = problem_.batch_gradient(x + d, sample.batch);
  if (d.norm() > 0.0 && g_trial.allFinite()) {
    if (state_->try_update(d, g_trial - sample.model.g)) {
      ++accepted_;
    } else {
      ++skipped_;
    }
  }
  return sample.batch.count;
}

EstimatePair SharedBatchEstimator::estimate(const Vector& x,
                                            const Vector& x_trial,
                                            const ModelSample& sample,
                                            std::size_t, double) {
  // The model already holds the batch mean at x.
  if (sample.model.f0) {
    return {*sample.model.f0, problem_.batch_value(x_trial, sample.batch),
            sample.batch.count};
  }
  return estimate_pair(problem_, x, x_trial, sample.batch);
}

ResampleEstimator::ResampleEstimator(const Problem& problem, SampleSizer sizer,
                                     std::uint64_t seed, bool independent)
    : problem_(problem),
      sizer_(std::move(sizer)),
      rng_(make_stream(seed, "estimate-batch")),
      independent_(independent) {
  sizer_.validate();
}

EstimatePair ResampleEstimator::estimate(const Vector& x, const Vector& x_trial,
                                         const ModelSample&, std::size_t k,
                                         double delta) {
  const std::size_t q = sizer_.estimate_size(k, delta);
  const Batch b0 = draw_batch(problem_, q, rng_);
  if (!independent_) return estimate_pair(problem_, x, x_trial, b0);
  const Batch b1 = draw_batch(problem_, q, rng_);
  return {problem_.batch_value(x, b0), problem_.batch_value(x_trial, b1),
          b0.count};
}

}  // namespace strme
