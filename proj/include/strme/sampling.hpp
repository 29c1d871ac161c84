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

// Sample-average models and function estimates with adaptive batch sizes.

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "strme/common.hpp"
#include "strme/lsr1.hpp"
#include "strme/model.hpp"
#include "strme/problems.hpp"
#include "strme/rng.hpp"

namespace strme {

enum class BatchMode { linear_delta, chebyshev };

struct BatchSchedule {
  std::size_t t0 = 0;
  std::size_t b0 = 1;
  std::size_t b_max = std::numeric_limits<std::uint32_t>::max();
  BatchMode mode = BatchMode::linear_delta;
  double scale = 1.0;  // multiplies every computed size before capping

  void validate() const;
};

struct AccuracyParams {
  double kappa_ef = 1.0;
  double kappa_eg = 1.0;
  double eps_f = 1.0;
  double alpha = 0.9;
  double beta = 0.9;
  double v_f = 0.0;
  double v_g = 0.0;

  void validate() const;
};

/// min{b_max, max{t0 k + b0, ceil(1 / delta^2)}}. Throws on delta <= 0.
std::size_t batch_size(std::size_t k, double delta, const BatchSchedule& sched);

struct ChebyshevSizes {
  std::size_t p = 1;  // model sample size
  std::size_t q = 1;  // estimate sample size
};

/// Sample sizes that make the model fully linear with probability alpha and
/// the estimates eps_F-accurate with probability beta (alpha' = sqrt(alpha)).
/// Sizes saturate at `cap`.
ChebyshevSizes chebyshev_sizes(
    const AccuracyParams& acc, double delta,
    std::size_t cap = std::numeric_limits<std::size_t>::max());

/// b distinct indices of [0, n) drawn uniformly (partial Fisher-Yates).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t b, Rng& rng);

/// Batch of size b for either kind of problem; finite sums are capped at n.
Batch draw_batch(const Problem& problem, std::size_t b, Rng& rng);

enum class ModelOrder { first, second };

/// g = batch mean gradient; B = 0 (first) or the batch mean Hessian (second).
QuadraticModel build_model(const Problem& problem, const Vector& x,
                           const Batch& batch, ModelOrder order);

struct EstimatePair {
  double f0 = 0.0;
  double fd = 0.0;
  std::size_t q_used = 0;
};

/// Batch means of f at x and at x_trial over the same batch.
EstimatePair estimate_pair(const Problem& problem, const Vector& x,
                           const Vector& x_trial, const Batch& batch);

/// Model and estimate sizes for iteration k. Without a reference radius only
/// the t0 k + b0 term applies.
struct SampleSizer {
  BatchSchedule schedule;
  std::optional<AccuracyParams> accuracy;  // required in chebyshev mode

  void validate() const;
  std::size_t model_size(std::size_t k, std::optional<double> delta) const;
  std::size_t estimate_size(std::size_t k, std::optional<double> delta) const;
};

// ---------------------------------------------------------------------------
// Collaborators of the optimization driver.

struct ModelSample {
  QuadraticModel model;
  Batch batch;
  std::size_t sfo = 0;  // component gradients charged for the model
};

class ModelBuilder {
 public:
  virtual ~ModelBuilder() = default;
  /// m_k at x. `delta_ref` is the radius known before sampling: mu_k for the
  /// constant rule, the previous radius for the power rule.
  virtual ModelSample build(const Vector& x, std::size_t k,
                            std::optional<double> delta_ref) = 0;
  /// Called once per iteration after the trial step is evaluated, whether
  /// or not it was accepted. Returns the component gradients it charged.
  virtual std::size_t observe_step(const Vector& /*x*/, const Vector& /*d*/,
                                   const ModelSample& /*sample*/) {
    return 0;
  }
};

/// First- or second-order sample-average models.
class SampledModelBuilder final : public ModelBuilder {
 public:
  SampledModelBuilder(const Problem& problem, SampleSizer sizer,
                      ModelOrder order, std::uint64_t seed);
  ModelSample build(const Vector& x, std::size_t k,
                    std::optional<double> delta_ref) override;

 private:
  const Problem& problem_;
  SampleSizer sizer_;
  ModelOrder order_;
  Rng rng_;
};

/// Sample-average gradient with an L-SR1 Hessian. After every iteration the
/// pair s = d, y = g(x + d) - g(x) is offered to the memory, with both
/// gradients taken on the model batch; the second gradient is charged.
///
/// Models alias the builder's memory and are invalidated by observe_step.
class Lsr1ModelBuilder final : public ModelBuilder {
 public:
  Lsr1ModelBuilder(const Problem& problem, SampleSizer sizer,
                   Lsr1Params params, std::uint64_t seed);
  ModelSample build(const Vector& x, std::size_t k,
                    std::optional<double> delta_ref) override;
  std::size_t observe_step(const Vector& x, const Vector& d,
                           const ModelSample& sample) override;

  const Lsr1State& memory() const { return *state_; }
  std::size_t accepted_pairs() const { return accepted_; }
  std::size_t skipped_pairs() const { return skipped_; }

 private:
  const Problem& problem_;
  SampleSizer sizer_;
  std::shared_ptr<Lsr1State> state_;
  Rng rng_;
  std::size_t accepted_ = 0;
  std::size_t skipped_ = 0;
};

class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual EstimatePair estimate(const Vector& x, const Vector& x_trial,
                                const ModelSample& sample, std::size_t k,
                                double delta) = 0;
};

/// f0 and fd on the model batch.
class SharedBatchEstimator final : public Estimator {
 public:
  explicit SharedBatchEstimator(const Problem& problem) : problem_(problem) {}
  EstimatePair estimate(const Vector& x, const Vector& x_trial,
                        const ModelSample& sample, std::size_t k,
                        double delta) override;

 private:
  const Problem& problem_;
};

/// f0 and fd on fresh batches sized for the current radius. With
/// `independent` set, f0 and fd use two separate batches.
class ResampleEstimator final : public Estimator {
 public:
  ResampleEstimator(const Problem& problem, SampleSizer sizer,
                    std::uint64_t seed, bool independent = false);
  EstimatePair estimate(const Vector& x, const Vector& x_trial,
                        const ModelSample& sample, std::size_t k,
                        double delta) override;

 private:
  const Problem& problem_;
  SampleSizer sizer_;
  Rng rng_;
  bool independent_;
};

}  // namespace strme
