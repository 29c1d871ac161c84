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

// Objectives f(x) = E[f(x, xi)] seen through minibatch oracles.
//
// Finite-sum problems (logistic regression, MLP) draw xi uniformly from n
// stored components; a batch is a list of component indices. Population
// problems (the synthetic functions) have no component list; a batch is a
// sample count plus a key that seeds the noise of that batch.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "strme/common.hpp"
#include "strme/data.hpp"
#include "strme/rng.hpp"

namespace strme {

struct Batch {
  std::vector<std::size_t> indices;  // empty for population problems
  std::size_t count = 0;
  std::uint64_t key = 0;  // noise key for population problems

  static Batch of(std::vector<std::size_t> indices);
  static Batch population(std::size_t count, std::uint64_t key);
};

struct Evaluation {
  double value = 0.0;
  Vector grad;
};

class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::size_t dim() const = 0;
  /// Number of components for finite sums, empty for population problems.
  virtual std::optional<std::size_t> components() const = 0;

  /// Mean of f(x, xi) over the batch.
  virtual double batch_value(const Vector& x, const Batch& batch) const = 0;
  virtual Evaluation batch_value_grad(const Vector& x,
                                      const Batch& batch) const = 0;
  Vector batch_gradient(const Vector& x, const Batch& batch) const {
    return batch_value_grad(x, batch).grad;
  }

  virtual bool has_hessian() const { return false; }
  /// Mean component Hessian over the batch; requires has_hessian().
  virtual Matrix batch_hessian(const Vector& x, const Batch& batch) const;

  /// Exact f and grad f; never charged to any budget.
  virtual double full_value(const Vector& x) const = 0;
  virtual Vector full_gradient(const Vector& x) const = 0;

  /// Classification accuracy on the problem's own data, when meaningful.
  virtual std::optional<double> accuracy(const Vector&) const { return {}; }
};

/// Batch covering every component of a finite-sum problem.
Batch full_batch(const Problem& problem);

// ---------------------------------------------------------------------------
// Regularized logistic regression
//
//   f_i(x) = log(1 + exp(-b_i a_i.x)) + lambda/2 |x|^2.

struct LogisticComponent {
  double value = 0.0;
  Vector grad;
  double curvature = 0.0;  // sigma(z)(1 - sigma(z)), z = b_i a_i.x
  SparseRow row;
  double lambda = 0.0;

  /// Component Hessian times v.
  Vector hess_vec(const Vector& v) const;
};

class LogisticProblem final : public Problem {
 public:
  /// Labels must be +-1; {0, 1} labels are mapped to {-1, +1}.
  LogisticProblem(SparseDataset data, double lambda);

  std::size_t dim() const override { return data_.dim(); }
  std::optional<std::size_t> components() const override { return data_.size(); }
  double batch_value(const Vector& x, const Batch& batch) const override;
  Evaluation batch_value_grad(const Vector& x, const Batch& batch) const override;
  bool has_hessian() const override { return true; }
  Matrix batch_hessian(const Vector& x, const Batch& batch) const override;
  double full_value(const Vector& x) const override;
  Vector full_gradient(const Vector& x) const override;
  std::optional<double> accuracy(const Vector& x) const override;

  LogisticComponent evaluate(const Vector& x, std::size_t i) const;

  const SparseDataset& data() const { return data_; }
  double lambda() const { return lambda_; }
  int label(std::size_t i) const { return labels_[i]; }

 private:
  SparseDataset data_;
  std::vector<int> labels_;  // +-1
  double lambda_;
};

// ---------------------------------------------------------------------------
// One-hidden-layer perceptron: sigmoid hidden units, softmax output,
// cross-entropy loss, lambda/2 |x|^2 regularization.
//
// Parameter layout: W1 (hidden x inputs, row-major), b1, W2 (classes x
// hidden, row-major), b2.

struct MlpArchitecture {
  std::size_t inputs = 784;
  std::size_t hidden = 50;
  std::size_t classes = 10;

  std::size_t parameters() const {
    return hidden * inputs + hidden + classes * hidden + classes;
  }
  static MlpArchitecture mnist() { return {}; }
  /// Small network for exhaustive finite-difference checks.
  static MlpArchitecture tiny() { return {4, 2, 2}; }
};

class MlpProblem final : public Problem {
 public:
  MlpProblem(DenseDataset data, MlpArchitecture arch = {}, double lambda = 1e-3);

  std::size_t dim() const override { return arch_.parameters(); }
  std::optional<std::size_t> components() const override { return data_.size(); }
  double batch_value(const Vector& x, const Batch& batch) const override;
  Evaluation batch_value_grad(const Vector& x, const Batch& batch) const override;
  double full_value(const Vector& x) const override;
  Vector full_gradient(const Vector& x) const override;
  std::optional<double> accuracy(const Vector& x) const override;

  const MlpArchitecture& architecture() const { return arch_; }
  const DenseDataset& data() const { return data_; }
  double lambda() const { return lambda_; }

  /// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  Vector initial_point(Rng& rng) const;

 private:
  double sample_loss(const Vector& x, std::size_t i, Vector* grad,
                     std::vector<double>& work) const;

  DenseDataset data_;
  MlpArchitecture arch_;
  double lambda_;
};

// ---------------------------------------------------------------------------
// Synthetic functions with additive Gaussian noise.
//
// A single draw returns f(x) + e and grad f(x) + e_g with e ~ N(0, v_f) and
// e_g ~ N(0, (v_g / d) I), so v_g is the total gradient variance. A batch of
// `count` draws averages them; with `aggregate` set the batch mean noise is
// drawn directly from its exact N(0, v / count) law, which keeps huge batches
// cheap. Noise depends only on (seed, batch key), never on x.

struct NoiseSpec {
  double v_f = 0.0;
  double v_g = 0.0;
  bool aggregate = true;
  std::uint64_t seed = 0;
};

class SyntheticProblem final : public Problem {
 public:
  /// 1/2 x.Q x + c.x with symmetric Q.
  static SyntheticProblem quadratic(Matrix q, Vector c, NoiseSpec noise = {});
  /// (1 - x1)^2 + 100 (x2 - x1^2)^2.
  static SyntheticProblem rosenbrock(NoiseSpec noise = {});

  std::size_t dim() const override { return dim_; }
  std::optional<std::size_t> components() const override { return {}; }
  double batch_value(const Vector& x, const Batch& batch) const override;
  Evaluation batch_value_grad(const Vector& x, const Batch& batch) const override;
  bool has_hessian() const override { return true; }
  /// Noise-free Hessian of the base function.
  Matrix batch_hessian(const Vector& x, const Batch& batch) const override;
  double full_value(const Vector& x) const override;
  Vector full_gradient(const Vector& x) const override;

  /// One noisy draw using the caller's generator.
  Evaluation synthetic_eval(const Vector& x, Rng& rng) const;

  const NoiseSpec& noise() const { return noise_; }
  void set_noise(const NoiseSpec& noise) { noise_ = noise; }

  /// Known minimizer and optimal value, when the base has one.
  std::optional<Vector> minimizer() const { return minimizer_; }
  std::optional<double> f_star() const { return f_star_; }
  /// Largest Hessian eigenvalue (at the minimizer for Rosenbrock).
  double smoothness() const { return smoothness_; }

 private:
  enum class Kind { quadratic, rosenbrock };
  SyntheticProblem(Kind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  double base_value(const Vector& x) const;
  Vector base_gradient(const Vector& x) const;
  double value_noise(const Batch& batch) const;
  Vector gradient_noise(const Batch& batch) const;

  Kind kind_;
  std::size_t dim_;
  Matrix q_;
  Vector c_;
  NoiseSpec noise_;
  std::optional<Vector> minimizer_;
  std::optional<double> f_star_;
  double smoothness_ = 0.0;
};

/// Quadratic with eigenvalues log-spaced in [1, condition], a random
/// orthogonal eigenbasis and a random linear term.
SyntheticProblem make_conditioned_quadratic(std::size_t dim, double condition,
                                            std::uint64_t seed,
                                            NoiseSpec noise = {});

}  // namespace strme
