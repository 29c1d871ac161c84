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

#include "strme/problems.hpp"

namespace strme {
namespace {

Rng noise_stream(std::uint64_t seed, std::uint64_t key, std::string_view what) {
  return Rng(mix_seed(mix_seed(seed, key), hash_name(what)));
}

}  // namespace

SyntheticProblem SyntheticProblem::quadratic(Matrix q, Vector c,
                                             NoiseSpec noise) {
  if (q.rows() != q.cols() || q.rows() == 0) {
    throw DimensionError("quadratic: Q must be square and nonempty");
  }
  require_same_dim(static_cast<std::size_t>(q.rows()),
                   static_cast<std::size_t>(c.size()), "quadratic");
  if ((q - q.transpose()).norm() > 1e-12 * std::max(1.0, q.norm())) {
    throw ConfigError("quadratic: Q must be symmetric");
  }
  SyntheticProblem p(Kind::quadratic, static_cast<std::size_t>(q.rows()));
  p.noise_ = noise;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
  const Vector& ev = eig.eigenvalues();
  p.smoothness_ = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
  if (ev.minCoeff() > 0.0) {
    Vector xs = -eig.eigenvectors() *
                (eig.eigenvectors().transpose() * c).cwiseQuotient(ev);
    p.f_star_ = 0.5 * c.dot(xs);
    p.minimizer_ = std::move(xs);
  }
  p.q_ = std::move(q);
  p.c_ = std::move(c);
  return p;
}

SyntheticProblem SyntheticProblem::rosenbrock(NoiseSpec noise) {
  SyntheticProblem p(Kind::rosenbrock, 2);
  p.noise_ = noise;
  p.minimizer_ = Vector::Ones(2);
  p.f_star_ = 0.0;
  p.smoothness_ = Eigen::SelfAdjointEigenSolver<Matrix>(
                      p.batch_hessian(Vector::Ones(2), Batch{}))
                      .eigenvalues()
                      .maxCoeff();
  return p;
}

double SyntheticProblem::base_value(const Vector& x) const {
  require_same_dim(static_cast<std::size_t>(x.size()), dim_, "synthetic");
  if (kind_ == Kind::quadratic) return 0.5 * x.dot(q_ * x) + c_.dot(x);
  const double a = 1.0 - x[0];
  const double b = x[1] - x[0] * x[0];
  return a * a + 100.0 * b * b;
}

Vector SyntheticProblem::base_gradient(const Vector& x) const {
  require_same_dim(static_cast<std::size_t>(x.size()), dim_, "synthetic");
  if (kind_ == Kind::quadratic) return q_ * x + c_;
  const double b = x[1] - x[0] * x[0];
  Vector g(2);
  g << -2.0 * (1.0 - x[0]) - 400.0 * x[0] * b, 200.0 * b;
  return g;
}

double SyntheticProblem::value_noise(const Batch& batch) const {
  if (batch.count == 0) throw Error("synthetic: empty batch");
  if (noise_.v_f == 0.0) return 0.0;
  Rng rng = noise_stream(noise_.seed, batch.key, "value");
  std::normal_distribution<double> normal;
  const auto count = static_cast<double>(batch.count);
  if (noise_.aggregate) return std::sqrt(noise_.v_f / count) * normal(rng);
  double sum = 0.0;
  for (std::size_t j = 0; j < batch.count; ++j) sum += normal(rng);
  return std::sqrt(noise_.v_f) * sum / count;
}

Vector SyntheticProblem::gradient_noise(const Batch& batch) const {
  if (batch.count == 0) throw Error("synthetic: empty batch");
  Vector e = Vector::Zero(dim_);
  if (noise_.v_g == 0.0) return e;
  Rng rng = noise_stream(noise_.seed, batch.key, "gradient");
  std::normal_distribution<double> normal;
  const auto count = static_cast<double>(batch.count);
  const double sd = std::sqrt(noise_.v_g / static_cast<double>(dim_));
  if (noise_.aggregate) {
    const double scale = sd / std::sqrt(count);
    for (std::size_t i = 0; i < dim_; ++i) e[i] = scale * normal(rng);
    return e;
  }
  for (std::size_t j = 0; j < batch.count; ++j) {
    for (std::size_t i = 0; i < dim_; ++i) e[i] += normal(rng);
  }
  return e * (sd / count);
}

double SyntheticProblem::batch_value(const Vector& x, const Batch& batch) const {
  return base_value(x) + value_noise(batch);
}

Evaluation SyntheticProblem::batch_value_grad(const Vector& x,
                                              const Batch& batch) const {
  return {base_value(x) + value_noise(batch),
          base_gradient(x) + gradient_noise(batch)};
}

Matrix SyntheticProblem::batch_hessian(const Vector& x, const Batch&) const {
  require_same_dim(static_cast<std::size_t>(x.size()), dim_, "synthetic");
  if (kind_ == Kind::quadratic) return q_;
  Matrix h(2, 2);
  h << 2.0 - 400.0 * x[1] + 1200.0 * x[0] * x[0], -400.0 * x[0],
      -400.0 * x[0], 200.0;
  return h;
}

double SyntheticProblem::full_value(const Vector& x) const {
  return base_value(x);
}

Vector SyntheticProblem::full_gradient(const Vector& x) const {
  return base_gradient(x);
}

Evaluation SyntheticProblem::synthetic_eval(const Vector& x, Rng& rng) const {
  std::normal_distribution<double> normal;
  Evaluation out{base_value(x), base_gradient(x)};
  out.value += std::sqrt(noise_.v_f) * normal(rng);
  const double sd = std::sqrt(noise_.v_g / static_cast<double>(dim_));
  for (std::size_t i = 0; i < dim_; ++i) out.grad[i] += sd * normal(rng);
  return out;
}

SyntheticProblem make_conditioned_quadratic(std::size_t dim, double condition,
                                            std::uint64_t seed,
                                            NoiseSpec noise) {
  if (dim == 0) throw ConfigError("quadratic: dimension must be positive");
  if (!(condition >= 1.0)) throw ConfigError("quadratic: condition must be >= 1");
  Rng rng = make_stream(seed, "conditioned-quadratic");
  std::normal_distribution<double> normal;
  Matrix z(dim, dim);
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, j) = normal(rng);
  }
  const Matrix basis = Eigen::HouseholderQR<Matrix>(z).householderQ();
  Vector ev(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double t = dim == 1 ? 0.0 : static_cast<double>(i) / (dim - 1);
    ev[i] = std::pow(condition, t);
  }
  Matrix q = basis * ev.asDiagonal() * basis.transpose();
  q = 0.5 * (q + q.transpose()).eval();
  Vector c(dim);
  for (std::size_t i = 0; i < dim; ++i) c[i] = normal(rng);
  return SyntheticProblem::quadratic(std::move(q), std::move(c), noise);
}

}  // namespace strme
