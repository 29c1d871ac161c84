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

#include "strme/kernels.hpp"
#include "strme/problems.hpp"

namespace strme {
namespace {

// log(1 + exp(u)) without overflow.
double softplus(double u) {
  return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

// 1 / (1 + exp(u)).
double sigmoid_neg(double u) {
  if (u >= 0.0) {
    const double e = std::exp(-u);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(u));
}

void check_batch(const Batch& batch, std::size_t n) {
  if (batch.indices.empty()) throw Error("logistic: empty batch");
  for (std::size_t i : batch.indices) {
    if (i >= n) throw Error("logistic: component index out of range");
  }
}

}  // namespace

Vector LogisticComponent::hess_vec(const Vector& v) const {
  Vector out = lambda * v;
  const double av = kernels::sparse_dot(row.idx, row.val, as_span(v));
  kernels::sparse_axpy(curvature * av, row.idx, row.val, as_span(out));
  return out;
}

LogisticProblem::LogisticProblem(SparseDataset data, double lambda)
    : data_(std::move(data)), lambda_(lambda) {
  if (lambda < 0.0) throw ConfigError("logistic: lambda must be >= 0");
  if (data_.size() == 0) throw ConfigError("logistic: empty dataset");
  bool zero_one = true;
  bool plus_minus = true;
  for (int b : data_.labels()) {
    zero_one = zero_one && (b == 0 || b == 1);
    plus_minus = plus_minus && (b == -1 || b == 1);
  }
  if (!plus_minus && !zero_one) {
    throw ConfigError("logistic: labels must be +-1 or 0/1");
  }
  labels_.reserve(data_.size());
  for (int b : data_.labels()) labels_.push_back(plus_minus ? b : 2 * b - 1);
}

LogisticComponent LogisticProblem::evaluate(const Vector& x,
                                            std::size_t i) const {
  require_same_dim(static_cast<std::size_t>(x.size()), dim(), "logistic");
  if (i >= data_.size()) throw Error("logistic: component index out of range");
  LogisticComponent c;
  c.row = data_.row(i);
  c.lambda = lambda_;
  const double b = labels_[i];
  const double z = b * kernels::sparse_dot(c.row.idx, c.row.val, as_span(x));
  const double s = sigmoid_neg(z);
  c.value = softplus(-z) + 0.5 * lambda_ * x.squaredNorm();
  c.curvature = s * (1.0 - s);
  c.grad = lambda_ * x;
  kernels::sparse_axpy(-b * s, c.row.idx, c.row.val, as_span(c.grad));
  return c;
}

double LogisticProblem::batch_value(const Vector& x, const Batch& batch) const {
  require_same_dim(static_cast<std::size_t>(x.size()), dim(), "logistic");
  check_batch(batch, data_.size());
  double sum = 0.0;
  for (std::size_t i : batch.indices) {
    const SparseRow r = data_.row(i);
    sum += softplus(-labels_[i] * kernels::sparse_dot(r.idx, r.val, as_span(x)));
  }
  return sum / static_cast<double>(batch.indices.size()) +
         0.5 * lambda_ * x.squaredNorm();
}

Evaluation LogisticProblem::batch_value_grad(const Vector& x,
                                             const Batch& batch) const {
  require_same_dim(static_cast<std::size_t>(x.size()), dim(), "logistic");
  check_batch(batch, data_.size());
  const double inv_b = 1.0 / static_cast<double>(batch.indices.size());
  Evaluation out;
  out.grad = Vector::Zero(x.size());
  double sum = 0.0;
  for (std::size_t i : batch.indices) {
    const SparseRow r = data_.row(i);
    const double b = labels_[i];
    const double z = b * kernels::sparse_dot(r.idx, r.val, as_span(x));
    sum += softplus(-z);
    kernels::sparse_axpy(-b * sigmoid_neg(z) * inv_b, r.idx, r.val,
                         as_span(out.grad));
  }
  out.value = sum * inv_b + 0.5 * lambda_ * x.squaredNorm();
  out.grad += lambda_ * x;
  return out;
}

Matrix LogisticProblem::batch_hessian(const Vector& x, const Batch& batch) const {
  require_same_dim(static_cast<std::size_t>(x.size()), dim(), "logistic");
  check_batch(batch, data_.size());
  const double inv_b = 1.0 / static_cast<double>(batch.indices.size());
  Matrix h = Matrix::Zero(x.size(), x.size());
  for (std::size_t i : batch.indices) {
    const SparseRow r = data_.row(i);
    const double z = labels_[i] * kernels::sparse_dot(r.idx, r.val, as_span(x));
    const double s = sigmoid_neg(z);
    const double w = s * (1.0 - s) * inv_b;
    for (std::size_t p = 0; p < r.idx.size(); ++p) {
      for (std::size_t q = 0; q < r.idx.size(); ++q) {
        h(r.idx[p], r.idx[q]) += w * r.val[p] * r.val[q];
      }
    }
  }
  h.diagonal().array() += lambda_;
  return h;
}

double LogisticProblem::full_value(const Vector& x) const {
  return batch_value(x, full_batch(*this));
}

Vector LogisticProblem::full_gradient(const Vector& x) const {
  return batch_value_grad(x, full_batch(*this)).grad;
}

std::optional<double> LogisticProblem::accuracy(const Vector& x) const {
  require_same_dim(static_cast<std::size_t>(x.size()), dim(), "logistic");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const SparseRow r = data_.row(i);
    const int predicted =
        kernels::sparse_dot(r.idx, r.val, as_span(x)) >= 0.0 ? 1 : -1;
    hits += predicted == labels_[i];
  }
  return static_cast<double>(hits) / static_cast<double>(data_.size());
}

}  // namespace strme
