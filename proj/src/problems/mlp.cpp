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

#include "strme/kernels.hpp"
#include "strme/problems.hpp"

namespace strme {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

MlpProblem::MlpProblem(DenseDataset data, MlpArchitecture arch, double lambda)
    : data_(std::move(data)), arch_(arch), lambda_(lambda) {
  if (lambda < 0.0) throw ConfigError("mlp: lambda must be >= 0");
  if (data_.size() == 0) throw ConfigError("mlp: empty dataset");
  require_same_dim(data_.features, arch_.inputs, "mlp input layer");
  for (int label : data_.labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= arch_.classes) {
      throw ConfigError("mlp: label outside the class range");
    }
  }
}

// Cross-entropy of sample i; accumulates its gradient into `grad` when given.
// `work` holds z1/h (hidden), z2/p (classes) and dh (hidden).
double MlpProblem::sample_loss(const Vector& x, std::size_t i, Vector* grad,
                               std::vector<double>& work) const {
  const std::size_t in = arch_.inputs;
  const std::size_t hid = arch_.hidden;
  const std::size_t cls = arch_.classes;
  const std::size_t w1_off = 0;
  const std::size_t b1_off = hid * in;
  const std::size_t w2_off = b1_off + hid;
  const std::size_t b2_off = w2_off + cls * hid;

  const std::span<const double> params = as_span(x);
  const std::span<const double> a = data_.row(i);
  work.resize(2 * hid + cls);
  std::span<double> h(work.data(), hid);
  std::span<double> p(work.data() + hid, cls);
  std::span<double> dh(work.data() + hid + cls, hid);

  kernels::gemv(params.subspan(w1_off, hid * in), hid, in, a,
                params.data() + b1_off, h);
  for (double& v : h) v = sigmoid(v);
  kernels::gemv(params.subspan(w2_off, cls * hid), cls, hid, h,
                params.data() + b2_off, p);

  const auto label = static_cast<std::size_t>(data_.labels[i]);
  const double zmax = *std::max_element(p.begin(), p.end());
  const double z_label = p[label] - zmax;
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - zmax);
    sum += v;
  }
  const double loss = std::log(sum) - z_label;
  if (grad == nullptr) return loss;

  for (double& v : p) v /= sum;
  p[label] -= 1.0;
  std::span<double> g = as_span(*grad);
  kernels::ger(1.0, p, h, g.subspan(w2_off, cls * hid));
  kernels::axpy(1.0, p, g.subspan(b2_off, cls));
  std::fill(dh.begin(), dh.end(), 0.0);
  kernels::gemv_t_acc(params.subspan(w2_off, cls * hid), cls, hid, p, dh);
  for (std::size_t j = 0; j < hid; ++j) dh[j] *= h[j] * (1.0 - h[j]);
  kernels::ger(1.0, dh, a, g.subspan(w1_off, hid * in));
  kernels::axpy(1.0, dh, g.subspan(b1_off, hid));
  return loss;
}

double MlpProblem::batch_value(const Vector& x, const Batch& batch) const {
  require_same_dim(static_cast<std::size_t>(x.size()), dim(), "mlp");
  if (batch.indices.empty()) throw Error("mlp: empty batch");
  std::vector<double> work;
  double sum = 0.0;
  for (std::size_t i : batch.indices) {
    if (i >= data_.size()) throw Error("mlp: component index out of range");
    sum += sample_loss(x, i, nullptr, work);
  }
  return sum / static_cast<double>(batch.indices.size()) +
         0.5 * lambda_ * x.squaredNorm();
}

Evaluation MlpProblem::batch_value_grad(const Vector& x,
                                        const Batch& batch) const {
  require_same_dim(static_cast<std::size_t>(x.size()), dim(), "mlp");
  if (batch.indices.empty()) throw Error("mlp: empty batch");
  std::vector<double> work;
  Evaluation out;
  out.grad = Vector::Zero(x.size());
  double sum = 0.0;
  for (std::size_t i : batch.indices) {
    if (i >= data_.size()) throw Error("mlp: component index out of range");
    sum += sample_loss(x, i, &out.grad, work);
  }
  const double inv_b = 1.0 / static_cast<double>(batch.indices.size());
  out.value = sum * inv_b + 0.5 * lambda_ * x.squaredNorm();
  out.grad *= inv_b;
  out.grad += lambda_ * x;
  return out;
}

double MlpProblem::full_value(const Vector& x) const {
  return batch_value(x, full_batch(*this));
}

Vector MlpProblem::full_gradient(const Vector& x) const {
  return batch_value_grad(x, full_batch(*this)).grad;
}

std::optional<double> MlpProblem::accuracy(const Vector& x) const {
  require_same_dim(static_cast<std::size_t>(x.size()), dim(), "mlp");
  const std::size_t in = arch_.inputs;
  const std::size_t hid = arch_.hidden;
  const std::size_t cls = arch_.classes;
  const std::span<const double> params = as_span(x);
  std::vector<double> h(hid);
  std::vector<double> z(cls);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    kernels::gemv(params.subspan(0, hid * in), hid, in, data_.row(i),
                  params.data() + hid * in, h);
    for (double& v : h) v = sigmoid(v);
    kernels::gemv(params.subspan(hid * in + hid, cls * hid), cls, hid, h,
                  params.data() + hid * in + hid + cls * hid, z);
    const auto best = std::max_element(z.begin(), z.end()) - z.begin();
    hits += best == data_.labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(data_.size());
}

Vector MlpProblem::initial_point(Rng& rng) const {
  Vector x = Vector::Zero(dim());
  const double r1 = 1.0 / std::sqrt(static_cast<double>(arch_.inputs));
  const double r2 = 1.0 / std::sqrt(static_cast<double>(arch_.hidden));
  std::uniform_real_distribution<double> u1(-r1, r1);
  std::uniform_real_distribution<double> u2(-r2, r2);
  const std::size_t w1 = arch_.hidden * arch_.inputs;
  const std::size_t w2_off = w1 + arch_.hidden;
  for (std::size_t j = 0; j < w1; ++j) x[j] = u1(rng);
  for (std::size_t j = 0; j < arch_.classes * arch_.hidden; ++j) {
    x[w2_off + j] = u2(rng);
  }
  return x;
}

}  // namespace strme
