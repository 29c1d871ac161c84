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

// Reference kernels: straight loops, left-to-right accumulation.

#include "strme/kernels.hpp"

namespace strme::kernels::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double sparse_dot(const Index* idx, const double* val, std::size_t nnz,
                  const double* x) {
  double s = 0.0;
  for (std::size_t k = 0; k < nnz; ++k) s += val[k] * x[idx[k]];
  return s;
}

void sparse_axpy(double alpha, const Index* idx, const double* val,
                 std::size_t nnz, double* y) {
  for (std::size_t k = 0; k < nnz; ++k) y[idx[k]] += alpha * val[k];
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x,
          const double* b, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = dot(a + r * cols, x, cols) + (b != nullptr ? b[r] : 0.0);
  }
}

void gemv_t_acc(const double* a, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (x[r] != 0.0) axpy(x[r], a + r * cols, y, cols);
  }
}

void ger(double alpha, const double* x, std::size_t rows, const double* y,
         std::size_t cols, double* a) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double s = alpha * x[r];
    if (s != 0.0) axpy(s, y, a + r * cols, cols);
  }
}

}  // namespace

const Table& table() {
  static const Table t{dot,  axpy,       scale, sparse_dot, sparse_axpy,
                       gemv, gemv_t_acc, ger};
  return t;
}

}  // namespace strme::kernels::scalar
