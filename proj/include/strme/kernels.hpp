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

// Data-parallel inner loops used by the objectives and the solvers.
//
// Every kernel has a portable scalar reference in kernels::scalar and, on
// x86-64, an AVX2+FMA variant in kernels::avx2. The unqualified entry points
// dispatch to the best variant the running CPU supports; the choice is made
// once and can be pinned with force_isa() or STRME_KERNELS=scalar|avx2.
//
// Results are deterministic for a fixed ISA. Variants differ only in
// summation order, so they agree to rounding, not bit for bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace strme::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
Isa active_isa();
/// Throws strme::Error when the CPU cannot run `isa`.
void force_isa(Isa isa);

using Index = std::int32_t;

struct Table {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* x, std::size_t n);
  double (*sparse_dot)(const Index* idx, const double* val, std::size_t nnz,
                       const double* x);
  void (*sparse_axpy)(double alpha, const Index* idx, const double* val,
                      std::size_t nnz, double* y);
  // y = A x + b for row-major A (rows x cols); b may be null.
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols,
               const double* x, const double* b, double* y);
  // y += A^T x for row-major A (rows x cols).
  void (*gemv_t_acc)(const double* a, std::size_t rows, std::size_t cols,
                     const double* x, double* y);
  // A += alpha * x y^T for row-major A (rows x cols).
  void (*ger)(double alpha, const double* x, std::size_t rows, const double* y,
              std::size_t cols, double* a);
};

const Table& table(Isa isa);

namespace scalar {
const Table& table();
}
namespace avx2 {
/// Null when the library was built without AVX2 support.
const Table* table();
}

// Dispatching entry points.

double dot(std::span<const double> a, std::span<const double> b);
double nrm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
double sparse_dot(std::span<const Index> idx, std::span<const double> val,
                  std::span<const double> x);
void sparse_axpy(double alpha, std::span<const Index> idx,
                 std::span<const double> val, std::span<double> y);
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, const double* bias, std::span<double> y);
void gemv_t_acc(std::span<const double> a, std::size_t rows, std::size_t cols,
                std::span<const double> x, std::span<double> y);
void ger(double alpha, std::span<const double> x, std::span<const double> y,
         std::span<double> a);

}  // namespace strme::kernels
