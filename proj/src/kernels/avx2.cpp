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

// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the dispatcher has checked the CPU.

#include "strme/kernels.hpp"

#if defined(STRME_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace strme::kernels::avx2 {

#if defined(STRME_HAVE_AVX2)
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  const __m128d sh = _mm_unpackhi_pd(s, s);
  return _mm_cvtsd_f64(_mm_add_sd(s, sh));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8),
                           _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12),
                           _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1),
                                _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4),
                                     _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

double sparse_dot(const Index* idx, const double* val, std::size_t nnz,
                  const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= nnz; k += 4) {
    const __m128i vi =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
    const __m256d gathered = _mm256_i32gather_pd(x, vi, 8);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), gathered, acc);
  }
  double s = hsum(acc);
  for (; k < nnz; ++k) s += val[k] * x[idx[k]];
  return s;
}

// AVX2 has no scatter; indices within a row are distinct so the scalar loop
// is already the whole story.
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

const Table* table() {
  static const Table t{dot,  axpy,       scale, sparse_dot, sparse_axpy,
                       gemv, gemv_t_acc, ger};
  return &t;
}

#else

const Table* table() { return nullptr; }

#endif

}  // namespace strme::kernels::avx2
