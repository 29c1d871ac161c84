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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>

#include "strme/common.hpp"
#include "strme/kernels.hpp"

namespace strme::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(STRME_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("STRME_KERNELS")) {
    const std::string_view want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> t{&table(detect())};
  return t;
}

std::atomic<Isa>& current_isa() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

inline const Table& k() { return *current().load(std::memory_order_relaxed); }

}  // namespace

std::string_view isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
  static const bool avx2 = cpu_has_avx2() && avx2::table() != nullptr;
  return avx2;
}

Isa active_isa() { return current_isa().load(); }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error("kernel ISA not supported on this CPU: " +
                std::string(isa_name(isa)));
  }
  current().store(&table(isa));
  current_isa().store(isa);
}

const Table& table(Isa isa) {
  if (isa == Isa::avx2 && isa_supported(Isa::avx2)) return *avx2::table();
  return scalar::table();
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "dot");
  return k().dot(a.data(), b.data(), a.size());
}

double nrm2(std::span<const double> x) {
  return std::sqrt(k().dot(x.data(), x.data(), x.size()));
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_dim(x.size(), y.size(), "axpy");
  k().axpy(alpha, x.data(), y.data(), x.size());
}

void scale(double alpha, std::span<double> x) {
  k().scale(alpha, x.data(), x.size());
}

double sparse_dot(std::span<const Index> idx, std::span<const double> val,
                  std::span<const double> x) {
  require_same_dim(idx.size(), val.size(), "sparse_dot");
  return k().sparse_dot(idx.data(), val.data(), idx.size(), x.data());
}

void sparse_axpy(double alpha, std::span<const Index> idx,
                 std::span<const double> val, std::span<double> y) {
  require_same_dim(idx.size(), val.size(), "sparse_axpy");
  k().sparse_axpy(alpha, idx.data(), val.data(), idx.size(), y.data());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, const double* bias, std::span<double> y) {
  require_same_dim(a.size(), rows * cols, "gemv");
  require_same_dim(x.size(), cols, "gemv");
  require_same_dim(y.size(), rows, "gemv");
  k().gemv(a.data(), rows, cols, x.data(), bias, y.data());
}

void gemv_t_acc(std::span<const double> a, std::size_t rows, std::size_t cols,
                std::span<const double> x, std::span<double> y) {
  require_same_dim(a.size(), rows * cols, "gemv_t_acc");
  require_same_dim(x.size(), rows, "gemv_t_acc");
  require_same_dim(y.size(), cols, "gemv_t_acc");
  k().gemv_t_acc(a.data(), rows, cols, x.data(), y.data());
}

void ger(double alpha, std::span<const double> x, std::span<const double> y,
         std::span<double> a) {
  require_same_dim(a.size(), x.size() * y.size(), "ger");
  k().ger(alpha, x.data(), x.size(), y.data(), y.size(), a.data());
}

}  // namespace strme::kernels
