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

#include <memory>
#include <optional>
#include <variant>

#include "strme/common.hpp"
#include "strme/lsr1.hpp"

namespace strme {

/// Hessian approximation B_k of a quadratic model: zero (first-order models),
/// an explicit symmetric matrix, or a compact L-SR1 matrix.
class HessianOperator {
 public:
  struct Zero {
    std::size_t dim;
  };
  struct Dense {
    Matrix b;
  };
  struct Lsr1 {
    std::shared_ptr<const Lsr1State> state;
  };

  static HessianOperator zero(std::size_t dim) { return HessianOperator(Zero{dim}); }
  static HessianOperator dense(Matrix b);
  static HessianOperator lsr1(std::shared_ptr<const Lsr1State> state);

  std::size_t dim() const;
  Vector apply(const Vector& v) const;

  bool is_zero() const { return std::holds_alternative<Zero>(rep_); }
  const Matrix* dense_matrix() const;
  const Lsr1State* lsr1_state() const;

 private:
  explicit HessianOperator(std::variant<Zero, Dense, Lsr1> rep)
      : rep_(std::move(rep)) {}

  std::variant<Zero, Dense, Lsr1> rep_;
};

/// m(x + d) = f0 + g.d + d.B d / 2 around the current iterate.
struct QuadraticModel {
  Vector g;
  HessianOperator b;
  std::optional<double> f0;
};

/// m(x) - m(x + d) = -(g.d + d.B d / 2).
double pred_reduction(const QuadraticModel& model, const Vector& d);

}  // namespace strme
