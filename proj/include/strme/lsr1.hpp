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

#include <cstddef>

#include "strme/common.hpp"

namespace strme {

struct Lsr1Params {
  double tau0 = 1.0;         // B0 = tau0 * I
  std::size_t memory = 30;   // maximum number of stored pairs
  double skip_r = 1e-8;      // pair acceptance threshold
};

/// Limited-memory SR1 matrix in compact form
///
///   B = tau0 I + U M^{-1} U^T,   U = Y - tau0 S,
///   M = D + L + L^T - tau0 S^T S,
///
/// where S^T Y = L + D + R (strictly lower, diagonal, strictly upper). The
/// small core M is rebuilt from scratch whenever the pair set changes.
class Lsr1State {
 public:
  explicit Lsr1State(std::size_t dim, Lsr1Params params = {});

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return static_cast<std::size_t>(s_.cols()); }
  bool empty() const { return size() == 0; }
  double tau0() const { return params_.tau0; }
  const Lsr1Params& params() const { return params_; }

  /// SR1 pair test against the current matrix: the pair is stored iff
  /// w = y - B s is nonzero and |s.w| >= r |s| |w|. The oldest pair is dropped
  /// once more than `memory` pairs would be held. Returns whether the pair
  /// was stored.
  bool try_update(const Vector& s, const Vector& y);

  /// B v without forming B.
  Vector apply(const Vector& v) const;

  /// tau0 I + U M^{-1} U^T as a dense matrix. Meant for tests (dim <= 200).
  Matrix to_dense() const;

  const Matrix& s() const { return s_; }
  const Matrix& y() const { return y_; }
  const Matrix& u() const { return u_; }
  const Matrix& core() const { return core_; }
  /// M^{-1} rhs.
  Vector solve_core(const Vector& rhs) const;
  /// 2-norm condition number of M, recorded at the last rebuild.
  double core_condition() const { return core_cond_; }

 private:
  void rebuild();

  std::size_t dim_;
  Lsr1Params params_;
  Matrix s_;     // dim x k
  Matrix y_;     // dim x k
  Matrix u_;     // dim x k
  Matrix core_;  // k x k
  Eigen::FullPivLU<Matrix> core_lu_;
  double core_cond_ = 1.0;
};

/// Functional form of Lsr1State::try_update.
std::pair<Lsr1State, bool> try_update(Lsr1State state, const Vector& s,
                                      const Vector& y);

}  // namespace strme
