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

#include "strme/lsr1.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "strme/kernels.hpp"
#include "strme/logging.hpp"

namespace strme {

Lsr1State::Lsr1State(std::size_t dim, Lsr1Params params)
    : dim_(dim), params_(params), s_(dim, 0), y_(dim, 0), u_(dim, 0) {
  if (!(params_.tau0 > 0.0)) throw ConfigError("lsr1: tau0 must be positive");
  if (params_.memory < 1) throw ConfigError("lsr1: memory must be >= 1");
  if (!(params_.skip_r > 0.0 && params_.skip_r < 1.0)) {
    throw ConfigError("lsr1: skip threshold r must lie in (0,1)");
  }
}

bool Lsr1State::try_update(const Vector& s, const Vector& y) {
  require_same_dim(static_cast<std::size_t>(s.size()), dim_, "lsr1 s");
  require_same_dim(static_cast<std::size_t>(y.size()), dim_, "lsr1 y");

  const Vector w = y - apply(s);
  const double s_norm = kernels::nrm2(as_span(s));
  const double w_norm = kernels::nrm2(as_span(w));
  if (s_norm == 0.0 || w_norm == 0.0) return false;
  if (std::abs(kernels::dot(as_span(s), as_span(w))) <
      params_.skip_r * s_norm * w_norm) {
    return false;
  }

  const Matrix old_s = s_;
  const Matrix old_y = y_;
  const Eigen::Index k = s_.cols();
  s_.conservativeResize(Eigen::NoChange, k + 1);
  y_.conservativeResize(Eigen::NoChange, k + 1);
  s_.col(k) = s;
  y_.col(k) = y;
  if (static_cast<std::size_t>(s_.cols()) > params_.memory) {
    const Eigen::Index keep = s_.cols() - 1;
    s_ = s_.rightCols(keep).eval();
    y_ = y_.rightCols(keep).eval();
  }
  rebuild();

  if (!core_lu_.isInvertible()) {
    log_warning("lsr1: singular core after update, pair discarded");
    s_ = old_s;
    y_ = old_y;
    rebuild();
    return false;
  }
  log_debug("lsr1: pair stored, core condition " +
            std::to_string(core_cond_));
  return true;
}

void Lsr1State::rebuild() {
  const double tau = params_.tau0;
  u_ = y_ - tau * s_;
  const Eigen::Index k = s_.cols();
  if (k == 0) {
    core_.resize(0, 0);
    core_cond_ = 1.0;
    return;
  }
  const Matrix sy = s_.transpose() * y_;
  const Matrix ss = s_.transpose() * s_;
  core_.resize(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      // Lower triangle and diagonal of S^T Y, mirrored.
      const double v = sy(i, j) - tau * ss(i, j);
      core_(i, j) = v;
      core_(j, i) = v;
    }
  }
  core_lu_.compute(core_);
  const Eigen::JacobiSVD<Matrix> svd(core_);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  core_cond_ = smin > 0.0 ? sv(0) / smin
                          : std::numeric_limits<double>::infinity();
}

Vector Lsr1State::solve_core(const Vector& rhs) const {
  if (!core_lu_.isInvertible()) {
    throw Error("lsr1: singular core matrix, stored pair set is invalid");
  }
  return core_lu_.solve(rhs);
}

Vector Lsr1State::apply(const Vector& v) const {
  require_same_dim(static_cast<std::size_t>(v.size()), dim_, "lsr1 apply");
  Vector out = params_.tau0 * v;
  if (empty()) return out;
  const Vector coeff = solve_core(u_.transpose() * v);
  out.noalias() += u_ * coeff;
  return out;
}

Matrix Lsr1State::to_dense() const {
  Matrix b = params_.tau0 * Matrix::Identity(dim_, dim_);
  if (empty()) return b;
  if (!core_lu_.isInvertible()) {
    throw Error("lsr1: singular core matrix, stored pair set is invalid");
  }
  b.noalias() += u_ * core_lu_.solve(Matrix(u_.transpose()));
  return b;
}

std::pair<Lsr1State, bool> try_update(Lsr1State state, const Vector& s,
                                      const Vector& y) {
  const bool accepted = state.try_update(s, y);
  return {std::move(state), accepted};
}

}  // namespace strme
