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

#include "strme/model.hpp"

#include "strme/kernels.hpp"

namespace strme {

HessianOperator HessianOperator::dense(Matrix b) {
  if (b.rows() != b.cols()) throw DimensionError("dense Hessian must be square");
  return HessianOperator(Dense{std::move(b)});
}

HessianOperator HessianOperator::lsr1(std::shared_ptr<const Lsr1State> state) {
  if (!state) throw Error("lsr1 Hessian operator needs a state");
  return HessianOperator(Lsr1{std::move(state)});
}

std::size_t HessianOperator::dim() const {
  struct {
    std::size_t operator()(const Zero& z) const { return z.dim; }
    std::size_t operator()(const Dense& d) const {
      return static_cast<std::size_t>(d.b.rows());
    }
    std::size_t operator()(const Lsr1& l) const { return l.state->dim(); }
  } visitor;
  return std::visit(visitor, rep_);
}

Vector HessianOperator::apply(const Vector& v) const {
  require_same_dim(static_cast<std::size_t>(v.size()), dim(), "Hessian apply");
  struct {
    const Vector& v;
    Vector operator()(const Zero&) const { return Vector::Zero(v.size()); }
    Vector operator()(const Dense& d) const { return d.b * v; }
    Vector operator()(const Lsr1& l) const { return l.state->apply(v); }
  } visitor{v};
  return std::visit(visitor, rep_);
}

const Matrix* HessianOperator::dense_matrix() const {
  const auto* d = std::get_if<Dense>(&rep_);
  return d != nullptr ? &d->b : nullptr;
}

const Lsr1State* HessianOperator::lsr1_state() const {
  const auto* l = std::get_if<Lsr1>(&rep_);
  return l != nullptr ? l->state.get() : nullptr;
}

double pred_reduction(const QuadraticModel& model, const Vector& d) {
  require_same_dim(static_cast<std::size_t>(d.size()),
                   static_cast<std::size_t>(model.g.size()), "pred_reduction");
  const double lin = kernels::dot(as_span(model.g), as_span(d));
  if (model.b.is_zero()) return -lin;
  const Vector bd = model.b.apply(d);
  return -(lin + 0.5 * kernels::dot(as_span(d), as_span(bd)));
}

}  // namespace strme
