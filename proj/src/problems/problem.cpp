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

#include <numeric>

#include "strme/problems.hpp"

namespace strme {

Batch Batch::of(std::vector<std::size_t> indices) {
  Batch b;
  b.count = indices.size();
  b.indices = std::move(indices);
  return b;
}

Batch Batch::population(std::size_t count, std::uint64_t key) {
  Batch b;
  b.count = count;
  b.key = key;
  return b;
}

Matrix Problem::batch_hessian(const Vector&, const Batch&) const {
  throw Error("problem does not provide Hessians");
}

Batch full_batch(const Problem& problem) {
  const auto n = problem.components();
  if (!n) throw Error("full batch requested for a population problem");
  std::vector<std::size_t> all(*n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return Batch::of(std::move(all));
}

}  // namespace strme
