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
#include <numeric>

#include "strme/data.hpp"
#include "strme/rng.hpp"

namespace strme {

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, const SplitSpec& spec) {
  spec.validate();
  if (n < 2) throw ConfigError("split needs at least two samples");
  const auto n_train = static_cast<std::size_t>(
      std::floor(spec.train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw ConfigError("split leaves the train or test side empty");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (spec.shuffle) {
    Rng rng = make_stream(spec.seed, "split");
    for (std::size_t i = n - 1; i > 0; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i);
      std::swap(order[i], order[pick(rng)]);
    }
  }
  std::vector<std::size_t> train(order.begin(), order.begin() + n_train);
  std::vector<std::size_t> test(order.begin() + n_train, order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

std::pair<SparseDataset, SparseDataset> split(const SparseDataset& data,
                                              const SplitSpec& spec) {
  const auto [train, test] = split_indices(data.size(), spec);
  return {data.subset(train), data.subset(test)};
}

}  // namespace strme
