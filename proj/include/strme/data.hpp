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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "strme/common.hpp"
#include "strme/kernels.hpp"

namespace strme {

struct SparseRow {
  std::span<const kernels::Index> idx;  // 0-based, strictly increasing
  std::span<const double> val;
};

/// Labeled sparse rows in CSR layout.
class SparseDataset {
 public:
  SparseDataset() : row_ptr_{0} {}

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  SparseRow row(std::size_t i) const;
  int label(std::size_t i) const { return labels_.at(i); }
  const std::vector<int>& labels() const { return labels_; }
  std::size_t nnz() const { return col_.size(); }

  /// Appends a row. Indices are 0-based and must be strictly increasing.
  void add_row(int label, std::span<const kernels::Index> idx,
               std::span<const double> val);
  /// Widens the feature dimension; it never shrinks below the largest index.
  void set_dim(std::size_t dim);

  SparseDataset subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const SparseDataset&, const SparseDataset&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<kernels::Index> col_;
  std::vector<double> val_;
  std::vector<int> labels_;
};

/// `<label> <idx>:<val> ...` per line, 1-based indices, `#` comments.
/// The dimension is the largest index seen unless `declared_dim` is larger.
SparseDataset parse_libsvm(std::istream& in,
                           std::optional<std::size_t> declared_dim = {});
SparseDataset load_libsvm(const std::filesystem::path& path,
                          std::optional<std::size_t> declared_dim = {});
void write_libsvm(std::ostream& out, const SparseDataset& data);

struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;  // count * rows * cols, scaled to [0, 1]

  std::size_t features() const { return rows * cols; }
  std::span<const double> image(std::size_t i) const {
    return {pixels.data() + i * features(), features()};
  }
};

struct IdxLabels {
  std::vector<std::uint8_t> labels;
};

using IdxTensor = std::variant<IdxImages, IdxLabels>;

/// Big-endian IDX: magic 2051 holds u8 images, magic 2049 u8 labels.
IdxTensor read_idx(std::span<const std::uint8_t> bytes);
IdxTensor load_idx(const std::filesystem::path& path);

/// Images with integer class labels, one row of `features` reals per sample.
struct DenseDataset {
  std::size_t features = 0;
  std::vector<double> x;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {x.data() + i * features, features};
  }
  DenseDataset subset(std::span<const std::size_t> rows) const;
};

DenseDataset make_dense_dataset(const IdxImages& images,
                                const IdxLabels& labels);
DenseDataset load_mnist(const std::filesystem::path& images,
                        const std::filesystem::path& labels);

struct SplitSpec {
  double train_fraction = 0.75;
  std::uint64_t seed = 0;
  bool shuffle = true;

  void validate() const;
};

/// Train gets floor(fraction * n) rows. Both index lists are sorted.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, const SplitSpec& spec);

std::pair<SparseDataset, SparseDataset> split(const SparseDataset& data,
                                              const SplitSpec& spec);

}  // namespace strme
