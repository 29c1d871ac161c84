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

#include <fstream>
#include <iterator>
#include <string>

#include "strme/data.hpp"

namespace strme {
namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t at) {
  if (at + 4 > bytes.size()) throw IoError("idx: truncated header");
  return (std::uint32_t{bytes[at]} << 24) | (std::uint32_t{bytes[at + 1]} << 16) |
         (std::uint32_t{bytes[at + 2]} << 8) | std::uint32_t{bytes[at + 3]};
}

}  // namespace

IdxTensor read_idx(std::span<const std::uint8_t> bytes) {
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic == kLabelMagic) {
    const std::size_t count = read_be32(bytes, 4);
    if (bytes.size() < 8 + count) {
      throw IoError("idx: truncated label payload (" + std::to_string(count) +
                    " declared)");
    }
    IdxLabels out;
    out.labels.assign(bytes.begin() + 8, bytes.begin() + 8 + count);
    return out;
  }
  if (magic == kImageMagic) {
    IdxImages out;
    out.count = read_be32(bytes, 4);
    out.rows = read_be32(bytes, 8);
    out.cols = read_be32(bytes, 12);
    const std::size_t total = out.count * out.rows * out.cols;
    if (bytes.size() < 16 + total) {
      throw IoError("idx: truncated image payload (" + std::to_string(out.count) +
                    " images declared)");
    }
    out.pixels.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
      out.pixels[i] = static_cast<double>(bytes[16 + i]) / 255.0;
    }
    return out;
  }
  throw IoError("idx: unknown magic number " + std::to_string(magic));
}

IdxTensor load_idx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return read_idx(bytes);
}

DenseDataset make_dense_dataset(const IdxImages& images,
                                const IdxLabels& labels) {
  if (images.count != labels.labels.size()) {
    throw DimensionError("idx: image and label counts differ");
  }
  DenseDataset out;
  out.features = images.features();
  out.x = images.pixels;
  out.labels.assign(labels.labels.begin(), labels.labels.end());
  return out;
}

DenseDataset load_mnist(const std::filesystem::path& images,
                        const std::filesystem::path& labels) {
  auto img = load_idx(images);
  auto lab = load_idx(labels);
  const auto* pi = std::get_if<IdxImages>(&img);
  const auto* pl = std::get_if<IdxLabels>(&lab);
  if (pi == nullptr) throw IoError(images.string() + " is not an IDX image file");
  if (pl == nullptr) throw IoError(labels.string() + " is not an IDX label file");
  return make_dense_dataset(*pi, *pl);
}

DenseDataset DenseDataset::subset(std::span<const std::size_t> rows) const {
  DenseDataset out;
  out.features = features;
  out.x.reserve(rows.size() * features);
  for (std::size_t i : rows) {
    const auto r = row(i);
    out.x.insert(out.x.end(), r.begin(), r.end());
    out.labels.push_back(labels.at(i));
  }
  return out;
}

}  // namespace strme
