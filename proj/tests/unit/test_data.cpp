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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "strme/data.hpp"

using namespace strme;

namespace {

const std::string kData = STRME_DATA_DIR;

SparseDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_libsvm(in);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::vector<std::uint8_t> idx_images(std::uint32_t count, std::uint32_t rows, std::uint32_t cols) {
  std::vector<std::uint8_t> out;
  put_u32(out, 2051);
  put_u32(out, count);
  put_u32(out, rows);
  put_u32(out, cols);
  for (std::uint32_t i = 0; i < count * rows * cols; ++i) out.push_back(static_cast<std::uint8_t>(i * 51));
  return out;
}

std::vector<std::uint8_t> idx_labels(const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> out;
  put_u32(out, 2049);
  put_u32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("libsvm parsing") {
  const SparseDataset d = parse("+1 1:0.5 3:-2\n# comment only\n\n-1 2:1e-3  # trailing\n0\n");
  REQUIRE(d.size() == 3);
  CHECK(d.dim() == 3);
  CHECK(d.nnz() == 3);
  CHECK(d.labels() == std::vector<int>{1, -1, 0});
  const SparseRow r0 = d.row(0);
  REQUIRE(r0.idx.size() == 2);
  CHECK(r0.idx[0] == 0);
  CHECK(r0.idx[1] == 2);
  CHECK(r0.val[0] == 0.5);
  CHECK(r0.val[1] == -2.0);
  CHECK(d.row(1).idx[0] == 1);
  CHECK(d.row(1).val[0] == 1e-3);
  CHECK(d.row(2).idx.empty());

  std::istringstream in("1 2:1\n");
  CHECK(parse_libsvm(in, 10).dim() == 10);
  std::istringstream in2("1 20:1\n");
  CHECK(parse_libsvm(in2, 10).dim() == 20);
}

TEST_CASE("libsvm errors carry the line number") {
  CHECK(parse_error_line("1 1:1\nx 1:1\n") == 2);
  CHECK(parse_error_line("1 1:1\n\n1 2\n") == 3);
  CHECK(parse_error_line("1 0:1\n") == 1);
  CHECK(parse_error_line("# c\n1 1:abc\n") == 2);
  CHECK(parse_error_line("1 2:1 1:1\n") == 1);
  CHECK(parse_error_line("1 2:1 2:1\n") == 1);
  CHECK_THROWS_AS(load_libsvm("/nonexistent/file.svm"), IoError);
}

TEST_CASE("libsvm round trip") {
  const SparseDataset d = load_libsvm(kData + "/synthetic_200x20.svm");
  CHECK(d.size() == 200);
  CHECK(d.dim() == 20);
  std::stringstream buf;
  write_libsvm(buf, d);
  CHECK(parse_libsvm(buf, d.dim()) == d);

  const SparseDataset big = load_libsvm(kData + "/logistic_2000x50.svm");
  CHECK(big.size() == 2000);
  CHECK(big.dim() == 50);
}

TEST_CASE("sparse dataset rows") {
  SparseDataset d;
  const std::vector<kernels::Index> bad{2, 1};
  const std::vector<double> val{1.0, 1.0};
  CHECK_THROWS_AS(d.add_row(1, bad, val), Error);
  const std::vector<kernels::Index> good{1, 4};
  d.add_row(1, good, val);
  d.add_row(-1, good, val);
  CHECK(d.dim() == 5);
  d.set_dim(2);
  CHECK(d.dim() == 5);
  const std::vector<std::size_t> rows{1};
  const SparseDataset s = d.subset(rows);
  CHECK(s.size() == 1);
  CHECK(s.label(0) == -1);
  CHECK(s.dim() == 5);
  CHECK_THROWS_AS(d.row(2), Error);
}

TEST_CASE("train/test split") {
  SUBCASE("sizes") {
    const auto [tr, te] = split_indices(100, {0.75, 1, true});
    CHECK(tr.size() == 75);
    CHECK(te.size() == 25);
    const auto [a9a_tr, a9a_te] = split_indices(32561, {0.95, 1, true});
    CHECK(a9a_tr.size() == 30932);
    CHECK(a9a_te.size() == 1629);
  }
  SUBCASE("partition and determinism") {
    const auto [tr, te] = split_indices(101, {0.6, 5, true});
    std::set<std::size_t> all(tr.begin(), tr.end());
    all.insert(te.begin(), te.end());
    CHECK(all.size() == 101);
    CHECK(*all.rbegin() == 100);
    CHECK(std::is_sorted(tr.begin(), tr.end()));
    CHECK(std::is_sorted(te.begin(), te.end()));
    CHECK(split_indices(101, {0.6, 5, true}) == std::make_pair(tr, te));
    CHECK(split_indices(101, {0.6, 6, true}).first != tr);
  }
  SUBCASE("unshuffled keeps the order") {
    const auto [tr, te] = split_indices(4, {0.5, 1, false});
    CHECK(tr == std::vector<std::size_t>{0, 1});
    CHECK(te == std::vector<std::size_t>{2, 3});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(split_indices(10, {0.0, 1, true}), ConfigError);
    CHECK_THROWS_AS(split_indices(10, {1.0, 1, true}), ConfigError);
    CHECK_THROWS_AS(split_indices(1, {0.5, 1, true}), ConfigError);
    CHECK_THROWS_AS(split_indices(3, {0.2, 1, true}), ConfigError);
  }
  SUBCASE("dataset split") {
    const SparseDataset d = load_libsvm(kData + "/synthetic_200x20.svm");
    const auto [train, test] = split(d, {0.75, 3, true});
    CHECK(train.size() == 150);
    CHECK(test.size() == 50);
    CHECK(train.nnz() + test.nnz() == d.nnz());
  }
}

TEST_CASE("idx parsing") {
  const auto img = std::get<IdxImages>(read_idx(idx_images(2, 2, 3)));
  CHECK(img.count == 2);
  CHECK(img.rows == 2);
  CHECK(img.cols == 3);
  CHECK(img.features() == 6);
  REQUIRE(img.pixels.size() == 12);
  CHECK(img.pixels[0] == 0.0);
  CHECK(img.pixels[5] == 1.0);  // 255
  CHECK(img.image(1)[0] == doctest::Approx(50.0 / 255.0));  // 306 mod 256

  const auto lab = std::get<IdxLabels>(read_idx(idx_labels({3, 7})));
  CHECK(lab.labels == std::vector<std::uint8_t>{3, 7});

  const DenseDataset d = make_dense_dataset(img, lab);
  CHECK(d.size() == 2);
  CHECK(d.features == 6);
  CHECK(d.labels == std::vector<int>{3, 7});
  const std::vector<std::size_t> rows{1};
  CHECK(d.subset(rows).labels == std::vector<int>{7});
  CHECK(d.subset(rows).row(0)[0] == d.row(1)[0]);

  CHECK_THROWS_AS(make_dense_dataset(img, std::get<IdxLabels>(read_idx(idx_labels({1})))),
                  DimensionError);
}

TEST_CASE("idx errors") {
  std::vector<std::uint8_t> bytes = idx_images(2, 2, 2);
  bytes.pop_back();
  CHECK_THROWS_AS(read_idx(bytes), IoError);
  std::vector<std::uint8_t> labels = idx_labels({1, 2, 3});
  labels.pop_back();
  CHECK_THROWS_AS(read_idx(labels), IoError);
  std::vector<std::uint8_t> magic;
  put_u32(magic, 1234);
  put_u32(magic, 0);
  CHECK_THROWS_AS(read_idx(magic), IoError);
  CHECK_THROWS_AS(read_idx(std::vector<std::uint8_t>{0, 0}), IoError);
  CHECK_THROWS_AS(load_idx("/nonexistent/idx"), IoError);
}

TEST_CASE("bundled mnist subset") {
  const std::string dir = kData + "/mnist_subset/";
  const DenseDataset train = load_mnist(dir + "train-images-idx3-ubyte",
                                        dir + "train-labels-idx1-ubyte");
  const DenseDataset test = load_mnist(dir + "t10k-images-idx3-ubyte",
                                       dir + "t10k-labels-idx1-ubyte");
  CHECK(train.features == 784);
  CHECK(test.features == 784);
  CHECK(train.size() > 0);
  CHECK(test.size() > 0);
  std::set<int> classes(train.labels.begin(), train.labels.end());
  CHECK(classes.size() == 10);
  CHECK(*classes.begin() == 0);
  CHECK(*classes.rbegin() == 9);
  for (double v : train.x) {
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
  }
  CHECK_THROWS_AS(load_mnist(dir + "train-labels-idx1-ubyte", dir + "train-labels-idx1-ubyte"),
                  IoError);
}
