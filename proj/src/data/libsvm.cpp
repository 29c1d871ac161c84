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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "strme/data.hpp"

namespace strme {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
         c == '\f';
}

std::string_view next_token(std::string_view& rest) {
  std::size_t b = 0;
  while (b < rest.size() && is_space(rest[b])) ++b;
  std::size_t e = b;
  while (e < rest.size() && !is_space(rest[e])) ++e;
  const std::string_view tok = rest.substr(b, e - b);
  rest.remove_prefix(e);
  return tok;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

SparseRow SparseDataset::row(std::size_t i) const {
  if (i >= size()) throw Error("sparse row index out of range");
  const std::size_t b = row_ptr_[i];
  const std::size_t e = row_ptr_[i + 1];
  return {std::span<const kernels::Index>(col_.data() + b, e - b),
          std::span<const double>(val_.data() + b, e - b)};
}

void SparseDataset::add_row(int label, std::span<const kernels::Index> idx,
                            std::span<const double> val) {
  require_same_dim(idx.size(), val.size(), "sparse row");
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0) throw Error("sparse row: negative feature index");
    if (k > 0 && idx[k] <= idx[k - 1]) {
      throw Error("sparse row: feature indices must be strictly increasing");
    }
  }
  col_.insert(col_.end(), idx.begin(), idx.end());
  val_.insert(val_.end(), val.begin(), val.end());
  row_ptr_.push_back(col_.size());
  labels_.push_back(label);
  if (!idx.empty()) {
    dim_ = std::max(dim_, static_cast<std::size_t>(idx.back()) + 1);
  }
}

void SparseDataset::set_dim(std::size_t dim) { dim_ = std::max(dim_, dim); }

SparseDataset SparseDataset::subset(std::span<const std::size_t> rows) const {
  SparseDataset out;
  for (std::size_t i : rows) {
    const SparseRow r = row(i);
    out.add_row(labels_[i], r.idx, r.val);
  }
  out.set_dim(dim_);
  return out;
}

SparseDataset parse_libsvm(std::istream& in,
                           std::optional<std::size_t> declared_dim) {
  SparseDataset data;
  std::string line;
  std::size_t lineno = 0;
  std::vector<kernels::Index> idx;
  std::vector<double> val;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest(line);
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
      rest = rest.substr(0, hash);
    }
    const std::string_view label_tok = next_token(rest);
    if (label_tok.empty()) continue;
    int label = 0;
    if (!parse_number(label_tok, label)) {
      throw ParseError(lineno, "invalid label '" + std::string(label_tok) + "'");
    }
    idx.clear();
    val.clear();
    for (std::string_view tok = next_token(rest); !tok.empty();
         tok = next_token(rest)) {
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(lineno, "expected idx:val, got '" + std::string(tok) + "'");
      }
      long long index = 0;
      double value = 0.0;
      if (!parse_number(tok.substr(0, colon), index) || index < 1 ||
          index > std::numeric_limits<kernels::Index>::max()) {
        throw ParseError(lineno, "invalid feature index in '" + std::string(tok) + "'");
      }
      if (!parse_number(tok.substr(colon + 1), value)) {
        throw ParseError(lineno, "invalid feature value in '" + std::string(tok) + "'");
      }
      const auto zero_based = static_cast<kernels::Index>(index - 1);
      if (!idx.empty() && zero_based <= idx.back()) {
        throw ParseError(lineno, "feature indices must be strictly increasing");
      }
      idx.push_back(zero_based);
      val.push_back(value);
    }
    data.add_row(label, idx, val);
  }
  if (in.bad()) throw IoError("read error while parsing LIBSVM data");
  if (declared_dim) data.set_dim(*declared_dim);
  return data;
}

SparseDataset load_libsvm(const std::filesystem::path& path,
                          std::optional<std::size_t> declared_dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_libsvm(in, declared_dim);
}

void write_libsvm(std::ostream& out, const SparseDataset& data) {
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.label(i);
    const SparseRow r = data.row(i);
    for (std::size_t k = 0; k < r.idx.size(); ++k) {
      std::snprintf(buf, sizeof buf, " %d:%.17g", r.idx[k] + 1, r.val[k]);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace strme
