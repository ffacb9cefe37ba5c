// Copyright 2026 The SpiQGAN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spiqgan {

/// Row-major 0/1 matrix. Rows are neurons, columns are time bins.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::uint8_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const std::uint8_t> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const std::uint8_t> data() const { return data_; }

  /// Patch-major flattening: entry p * rows + k is neuron k at bin p. This
  /// is the layout the critic and the generator output share.
  std::vector<double> flatten_patch_major() const {
    std::vector<double> out(rows_ * cols_);
    for (std::size_t p = 0; p < cols_; ++p)
      for (std::size_t k = 0; k < rows_; ++k) out[p * rows_ + k] = (*this)(k, p);
    return out;
  }

  bool operator==(const BinaryMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> data_;
};

}  // namespace spiqgan
