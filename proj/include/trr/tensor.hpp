// Copyright 2026 The trr Authors. All Rights Reserved.
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

#ifndef TRR_TENSOR_HPP
#define TRR_TENSOR_HPP

// Dense real tensors stored first-index-fastest, and the reshapes used to
// move between tensors and matrices: permutation, mode-i unfolding, the
// k-shifting l-matricization and its balanced special case.
//
// Multi-indices, mode numbers, shifts and permutation entries are 1-based
// at this interface. Flat offsets (operator[]) are 0-based.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace trr {

using Dims = std::vector<std::size_t>;

/// Product of the dims. Throws DomainError if empty or any dim is zero.
std::size_t element_count(const Dims& dims);

class DenseTensor {
 public:
  /// Zero tensor of the given shape.
  explicit DenseTensor(Dims dims);
  DenseTensor(Dims dims, std::vector<double> data);

  static DenseTensor filled(Dims dims, double value);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t order() const noexcept { return dims_.size(); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  double operator[](std::size_t offset) const { return data_[offset]; }
  double& operator[](std::size_t offset) { return data_[offset]; }

  /// Entry at a 1-based multi-index, bounds checked.
  double at(std::span<const std::size_t> index) const;
  double& at(std::span<const std::size_t> index);

  bool operator==(const DenseTensor&) const = default;

 private:
  Dims dims_;
  std::vector<double> data_;
};

/// 1-based linear index 1 + sum_i (j_i - 1) prod_{m<i} n_m.
std::size_t linear_index(const Dims& dims, std::span<const std::size_t> index);

/// Inverse of linear_index.
std::vector<std::size_t> multi_index(const Dims& dims, std::size_t linear);

/// MATLAB-style permute: result dim i is source dim order[i], and
/// result(j_1..j_d) = X(k) with k_{order[i]} = j_i.
DenseTensor permute(const DenseTensor& x, std::span<const std::size_t> order);

/// Same data, new shape with the same element count.
DenseTensor reshape(const DenseTensor& x, Dims dims);

/// Column-major matrix (row index fastest).
class Matrixization {
 public:
  Matrixization(std::size_t rows, std::size_t cols);
  Matrixization(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  /// 0-based (row, col).
  double operator()(std::size_t r, std::size_t c) const { return data_[r + rows_ * c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r + rows_ * c]; }

  bool operator==(const Matrixization&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Mode-i unfolding X_(i): n_i rows, remaining modes in increasing order
/// (first fastest) along the columns.
Matrixization mode_unfold(const DenseTensor& x, std::size_t mode);
DenseTensor mode_fold(const Matrixization& m, std::size_t mode, const Dims& dims);

/// Cyclic mode order [k, ..., d, 1, ..., k-1].
std::vector<std::size_t> shift_order(std::size_t order, std::size_t shift);

/// k-shifting l-matricization X_{k,l}: permute by shift_order(d, k), then
/// the first l modes index rows and the remaining d - l modes index columns.
Matrixization shift_matricize(const DenseTensor& x, std::size_t shift, std::size_t split);
DenseTensor shift_fold(const Matrixization& m, std::size_t shift, std::size_t split,
                       const Dims& dims);

/// ceil(d / 2), the split used by the balanced unfolding.
constexpr std::size_t balanced_split(std::size_t order) noexcept { return (order + 1) / 2; }

/// Shape (rows, cols) of X_{k,l} without materializing it.
std::pair<std::size_t, std::size_t> shift_shape(const Dims& dims, std::size_t shift,
                                                std::size_t split);

/// X_<k> = X_{k, ceil(d/2)}. Requires d >= 2.
Matrixization balanced_unfold(const DenseTensor& x, std::size_t shift);
DenseTensor balanced_fold(const Matrixization& m, std::size_t shift, const Dims& dims);

enum class ElementwiseOp { add, sub, hadamard, safe_divide };

/// Entrywise combination of congruent tensors. safe_divide rejects zero
/// divisors with DomainError instead of producing inf/nan.
DenseTensor elementwise(const DenseTensor& x, const DenseTensor& y, ElementwiseOp op);

DenseTensor operator+(const DenseTensor& x, const DenseTensor& y);
DenseTensor operator-(const DenseTensor& x, const DenseTensor& y);
DenseTensor operator*(double a, const DenseTensor& x);
DenseTensor hadamard(const DenseTensor& x, const DenseTensor& y);
DenseTensor safe_divide(const DenseTensor& x, const DenseTensor& y);

double inner(const DenseTensor& x, const DenseTensor& y);
double frobenius(const DenseTensor& x);
double max_abs(const DenseTensor& x);
bool all_finite(std::span<const double> values);

/// Binary tensor P marking the observed set Omega.
class SamplingMask {
 public:
  /// Throws DomainError if any entry is not exactly 0 or 1.
  explicit SamplingMask(DenseTensor indicator);

  static SamplingMask full(Dims dims);

  const DenseTensor& indicator() const noexcept { return indicator_; }
  const Dims& dims() const noexcept { return indicator_.dims(); }
  bool observed(std::size_t offset) const { return indicator_[offset] != 0.0; }
  std::size_t observed_count() const noexcept { return observed_; }
  /// |Omega| / card(X).
  double ratio() const noexcept;

 private:
  DenseTensor indicator_;
  std::size_t observed_ = 0;
};

/// P (*) X; unobserved entries become exactly 0 whatever they held.
DenseTensor apply_mask(const SamplingMask& mask, const DenseTensor& x);

}  // namespace trr

#endif  // TRR_TENSOR_HPP
