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

#include "trr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "trr/errors.hpp"

namespace trr {

namespace {

void require_congruent(const DenseTensor& x, const DenseTensor& y, const char* what) {
  if (x.dims() != y.dims()) {
    throw ShapeError(std::string(what) + ": tensor dims differ");
  }
}

void require_permutation(std::span<const std::size_t> order, std::size_t d) {
  if (order.size() != d) {
    throw DomainError("permute: order has " + std::to_string(order.size()) +
                      " entries, tensor has order " + std::to_string(d));
  }
  std::vector<bool> seen(d, false);
  for (std::size_t v : order) {
    if (v < 1 || v > d || seen[v - 1]) {
      throw DomainError("permute: order is not a bijection on 1..d");
    }
    seen[v - 1] = true;
  }
}

std::vector<std::size_t> inverse_order(std::span<const std::size_t> order) {
  std::vector<std::size_t> inv(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) inv[order[i] - 1] = i + 1;
  return inv;
}

Dims permuted_dims(const Dims& dims, std::span<const std::size_t> order) {
  Dims out(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) out[i] = dims[order[i] - 1];
  return out;
}

// Permute then flatten the first `split` modes into rows.
Matrixization matricize(const DenseTensor& x, std::span<const std::size_t> order,
                        std::size_t split) {
  DenseTensor p = permute(x, order);
  std::size_t rows = 1;
  for (std::size_t i = 0; i < split; ++i) rows *= p.dims()[i];
  const std::size_t cols = p.size() / rows;
  std::vector<double> data(p.data().begin(), p.data().end());
  return Matrixization(rows, cols, std::move(data));
}

DenseTensor unmatricize(const Matrixization& m, std::span<const std::size_t> order,
                        std::size_t split, const Dims& dims) {
  require_permutation(order, dims.size());
  const Dims pdims = permuted_dims(dims, order);
  std::size_t rows = 1;
  for (std::size_t i = 0; i < split; ++i) rows *= pdims[i];
  const std::size_t total = element_count(dims);
  if (m.rows() != rows || m.cols() * rows != total) {
    throw ShapeError("fold: matrix is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                     std::to_string(total / rows));
  }
  DenseTensor p(pdims, std::vector<double>(m.data().begin(), m.data().end()));
  const auto inv = inverse_order(order);
  return permute(p, inv);
}

std::vector<std::size_t> mode_order(std::size_t d, std::size_t mode) {
  std::vector<std::size_t> order;
  order.reserve(d);
  order.push_back(mode);
  for (std::size_t i = 1; i <= d; ++i) {
    if (i != mode) order.push_back(i);
  }
  return order;
}

void require_mode(std::size_t mode, std::size_t d) {
  if (mode < 1 || mode > d) {
    throw BoundsError("mode " + std::to_string(mode) + " outside 1.." + std::to_string(d));
  }
}

void require_shift(std::size_t shift, std::size_t split, std::size_t d) {
  if (shift < 1 || shift > d) {
    throw BoundsError("shift " + std::to_string(shift) + " outside 1.." + std::to_string(d));
  }
  if (split < 1 || split + 1 > d) {
    throw BoundsError("split " + std::to_string(split) + " outside 1.." +
                      std::to_string(d == 0 ? 0 : d - 1));
  }
}

}  // namespace

std::size_t element_count(const Dims& dims) {
  if (dims.empty()) throw DomainError("tensor order must be at least 1");
  std::size_t n = 1;
  for (std::size_t v : dims) {
    if (v == 0) throw DomainError("tensor dims must be positive");
    n *= v;
  }
  return n;
}

DenseTensor::DenseTensor(Dims dims) : dims_(std::move(dims)), data_(element_count(dims_), 0.0) {}

DenseTensor::DenseTensor(Dims dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (data_.size() != element_count(dims_)) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match dims product " + std::to_string(element_count(dims_)));
  }
}

DenseTensor DenseTensor::filled(Dims dims, double value) {
  const std::size_t n = element_count(dims);
  return DenseTensor(std::move(dims), std::vector<double>(n, value));
}

double DenseTensor::at(std::span<const std::size_t> index) const {
  return data_[linear_index(dims_, index) - 1];
}

double& DenseTensor::at(std::span<const std::size_t> index) {
  return data_[linear_index(dims_, index) - 1];
}

std::size_t linear_index(const Dims& dims, std::span<const std::size_t> index) {
  if (index.size() != dims.size()) {
    throw BoundsError("multi-index has " + std::to_string(index.size()) +
                      " components, tensor has order " + std::to_string(dims.size()));
  }
  std::size_t linear = 1;
  std::size_t stride = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (index[i] < 1 || index[i] > dims[i]) {
      throw BoundsError("index component " + std::to_string(i + 1) + " = " +
                        std::to_string(index[i]) + " outside 1.." + std::to_string(dims[i]));
    }
    linear += (index[i] - 1) * stride;
    stride *= dims[i];
  }
  return linear;
}

std::vector<std::size_t> multi_index(const Dims& dims, std::size_t linear) {
  const std::size_t total = element_count(dims);
  if (linear < 1 || linear > total) {
    throw BoundsError("linear index " + std::to_string(linear) + " outside 1.." +
                      std::to_string(total));
  }
  std::vector<std::size_t> index(dims.size());
  std::size_t rest = linear - 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    index[i] = rest % dims[i] + 1;
    rest /= dims[i];
  }
  return index;
}

DenseTensor permute(const DenseTensor& x, std::span<const std::size_t> order) {
  const std::size_t d = x.order();
  require_permutation(order, d);

  std::vector<std::size_t> src_stride(d);
  std::size_t s = 1;
  for (std::size_t i = 0; i < d; ++i) {
    src_stride[i] = s;
    s *= x.dims()[i];
  }
  Dims out_dims = permuted_dims(x.dims(), order);
  std::vector<std::size_t> step(d);
  for (std::size_t i = 0; i < d; ++i) step[i] = src_stride[order[i] - 1];

  std::vector<double> out(x.size());
  std::vector<std::size_t> counter(d, 0);
  std::size_t src = 0;
  const auto in = x.data();
  for (std::size_t dst = 0; dst < out.size(); ++dst) {
    out[dst] = in[src];
    // odometer over the output multi-index, first index fastest
    for (std::size_t i = 0; i < d; ++i) {
      if (++counter[i] < out_dims[i]) {
        src += step[i];
        break;
      }
      src -= step[i] * (out_dims[i] - 1);
      counter[i] = 0;
    }
  }
  return DenseTensor(std::move(out_dims), std::move(out));
}

DenseTensor reshape(const DenseTensor& x, Dims dims) {
  if (element_count(dims) != x.size()) {
    throw ShapeError("reshape: element count mismatch");
  }
  return DenseTensor(std::move(dims), std::vector<double>(x.data().begin(), x.data().end()));
}

Matrixization::Matrixization(std::size_t rows, std::size_t cols)
    : Matrixization(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

Matrixization::Matrixization(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) throw DomainError("matrix dims must be positive");
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix data length does not match rows*cols");
  }
}

Matrixization mode_unfold(const DenseTensor& x, std::size_t mode) {
  require_mode(mode, x.order());
  return matricize(x, mode_order(x.order(), mode), 1);
}

DenseTensor mode_fold(const Matrixization& m, std::size_t mode, const Dims& dims) {
  require_mode(mode, dims.size());
  return unmatricize(m, mode_order(dims.size(), mode), 1, dims);
}

std::vector<std::size_t> shift_order(std::size_t order, std::size_t shift) {
  if (shift < 1 || shift > order) {
    throw BoundsError("shift " + std::to_string(shift) + " outside 1.." + std::to_string(order));
  }
  std::vector<std::size_t> out(order);
  for (std::size_t i = 0; i < order; ++i) out[i] = (shift - 1 + i) % order + 1;
  return out;
}

std::pair<std::size_t, std::size_t> shift_shape(const Dims& dims, std::size_t shift,
                                                std::size_t split) {
  require_shift(shift, split, dims.size());
  const auto order = shift_order(dims.size(), shift);
  std::size_t rows = 1;
  std::size_t cols = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < split ? rows : cols) *= dims[order[i] - 1];
  }
  return {rows, cols};
}

Matrixization shift_matricize(const DenseTensor& x, std::size_t shift, std::size_t split) {
  require_shift(shift, split, x.order());
  return matricize(x, shift_order(x.order(), shift), split);
}

DenseTensor shift_fold(const Matrixization& m, std::size_t shift, std::size_t split,
                       const Dims& dims) {
  require_shift(shift, split, dims.size());
  return unmatricize(m, shift_order(dims.size(), shift), split, dims);
}

Matrixization balanced_unfold(const DenseTensor& x, std::size_t shift) {
  if (x.order() < 2) throw DomainError("balanced unfolding needs order >= 2");
  return shift_matricize(x, shift, balanced_split(x.order()));
}

DenseTensor balanced_fold(const Matrixization& m, std::size_t shift, const Dims& dims) {
  if (dims.size() < 2) throw DomainError("balanced unfolding needs order >= 2");
  return shift_fold(m, shift, balanced_split(dims.size()), dims);
}

DenseTensor elementwise(const DenseTensor& x, const DenseTensor& y, ElementwiseOp op) {
  require_congruent(x, y, "elementwise");
  DenseTensor out(x.dims());
  const auto a = x.data();
  const auto b = y.data();
  auto c = out.data();
  switch (op) {
    case ElementwiseOp::add:
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
      break;
    case ElementwiseOp::sub:
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] - b[i];
      break;
    case ElementwiseOp::hadamard:
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] * b[i];
      break;
    case ElementwiseOp::safe_divide:
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (b[i] == 0.0) {
          throw DomainError("safe_divide: zero divisor at offset " + std::to_string(i));
        }
        c[i] = a[i] / b[i];
      }
      break;
  }
  return out;
}

DenseTensor operator+(const DenseTensor& x, const DenseTensor& y) {
  return elementwise(x, y, ElementwiseOp::add);
}

DenseTensor operator-(const DenseTensor& x, const DenseTensor& y) {
  return elementwise(x, y, ElementwiseOp::sub);
}

DenseTensor operator*(double a, const DenseTensor& x) {
  DenseTensor out = x;
  for (double& v : out.data()) v *= a;
  return out;
}

DenseTensor hadamard(const DenseTensor& x, const DenseTensor& y) {
  return elementwise(x, y, ElementwiseOp::hadamard);
}

DenseTensor safe_divide(const DenseTensor& x, const DenseTensor& y) {
  return elementwise(x, y, ElementwiseOp::safe_divide);
}

double inner(const DenseTensor& x, const DenseTensor& y) {
  require_congruent(x, y, "inner");
  return std::inner_product(x.data().begin(), x.data().end(), y.data().begin(), 0.0);
}

double frobenius(const DenseTensor& x) { return std::sqrt(inner(x, x)); }

double max_abs(const DenseTensor& x) {
  double m = 0.0;
  for (double v : x.data()) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

SamplingMask::SamplingMask(DenseTensor indicator) : indicator_(std::move(indicator)) {
  for (double v : indicator_.data()) {
    if (v == 1.0) {
      ++observed_;
    } else if (v != 0.0) {
      throw DomainError("sampling mask entries must be 0 or 1");
    }
  }
}

SamplingMask SamplingMask::full(Dims dims) {
  return SamplingMask(DenseTensor::filled(std::move(dims), 1.0));
}

double SamplingMask::ratio() const noexcept {
  return static_cast<double>(observed_) / static_cast<double>(indicator_.size());
}

DenseTensor apply_mask(const SamplingMask& mask, const DenseTensor& x) {
  require_congruent(mask.indicator(), x, "apply_mask");
  // Selection rather than multiplication, so unobserved entries may hold
  // placeholders (nan) without poisoning the result.
  DenseTensor out(x.dims());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask.observed(i)) out[i] = x[i];
  }
  return out;
}

}  // namespace trr
