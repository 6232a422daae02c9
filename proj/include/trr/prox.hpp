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

#ifndef TRR_PROX_HPP
#define TRR_PROX_HPP

#include <vector>

#include "trr/tensor.hpp"

namespace trr {

struct SvtResult {
  Matrixization value;
  /// Number of singular values strictly above tau.
  std::size_t retained_rank = 0;
  /// Singular values of the input, descending.
  std::vector<double> singular_values;
};

/// Singular value thresholding D_tau(M) = U max(S - tau, 0) V^T, the
/// minimizer of tau ||X||_* + 1/2 ||X - M||_F^2. Singular values equal to
/// tau are dropped. Throws NumericalError on non-finite input.
SvtResult svt(const Matrixization& m, double tau);

/// Entrywise sign(x) max(|x| - tau, 0).
DenseTensor soft_threshold(const DenseTensor& x, double tau);

/// S_tau(P (*) B): minimizer of 1/2 ||A_Omega(X - B)||^2 + tau ||X||_1.
/// Entries outside Omega are exactly zero.
DenseTensor masked_soft_threshold(const DenseTensor& b, const SamplingMask& mask, double tau);

}  // namespace trr

#endif  // TRR_PROX_HPP
