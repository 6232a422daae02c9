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

#ifndef TRR_TR_ALGEBRA_HPP
#define TRR_TR_ALGEBRA_HPP

// Tensor-ring representation: d third-order cores G^(k) of shape
// r_k x n_k x r_{k+1}, closed cyclically (r_{d+1} = r_1), with
//   x(j_1..j_d) = tr(G^(1)_{j_1} ... G^(d)_{j_d}).

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "trr/tensor.hpp"

namespace trr {

class TrCores {
 public:
  /// Throws DomainError for d < 2 or a core that is not third order, and
  /// ShapeError when adjacent bond dimensions do not chain.
  explicit TrCores(std::vector<DenseTensor> cores);

  std::size_t order() const noexcept { return cores_.size(); }
  const std::vector<DenseTensor>& cores() const noexcept { return cores_; }
  /// 1-based core access.
  const DenseTensor& core(std::size_t k) const;

  /// (r_1, ..., r_d).
  std::vector<std::size_t> ranks() const;
  /// (n_1, ..., n_d).
  Dims dims() const;

 private:
  std::vector<DenseTensor> cores_;
};

/// Full tensor by sequential core contraction followed by a trace.
DenseTensor compose(const TrCores& cores);

/// Tensor connection product over the cyclic span a..b (1-based, b may
/// wrap past d). Result has dims (r_a, n_a * ... * n_b, r_{b+1}); the merged
/// middle index runs first-index-fastest over (j_a, ..., j_b), the same
/// order shift_matricize uses for its rows. The span must be shorter than d.
DenseTensor connect(const TrCores& cores, std::size_t a, std::size_t b);

/// Ring with the span a..b replaced by connect(cores, a, b), followed by the
/// untouched cores b+1, ..., a-1 in cyclic order.
TrCores merge_span(const TrCores& cores, std::size_t a, std::size_t b);

/// True when r_k * r_{k+l} <= min(rows, cols) of X_{k,l} for every k.
bool is_subcritical(const Dims& dims, const std::vector<std::size_t>& ranks, std::size_t split);

struct TrSample {
  DenseTensor tensor;
  TrCores cores;
};

/// Cores with i.i.d. standard normal entries from a seeded mt19937_64, and
/// their composition. Ranks must be subcritical for the balanced split.
TrSample random_tr_tensor(const Dims& dims, const std::vector<std::size_t>& ranks,
                          std::uint64_t seed);

/// Default relative tolerance for numerical rank counts.
inline constexpr double kRankTolerance = 1e-8;

/// Number of singular values of X_{k,l} above tol * sigma_max.
std::size_t unfolding_rank_check(const DenseTensor& x, std::size_t shift, std::size_t split,
                                 double tol = kRankTolerance);

/// "TRC1 d=<d>\n" followed by d TRT1 tensors.
void write_trc1(std::ostream& out, const TrCores& cores);
TrCores read_trc1(std::istream& in);

}  // namespace trr

#endif  // TRR_TR_ALGEBRA_HPP
