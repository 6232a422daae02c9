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

#ifndef TRR_SOLVERS_HPP
#define TRR_SOLVERS_HPP

// ADMM solvers over the ceil(d/2) balanced unfoldings X_<1> .. X_<ceil(d/2)>:
//
//   trrpca: min sum_i w_i ||X^(i)_<i>||_* + lambda ||S||_1
//           s.t. X^(i) + S = T
//   rtrc:   min sum_i w_i ||X^(i)_<i>||_* + lambda ||S||_1
//           s.t. P (*) (L + S) = P (*) T,  X^(i) = L
//
// The penalty mu grows geometrically, mu_{k+1} = min(beta mu_k, mu_max), and
// iteration stops once the relative change of L drops to tol with the
// constraints satisfied to the same relative tolerance.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trr/keyvalue.hpp"
#include "trr/tensor.hpp"

namespace trr {

struct SolverConfig {
  /// Unset means default_lambda with p = 1 (trrpca) or the mask ratio (rtrc).
  std::optional<double> lambda;
  /// One weight per balanced unfolding; empty means all ones.
  std::vector<double> weights;
  double mu0 = 1e-3;
  double beta = 1.1;
  double mu_max = 1e10;
  double tol = 1e-5;
  std::size_t max_iters = 100;
  bool parallel_unfoldings = false;

  /// Throws DomainError if a field is out of range for a tensor of this order.
  void validate(std::size_t order) const;
};

/// Reads the solver keys (lambda, weights, beta, mu0, mu_max, tol,
/// max_iters, parallel) from a document, ignoring any other keys.
SolverConfig solver_config_from(const KeyValueDocument& doc);
/// Strict variant for a standalone config: unknown keys are a FormatError.
SolverConfig parse_solver_config(std::string_view text);
std::string format_solver_config(const SolverConfig& cfg);

struct RecoveryResult {
  DenseTensor low_rank;
  DenseTensor sparse;
  std::size_t iterations = 0;
  /// Relative change of L per iteration; +inf while the constraint residual
  /// exceeds tol * ||T||_F (trrpca: max_i ||X^(i) + S - T||_F; rtrc: the
  /// larger of ||P (*) (L + S - T)||_F and max_i ||X^(i) - L||_F).
  std::vector<double> rc_trace;
  /// Penalty used in each iteration.
  std::vector<double> mu_trace;
  /// trrpca: max_i ||X^(i) + S - T||_F; rtrc: ||P (*) (L + S - T)||_F.
  std::vector<double> feasibility_trace;
  bool converged = false;
  /// The lambda actually used (resolved when the config left it unset).
  double lambda = 0.0;
};

/// 1 / sqrt(p * max(rows, cols)) for the balanced unfolding X_<1>.
double default_lambda(const Dims& dims, double p);

/// ||current - previous||_F / ||previous||_F, or ||current||_F when
/// previous is zero.
double relative_change(const DenseTensor& current, const DenseTensor& previous);

/// Throws NumericalError for non-finite input and DivergenceError when an
/// iterate turns non-finite.
RecoveryResult trrpca(const DenseTensor& observed, const SolverConfig& cfg);

/// Entries of `observed` outside the mask are ignored.
RecoveryResult rtrc(const DenseTensor& observed, const SamplingMask& mask, const SolverConfig& cfg);

}  // namespace trr

#endif  // TRR_SOLVERS_HPP
