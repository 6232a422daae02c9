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

#include "trr/prox.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "trr/errors.hpp"

namespace trr {

namespace {

void require_tau(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw DomainError("threshold must be finite and nonnegative");
  }
}

inline double shrink(double x, double tau) {
  const double mag = std::abs(x) - tau;
  if (mag <= 0.0) return 0.0;
  return x > 0.0 ? mag : -mag;
}

}  // namespace

SvtResult svt(const Matrixization& m, double tau) {
  require_tau(tau);
  if (!all_finite(m.data())) throw NumericalError("svt: non-finite matrix entry");

  const auto rows = static_cast<Eigen::Index>(m.rows());
  const auto cols = static_cast<Eigen::Index>(m.cols());
  const Eigen::Map<const Eigen::MatrixXd> a(m.data().data(), rows, cols);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("svt: SVD did not converge");

  const Eigen::VectorXd& s = svd.singularValues();
  SvtResult out{Matrixization(m.rows(), m.cols()), 0, std::vector<double>(s.data(), s.data() + s.size())};
  Eigen::Index keep = 0;
  while (keep < s.size() && s(keep) > tau) ++keep;
  out.retained_rank = static_cast<std::size_t>(keep);
  if (keep == 0) return out;

  const Eigen::VectorXd shrunk = s.head(keep).array() - tau;
  Eigen::Map<Eigen::MatrixXd> dst(out.value.data().data(), rows, cols);
  dst.noalias() = svd.matrixU().leftCols(keep) * shrunk.asDiagonal() *
                  svd.matrixV().leftCols(keep).transpose();
  return out;
}

DenseTensor soft_threshold(const DenseTensor& x, double tau) {
  require_tau(tau);
  DenseTensor out(x.dims());
  const auto in = x.data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = shrink(in[i], tau);
  return out;
}

DenseTensor masked_soft_threshold(const DenseTensor& b, const SamplingMask& mask, double tau) {
  require_tau(tau);
  if (b.dims() != mask.dims()) throw ShapeError("masked_soft_threshold: mask dims differ");
  DenseTensor out(b.dims());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask.observed(i)) out[i] = shrink(b[i], tau);
  }
  return out;
}

}  // namespace trr
