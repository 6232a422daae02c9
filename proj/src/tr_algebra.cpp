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

#include "trr/tr_algebra.hpp"

#include <Eigen/Dense>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "trr/errors.hpp"
#include "trr/tensor_io.hpp"

namespace trr {

namespace {

// Contract `len` consecutive cores starting at 0-based position `first`
// (cyclic) into a single (r_first, prod n, r_last+1) core.
DenseTensor contract_run(const std::vector<DenseTensor>& cores, std::size_t first,
                         std::size_t len) {
  const std::size_t d = cores.size();
  DenseTensor acc = cores[first % d];
  const std::size_t ra = acc.dims()[0];
  for (std::size_t step = 1; step < len; ++step) {
    const DenseTensor& g = cores[(first + step) % d];
    const std::size_t n_acc = acc.dims()[1];
    const std::size_t r = g.dims()[0];
    const std::size_t n = g.dims()[1];
    const std::size_t r_next = g.dims()[2];
    DenseTensor next({ra, n_acc * n, r_next});
    const auto a = acc.data();
    const auto gd = g.data();
    auto out = next.data();
    for (std::size_t t3 = 0; t3 < r_next; ++t3) {
      for (std::size_t jn = 0; jn < n; ++jn) {
        for (std::size_t t2 = 0; t2 < r; ++t2) {
          const double w = gd[t2 + r * (jn + n * t3)];
          if (w == 0.0) continue;
          const double* src = &a[ra * n_acc * t2];
          double* dst = &out[ra * (n_acc * jn + n_acc * n * t3)];
          for (std::size_t k = 0; k < ra * n_acc; ++k) dst[k] += src[k] * w;
        }
      }
    }
    acc = std::move(next);
  }
  return acc;
}

std::size_t span_length(std::size_t a, std::size_t b, std::size_t d) {
  if (a < 1 || a > d || b < 1 || b > d) {
    throw BoundsError("core span " + std::to_string(a) + ".." + std::to_string(b) +
                      " outside 1.." + std::to_string(d));
  }
  const std::size_t len = (b + d - a) % d + 1;
  if (len >= d) throw DomainError("connect: span must cover fewer than d cores");
  return len;
}

}  // namespace

TrCores::TrCores(std::vector<DenseTensor> cores) : cores_(std::move(cores)) {
  const std::size_t d = cores_.size();
  if (d < 2) throw DomainError("a tensor ring needs at least 2 cores");
  for (std::size_t k = 0; k < d; ++k) {
    if (cores_[k].order() != 3) {
      throw DomainError("core " + std::to_string(k + 1) + " is not third order");
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    if (cores_[k].dims()[2] != cores_[(k + 1) % d].dims()[0]) {
      throw ShapeError("core " + std::to_string(k + 1) + " does not chain into core " +
                       std::to_string((k + 1) % d + 1));
    }
  }
}

const DenseTensor& TrCores::core(std::size_t k) const {
  if (k < 1 || k > cores_.size()) throw BoundsError("core index out of range");
  return cores_[k - 1];
}

std::vector<std::size_t> TrCores::ranks() const {
  std::vector<std::size_t> r;
  r.reserve(cores_.size());
  for (const auto& g : cores_) r.push_back(g.dims()[0]);
  return r;
}

Dims TrCores::dims() const {
  Dims n;
  n.reserve(cores_.size());
  for (const auto& g : cores_) n.push_back(g.dims()[1]);
  return n;
}

DenseTensor compose(const TrCores& cores) {
  const DenseTensor ring = contract_run(cores.cores(), 0, cores.order());
  const std::size_t r = ring.dims()[0];
  const std::size_t n = ring.dims()[1];
  DenseTensor out(cores.dims());
  const auto g = ring.data();
  for (std::size_t j = 0; j < n; ++j) {
    double tr = 0.0;
    for (std::size_t t = 0; t < r; ++t) tr += g[t + r * (j + n * t)];
    out[j] = tr;
  }
  return out;
}

DenseTensor connect(const TrCores& cores, std::size_t a, std::size_t b) {
  const std::size_t len = span_length(a, b, cores.order());
  return contract_run(cores.cores(), a - 1, len);
}

TrCores merge_span(const TrCores& cores, std::size_t a, std::size_t b) {
  const std::size_t d = cores.order();
  const std::size_t len = span_length(a, b, d);
  std::vector<DenseTensor> ring;
  ring.reserve(d - len + 1);
  ring.push_back(contract_run(cores.cores(), a - 1, len));
  for (std::size_t step = len; step < d; ++step) ring.push_back(cores.cores()[(a - 1 + step) % d]);
  return TrCores(std::move(ring));
}

bool is_subcritical(const Dims& dims, const std::vector<std::size_t>& ranks, std::size_t split) {
  const std::size_t d = dims.size();
  if (ranks.size() != d) throw ShapeError("rank vector length differs from tensor order");
  for (std::size_t k = 1; k <= d; ++k) {
    const auto [rows, cols] = shift_shape(dims, k, split);
    const std::size_t bond = ranks[k - 1] * ranks[(k - 1 + split) % d];
    if (bond > std::min(rows, cols)) return false;
  }
  return true;
}

TrSample random_tr_tensor(const Dims& dims, const std::vector<std::size_t>& ranks,
                          std::uint64_t seed) {
  const std::size_t d = dims.size();
  if (d < 2) throw DomainError("random_tr_tensor: order must be at least 2");
  if (ranks.size() != d) throw DomainError("random_tr_tensor: need one rank per mode");
  for (std::size_t r : ranks) {
    if (r == 0) throw DomainError("random_tr_tensor: ranks must be positive");
  }
  element_count(dims);
  if (!is_subcritical(dims, ranks, balanced_split(d))) {
    throw DomainError("random_tr_tensor: rank vector is not subcritical for the balanced unfolding");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<DenseTensor> cores;
  cores.reserve(d);
  for (std::size_t k = 0; k < d; ++k) {
    DenseTensor g({ranks[k], dims[k], ranks[(k + 1) % d]});
    for (double& v : g.data()) v = normal(rng);
    cores.push_back(std::move(g));
  }
  TrCores tr(std::move(cores));
  DenseTensor x = compose(tr);
  return TrSample{std::move(x), std::move(tr)};
}

std::size_t unfolding_rank_check(const DenseTensor& x, std::size_t shift, std::size_t split,
                                 double tol) {
  if (!(tol > 0.0)) throw DomainError("rank tolerance must be positive");
  const Matrixization m = shift_matricize(x, shift, split);
  const Eigen::Map<const Eigen::MatrixXd> a(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                            static_cast<Eigen::Index>(m.cols()));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = tol * s(0);
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++count;
  }
  return count;
}

void write_trc1(std::ostream& out, const TrCores& cores) {
  out << "TRC1 d=" << cores.order() << '\n';
  for (const auto& g : cores.cores()) write_trt1(out, g);
}

TrCores read_trc1(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("TRC1 d=", 0) != 0) {
    throw FormatError("TRC1: bad header");
  }
  std::size_t d = 0;
  try {
    std::size_t used = 0;
    d = std::stoul(line.substr(7), &used);
    if (used != line.size() - 7) throw FormatError("TRC1: bad order");
  } catch (const std::logic_error&) {
    throw FormatError("TRC1: bad order");
  }
  if (d < 2) throw FormatError("TRC1: order must be at least 2");
  std::vector<DenseTensor> cores;
  cores.reserve(d);
  for (std::size_t k = 0; k < d; ++k) cores.push_back(read_trt1(in));
  return TrCores(std::move(cores));
}

}  // namespace trr
