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

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "test_support.hpp"
#include "trr/errors.hpp"
#include "trr/tr_algebra.hpp"

using namespace trr;
using trr::testing::SplitMix;

namespace {

// Core k (1-based) filled with cos(0.7 * offset + k).
TrCores cosine_cores(const Dims& dims, const std::vector<std::size_t>& ranks) {
  std::vector<DenseTensor> cores;
  const auto d = dims.size();
  for (std::size_t k = 0; k < d; ++k) {
    DenseTensor g({ranks[k], dims[k], ranks[(k + 1) % d]});
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::cos(0.7 * i + (k + 1));
    cores.push_back(g);
  }
  return TrCores(cores);
}

TrCores random_cores(SplitMix& rng, const Dims& dims, const std::vector<std::size_t>& ranks) {
  std::vector<DenseTensor> cores;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    cores.push_back(
        trr::testing::random_tensor(rng, {ranks[k], dims[k], ranks[(k + 1) % dims.size()]}));
  }
  return TrCores(cores);
}

// The trace form summed term by term over all bond indices.
double scalar_entry(const TrCores& c, const std::vector<std::size_t>& j) {
  const auto d = c.order();
  const auto r = c.ranks();
  std::vector<std::size_t> a(d, 0);
  double total = 0.0;
  while (true) {
    double term = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const auto& g = c.cores()[k];
      const std::size_t row = a[k], col = a[(k + 1) % d];
      term *= g[row + g.dims()[0] * (j[k] + g.dims()[1] * col)];
    }
    total += term;
    std::size_t k = 0;
    while (k < d && ++a[k] == r[k]) a[k++] = 0;
    if (k == d) break;
  }
  return total;
}

}  // namespace

TEST_CASE("compose matches the reference contraction") {
  const auto cores = cosine_cores({2, 3, 2}, {2, 1, 3});
  const auto x = compose(cores);
  REQUIRE(x.dims() == Dims{2, 3, 2});
  const std::vector<double> expected{
      0.4368769204791444,  0.46487548208193163, 0.45075273038931785, 0.6863084849049812,
      0.252632487991698,   0.5849598834113264,  0.08787383520598732, -0.830729727583238,
      0.21214691796119645, -0.9780875799894267, 0.23664399031222116, -0.6654355604865725};
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(expected[i]).epsilon(1e-13));
}

TEST_CASE("compose agrees with the scalar trace form") {
  SplitMix rng(101);
  for (int t = 0; t < 20; ++t) {
    const auto d = rng.between(2, 4);
    const auto dims = trr::testing::random_dims(rng, d, 1, 3);
    const auto ranks = trr::testing::random_dims(rng, d, 1, 3);
    const auto cores = random_cores(rng, dims, ranks);
    const auto x = compose(cores);
    for (std::size_t l = 0; l < x.size(); ++l) {
      auto j = multi_index(dims, l + 1);
      for (auto& v : j) --v;
      CHECK(x[l] == doctest::Approx(scalar_entry(cores, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("rank-one ring is an outer product") {
  const DenseTensor a({1, 2, 1}, {2, 3}), b({1, 3, 1}, {1, -1, 5}), c({1, 2, 1}, {4, 0.5});
  const auto x = compose(TrCores({a, b, c}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 2; ++k) {
        const std::array<std::size_t, 3> idx{i + 1, j + 1, k + 1};
        CHECK(x.at(idx) == a[i] * b[j] * c[k]);
      }
  const auto zero = compose(TrCores({DenseTensor({2, 3, 2}), DenseTensor({2, 4, 2})}));
  CHECK(frobenius(zero) == 0.0);
}

TEST_CASE("core validation") {
  CHECK_THROWS_AS(TrCores({DenseTensor({1, 2, 1})}), DomainError);
  CHECK_THROWS_AS(TrCores({DenseTensor({2, 2}), DenseTensor({2, 2, 2})}), DomainError);
  CHECK_THROWS_AS(TrCores({DenseTensor({2, 2, 3}), DenseTensor({2, 2, 2})}), ShapeError);
  CHECK_THROWS_AS(TrCores({DenseTensor({2, 2, 2}), DenseTensor({2, 2, 3})}), ShapeError);
}

TEST_CASE("connection product and span merging") {
  SplitMix rng(7);
  const auto cores = random_cores(rng, {2, 3, 2}, {2, 3, 2});
  const auto x = compose(cores);

  // A single-core span is the core itself.
  for (std::size_t k = 1; k <= 3; ++k) CHECK(connect(cores, k, k) == cores.core(k));

  const auto c12 = connect(cores, 1, 2);
  REQUIRE(c12.dims() == Dims{2, 6, 2});
  const auto& g1 = cores.core(1);
  const auto& g2 = cores.core(2);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t j1 = 0; j1 < 2; ++j1)
      for (std::size_t j2 = 0; j2 < 3; ++j2)
        for (std::size_t b = 0; b < 2; ++b) {
          double s = 0.0;
          for (std::size_t g = 0; g < 3; ++g) s += g1[a + 2 * (j1 + 2 * g)] * g2[g + 3 * (j2 + 3 * b)];
          CHECK(c12[a + 2 * ((j1 + 2 * j2) + 6 * b)] == doctest::Approx(s).epsilon(1e-13));
        }

  // Merging 1..2 composes to the tensor with those modes fused.
  const auto merged = compose(merge_span(cores, 1, 2));
  REQUIRE(merged.dims() == Dims{6, 2});
  const auto m = shift_matricize(x, 1, 2);
  for (std::size_t i = 0; i < merged.size(); ++i) CHECK(merged[i] == doctest::Approx(m.data()[i]).epsilon(1e-12));

  // A wrapping span 3..1 fuses (j_3, j_1) and leaves j_2 in front of nothing.
  const auto wrapped = compose(merge_span(cores, 3, 1));
  REQUIRE(wrapped.dims() == Dims{4, 3});
  const auto w = shift_matricize(x, 3, 2);
  for (std::size_t i = 0; i < wrapped.size(); ++i) CHECK(wrapped[i] == doctest::Approx(w.data()[i]).epsilon(1e-12));

  CHECK_THROWS(connect(cores, 1, 3));
}

TEST_CASE("cyclic rotation of the cores rotates the modes") {
  SplitMix rng(13);
  for (int t = 0; t < 10; ++t) {
    const auto d = rng.between(2, 5);
    const auto dims = trr::testing::random_dims(rng, d, 1, 3);
    const auto ranks = trr::testing::random_dims(rng, d, 1, 3);
    const auto cores = random_cores(rng, dims, ranks);
    const auto x = compose(cores);
    for (std::size_t k = 2; k <= d; ++k) {
      std::vector<DenseTensor> rotated;
      for (std::size_t i = 0; i < d; ++i) rotated.push_back(cores.cores()[(k - 1 + i) % d]);
      const auto y = compose(TrCores(rotated));
      const auto expected = permute(x, shift_order(d, k));
      REQUIRE(y.dims() == expected.dims());
      for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("unfolding ranks") {
  CHECK(unfolding_rank_check(DenseTensor::filled({3, 4, 5, 2}, 1.0), 1, 2) == 1);
  CHECK(unfolding_rank_check(DenseTensor({3, 3, 3}), 2, 1) == 0);

  const auto sample = random_tr_tensor({6, 6, 6, 6}, {2, 2, 2, 2}, 42);
  for (std::size_t k = 1; k <= 4; ++k) CHECK(unfolding_rank_check(sample.tensor, k, 2) == 4);

  const auto uneven = random_tr_tensor({4, 4, 4, 4}, {2, 3, 2, 3}, 9);
  CHECK(unfolding_rank_check(uneven.tensor, 1, 2) == 4);
  CHECK(unfolding_rank_check(uneven.tensor, 2, 2) == 9);
  CHECK(unfolding_rank_check(uneven.tensor, 3, 2) == 4);
  CHECK(unfolding_rank_check(uneven.tensor, 4, 2) == 9);

  CHECK(is_subcritical({6, 6, 6, 6}, {2, 2, 2, 2}, 2));
  CHECK_FALSE(is_subcritical({2, 2, 2, 2}, {3, 3, 3, 3}, 2));
  CHECK_THROWS(random_tr_tensor({2, 2, 2, 2}, {3, 3, 3, 3}, 1));
}

TEST_CASE("random rings are seed-deterministic") {
  const auto a = random_tr_tensor({4, 5, 6}, {2, 2, 2}, 77);
  const auto b = random_tr_tensor({4, 5, 6}, {2, 2, 2}, 77);
  const auto c = random_tr_tensor({4, 5, 6}, {2, 2, 2}, 78);
  CHECK(a.tensor == b.tensor);
  CHECK_FALSE(a.tensor == c.tensor);
  CHECK(compose(a.cores) == a.tensor);
  CHECK(a.cores.ranks() == std::vector<std::size_t>{2, 2, 2});
  CHECK(a.cores.dims() == Dims{4, 5, 6});
}

TEST_CASE("TRC1 roundtrip") {
  const auto sample = random_tr_tensor({3, 4, 3, 2}, {1, 2, 2, 1}, 5);
  std::stringstream buf;
  write_trc1(buf, sample.cores);
  CHECK(buf.str().rfind("TRC1 d=4\n", 0) == 0);
  const auto back = read_trc1(buf);
  REQUIRE(back.order() == 4);
  for (std::size_t k = 1; k <= 4; ++k) CHECK(back.core(k) == sample.cores.core(k));

  std::istringstream bad("TRC2 d=4\n");
  CHECK_THROWS_AS(read_trc1(bad), FormatError);
}
