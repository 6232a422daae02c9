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

#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "test_support.hpp"
#include "trr/errors.hpp"
#include "trr/tensor.hpp"
#include "trr/tensor_io.hpp"

using namespace trr;
using trr::testing::SplitMix;

namespace {

std::vector<std::size_t> inverse_order(const std::vector<std::size_t>& p) {
  std::vector<std::size_t> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[p[i] - 1] = i + 1;
  return q;
}

std::vector<std::size_t> random_permutation(SplitMix& rng, std::size_t d) {
  std::vector<std::size_t> p(d);
  std::iota(p.begin(), p.end(), 1);
  for (std::size_t i = d; i > 1; --i) std::swap(p[i - 1], p[rng.between(0, i - 1)]);
  return p;
}

}  // namespace

TEST_CASE("linear index follows first-index-fastest order") {
  const std::array<std::size_t, 2> a{1, 1}, b{2, 1};
  CHECK(linear_index({2, 3}, a) == 1);
  CHECK(linear_index({2, 3}, b) == 2);
  const std::array<std::size_t, 3> c{2, 3, 4};
  CHECK(linear_index({2, 3, 4}, c) == 24);
  const std::array<std::size_t, 3> mid{2, 1, 3};
  CHECK(linear_index({2, 3, 4}, mid) == 2 + 0 * 2 + 2 * 6);

  SplitMix rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto dims = trr::testing::random_dims(rng, rng.between(1, 5), 1, 5);
    const auto n = element_count(dims);
    const auto l = rng.between(1, n);
    CHECK(linear_index(dims, multi_index(dims, l)) == l);
  }
}

TEST_CASE("out of range indices and empty shapes are rejected") {
  const std::array<std::size_t, 2> zero{0, 1}, big{3, 1};
  CHECK_THROWS_AS(linear_index({2, 3}, zero), BoundsError);
  CHECK_THROWS_AS(linear_index({2, 3}, big), BoundsError);
  CHECK_THROWS_AS(element_count({}), DomainError);
  CHECK_THROWS_AS(element_count({2, 0}), DomainError);
  CHECK_THROWS_AS(DenseTensor({2, 2}, std::vector<double>(3)), ShapeError);
}

TEST_CASE("permute matches the reference layout") {
  const auto x = trr::testing::iota_tensor({2, 3, 4});
  const std::array<std::size_t, 3> order{3, 1, 2};
  const auto y = permute(x, order);
  CHECK(y.dims() == Dims{4, 2, 3});
  const std::vector<double> expected{1, 7,  13, 19, 2, 8,  14, 20, 3, 9,  15, 21,
                                     4, 10, 16, 22, 5, 11, 17, 23, 6, 12, 18, 24};
  CHECK(std::vector<double>(y.data().begin(), y.data().end()) == expected);

  // Every entry against the defining relation.
  for (std::size_t l = 1; l <= y.size(); ++l) {
    const auto j = multi_index(y.dims(), l);
    std::array<std::size_t, 3> k{};
    for (std::size_t i = 0; i < 3; ++i) k[order[i] - 1] = j[i];
    CHECK(y[l - 1] == x.at(k));
  }
}

TEST_CASE("permute by identity and inverse is exact") {
  SplitMix rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto d = rng.between(1, 5);
    const auto x = trr::testing::random_tensor(rng, trr::testing::random_dims(rng, d, 1, 4));
    std::vector<std::size_t> id(d);
    std::iota(id.begin(), id.end(), 1);
    CHECK(permute(x, id) == x);
    const auto p = random_permutation(rng, d);
    CHECK(permute(permute(x, p), inverse_order(p)) == x);
    CHECK(permute(permute(x, shift_order(d, 1 + t % d)), inverse_order(shift_order(d, 1 + t % d))) ==
          x);
  }
  const std::array<std::size_t, 2> repeated{1, 1};
  CHECK_THROWS(permute(trr::testing::iota_tensor({2, 2}), repeated));
}

TEST_CASE("mode-2 unfolding of a 2x3x4 tensor") {
  const auto x = trr::testing::iota_tensor({2, 3, 4});
  const auto m = mode_unfold(x, 2);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 8);
  const std::vector<double> expected{1,  3,  5,  2,  4,  6,  7,  9,  11, 8,  10, 12,
                                     13, 15, 17, 14, 16, 18, 19, 21, 23, 20, 22, 24};
  CHECK(std::vector<double>(m.data().begin(), m.data().end()) == expected);
  CHECK(mode_fold(m, 2, x.dims()) == x);
  CHECK_THROWS_AS(mode_unfold(x, 4), BoundsError);
}

TEST_CASE("shift matricization layout") {
  const auto x = trr::testing::iota_tensor({2, 3, 4});
  CHECK(shift_order(3, 2) == std::vector<std::size_t>{2, 3, 1});
  CHECK(shift_order(4, 1) == std::vector<std::size_t>{1, 2, 3, 4});
  const auto m = shift_matricize(x, 2, 2);
  REQUIRE(m.rows() == 12);
  REQUIRE(m.cols() == 2);
  const std::vector<double> expected{1, 3,  5,  7,  9,  11, 13, 15, 17, 19, 21, 23,
                                     2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24};
  CHECK(std::vector<double>(m.data().begin(), m.data().end()) == expected);
}

TEST_CASE("matricization shapes") {
  const DenseTensor x({2, 3, 4, 5});
  const auto a = shift_matricize(x, 1, 2);
  CHECK(a.rows() == 6);
  CHECK(a.cols() == 20);
  const auto b = shift_matricize(x, 3, 2);
  CHECK(b.rows() == 20);
  CHECK(b.cols() == 6);
  CHECK(shift_shape({2, 3, 4, 5}, 2, 2) == std::pair<std::size_t, std::size_t>{12, 10});
  CHECK(shift_shape({4, 4, 4, 4}, 1, 2) == std::pair<std::size_t, std::size_t>{16, 16});
  CHECK(shift_shape({2, 3, 4, 5, 6}, 2, 3) == std::pair<std::size_t, std::size_t>{60, 12});
  CHECK(balanced_split(4) == 2);
  CHECK(balanced_split(5) == 3);
  CHECK(balanced_unfold(DenseTensor({2, 3, 4, 5, 6}), 4).rows() == 5 * 6 * 2);

  // Order two: X_{1,1} is the matrix itself.
  SplitMix rng(5);
  const auto y = trr::testing::random_tensor(rng, {3, 4});
  const auto m = shift_matricize(y, 1, 1);
  CHECK(std::vector<double>(m.data().begin(), m.data().end()) ==
        std::vector<double>(y.data().begin(), y.data().end()));
  CHECK_THROWS(shift_matricize(y, 1, 2));
  CHECK_THROWS(shift_matricize(y, 3, 1));
}

TEST_CASE("fold inverts every unfolding") {
  SplitMix rng(29);
  for (int t = 0; t < 100; ++t) {
    const auto d = rng.between(2, 5);
    const auto x = trr::testing::random_tensor(rng, trr::testing::random_dims(rng, d, 1, 4));
    for (std::size_t k = 1; k <= d; ++k) {
      CHECK(mode_fold(mode_unfold(x, k), k, x.dims()) == x);
      CHECK(balanced_fold(balanced_unfold(x, k), k, x.dims()) == x);
      for (std::size_t l = 1; l < d; ++l) {
        CHECK(shift_fold(shift_matricize(x, k, l), k, l, x.dims()) == x);
      }
    }
  }
}

TEST_CASE("elementwise algebra") {
  SplitMix rng(8);
  const auto x = trr::testing::random_tensor(rng, {3, 4, 2});
  const auto y = trr::testing::random_tensor(rng, {3, 4, 2});
  CHECK(hadamard(x, DenseTensor::filled(x.dims(), 1.0)) == x);
  CHECK(frobenius(DenseTensor({4, 4})) == 0.0);
  CHECK(inner(x, x) >= 0.0);
  CHECK(inner(x, x) == doctest::Approx(frobenius(x) * frobenius(x)).epsilon(1e-14));
  CHECK(inner(x, y) == doctest::Approx(inner(y, x)).epsilon(1e-14));
  CHECK(frobenius(x + y - y - x) <= 1e-15);
  const auto two = 2.0 * x;
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(two[i] == 2.0 * x[i]);
  CHECK(safe_divide(two, x) == DenseTensor::filled(x.dims(), 2.0));
  CHECK_THROWS_AS(safe_divide(x, DenseTensor(x.dims())), DomainError);
  CHECK_THROWS_AS(x + DenseTensor({3, 4}), ShapeError);
  CHECK_THROWS_AS(x + DenseTensor({4, 3, 2}), ShapeError);
  const std::array<double, 3> bad{1.0, std::nan(""), 2.0};
  CHECK_FALSE(all_finite(bad));
}

TEST_CASE("sampling masks select entries") {
  DenseTensor p({2, 2}, {1, 0, 0, 1});
  const SamplingMask mask(p);
  CHECK(mask.observed_count() == 2);
  CHECK(mask.ratio() == 0.5);
  const DenseTensor x({2, 2}, {5, std::nan(""), -1, 7});
  const auto y = apply_mask(mask, x);
  CHECK(y == DenseTensor({2, 2}, {5, 0, 0, 7}));
  CHECK_THROWS_AS(SamplingMask(DenseTensor({2}, {1, 0.5})), DomainError);
  CHECK(SamplingMask::full({3, 3}).ratio() == 1.0);
}

TEST_CASE("TRT1 roundtrip and malformed input") {
  SplitMix rng(21);
  const auto x = trr::testing::random_tensor(rng, {3, 1, 4, 2}, 1e3);
  std::stringstream buf;
  write_trt1(buf, x);
  const std::string bytes = buf.str();
  CHECK(bytes.size() == 4 + 4 + 4 * 8 + x.size() * 8);
  std::istringstream in(bytes);
  CHECK(read_trt1(in) == x);

  std::string wrong = bytes;
  wrong[3] = '2';
  std::istringstream bad_magic(wrong);
  CHECK_THROWS_AS(read_trt1(bad_magic), FormatError);

  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_trt1(truncated), FormatError);

  std::istringstream empty("");
  CHECK_THROWS_AS(read_trt1(empty), FormatError);

  const auto dir = trr::testing::scratch_dir("trt1");
  save_trt1(dir / "x.trt1", x);
  CHECK(load_trt1(dir / "x.trt1") == x);
  CHECK_THROWS_AS(load_trt1(dir / "missing.trt1"), IoError);
}
