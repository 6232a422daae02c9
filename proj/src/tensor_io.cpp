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

#include "trr/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "trr/errors.hpp"

namespace trr {

namespace {

constexpr std::array<char, 4> kMagic = {'T', 'R', 'T', '1'};
// Refuse headers that would ask for absurd allocations.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw FormatError(std::string("TRT1: truncated ") + what);
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

void write_trt1(std::ostream& out, const DenseTensor& x) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(x.order()));
  for (std::size_t n : x.dims()) put_le<std::uint64_t>(out, n);
  for (double v : x.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw IoError("TRT1: write failed");
}

DenseTensor read_trt1(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || magic != kMagic) throw FormatError("TRT1: bad magic");
  const auto d = get_le<std::uint32_t>(in, "order");
  if (d == 0) throw FormatError("TRT1: order must be at least 1");
  Dims dims(d);
  std::uint64_t total = 1;
  for (auto& n : dims) {
    const auto v = get_le<std::uint64_t>(in, "dims");
    if (v == 0) throw FormatError("TRT1: zero dimension");
    if (v > kMaxElements || total > kMaxElements / v) {
      throw FormatError("TRT1: tensor too large");
    }
    total *= v;
    n = static_cast<std::size_t>(v);
  }
  std::vector<double> data(static_cast<std::size_t>(total));
  for (double& v : data) v = std::bit_cast<double>(get_le<std::uint64_t>(in, "payload"));
  return DenseTensor(std::move(dims), std::move(data));
}

void save_trt1(const std::filesystem::path& path, const DenseTensor& x) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_trt1(out, x);
}

DenseTensor load_trt1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_trt1(in);
}

}  // namespace trr
