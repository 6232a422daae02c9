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

#ifndef TRR_TENSOR_IO_HPP
#define TRR_TENSOR_IO_HPP

// TRT1 binary tensor format:
//   bytes 0..3   magic "TRT1"
//   u32 LE       order d
//   d x u64 LE   dims, first mode first
//   prod(dims) x f64 LE   entries, first index fastest

#include <filesystem>
#include <iosfwd>

#include "trr/tensor.hpp"

namespace trr {

void write_trt1(std::ostream& out, const DenseTensor& x);

/// Throws FormatError on wrong magic, zero order/dim or truncated payload.
DenseTensor read_trt1(std::istream& in);

void save_trt1(const std::filesystem::path& path, const DenseTensor& x);
DenseTensor load_trt1(const std::filesystem::path& path);

}  // namespace trr

#endif  // TRR_TENSOR_IO_HPP
