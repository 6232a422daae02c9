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

#ifndef TRR_KEYVALUE_HPP
#define TRR_KEYVALUE_HPP

// Flat "key = value" text documents. Blank lines and lines starting with
// '#' are ignored; a key may repeat, in which case its values form a list
// in document order.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace trr {

class KeyValueDocument {
 public:
  /// Throws FormatError on a non-comment line without '=' or with an empty key.
  static KeyValueDocument parse(std::string_view text);

  bool contains(std::string_view key) const;
  /// Single value; FormatError if the key is repeated.
  std::optional<std::string> get(std::string_view key) const;
  std::vector<std::string> get_all(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Strict scalar conversions; FormatError names the key on failure.
double parse_real(std::string_view key, std::string_view text);
std::uint64_t parse_unsigned(std::string_view key, std::string_view text);
bool parse_bool(std::string_view key, std::string_view text);
/// Comma-separated list, e.g. "2,2,2,2".
std::vector<std::size_t> parse_size_list(std::string_view key, std::string_view text);
std::vector<double> parse_real_list(std::string_view key, std::string_view text);

/// Shortest round-trippable decimal form.
std::string format_real(double v);

}  // namespace trr

#endif  // TRR_KEYVALUE_HPP
