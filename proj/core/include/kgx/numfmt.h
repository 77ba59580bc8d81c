// Copyright 2026 The kgx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Number formatting and small text parsers shared by the config readers.

#ifndef KGX_NUMFMT_H_
#define KGX_NUMFMT_H_

#include <charconv>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgx/core.h"

namespace kgx {

std::string FormatDouble(double value);

// Parses the whole of `text`; throws DataError otherwise.
double ParseDouble(std::string_view text);

// Whole-string integer parse; throws DataError naming `what`.
template <typename T>
T ParseInteger(std::string_view text, std::string_view what) {
  T out{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw DataError("invalid value '" + std::string(text) + "' for " +
                    std::string(what));
  }
  return out;
}

bool ParseBool(std::string_view text, std::string_view what);

// Trimmed `key=value` pairs; blank lines and text after '#' are ignored.
// Throws DataError for a line without '='.
std::vector<std::pair<std::string, std::string>> ParseKeyValueLines(
    std::string_view text);

}  // namespace kgx

#endif  // KGX_NUMFMT_H_
