// Copyright 2026 The specguard Authors
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

#ifndef SPECGUARD_SCHEMA_H_
#define SPECGUARD_SCHEMA_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

namespace specguard {

inline constexpr int kSchemaVersion = 1;

// Every line-oriented artifact starts with "# specguard <kind> v<N>".
std::string schema_line(std::string_view kind);

// True for any line beginning with '#'.
bool is_comment_line(std::string_view line);

// Throws ParseError unless `line` names `kind` at a supported version.
void check_schema_line(std::string_view line, std::string_view kind,
                       std::size_t line_no);

// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace specguard

#endif  // SPECGUARD_SCHEMA_H_
