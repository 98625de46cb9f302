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

#include "specguard/schema.h"

#include <fstream>
#include <sstream>
#include <system_error>

#include "specguard/error.h"

namespace specguard {

std::string schema_line(std::string_view kind) {
  return "# specguard " + std::string(kind) + " v" +
         std::to_string(kSchemaVersion);
}

bool is_comment_line(std::string_view line) {
  return !line.empty() && line.front() == '#';
}

void check_schema_line(std::string_view line, std::string_view kind,
                       std::size_t line_no) {
  const std::string prefix = "# specguard " + std::string(kind) + " v";
  if (line.substr(0, prefix.size()) != prefix) {
    throw ParseError(line_no, "expected schema header '" + prefix + "N'");
  }
  std::string_view version = line.substr(prefix.size());
  while (!version.empty() && (version.back() == '\r' || version.back() == ' '))
    version.remove_suffix(1);
  if (version != std::to_string(kSchemaVersion)) {
    throw ParseError(line_no, "unsupported " + std::string(kind) +
                                  " schema version '" + std::string(version) +
                                  "'");
  }
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw InputError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot rename onto '" + path.string() + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace specguard
