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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "specguard/cli.h"
#include "specguard/schema.h"

using namespace specguard;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "specguard_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("channel --table reproduces the leakage column") {
  const Result r = cli({"channel", "--table"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# specguard leakage_table v1");
  std::getline(in, line);
  const int expected[] = {0, 1, 10, 62, 79, 120};
  int row = 0;
  while (std::getline(in, line)) {
    const double leak = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(std::abs(leak - expected[row]) <= 1.0);
    ++row;
  }
  CHECK(row == 6);
}

TEST_CASE("ks of a file against itself") {
  const auto h = scratch("h.csv");
  REQUIRE(cli({"gen", "--kind", "attack", "-n", "10", "--out",
               scratch("a.jsonl").string(), "--histogram-out", h.string()})
              .code == 0);
  const Result r = cli({"ks", h.string(), h.string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["statistic"] == 0.0);
  CHECK(j["p_value"] == 1.0);
}

TEST_CASE("detect flags a generated attack trace") {
  const auto t = scratch("attack.jsonl");
  REQUIRE(cli({"gen", "--kind", "attack", "-n", "120", "--out", t.string()}).code == 0);
  const Result r = cli({"detect", "--detector", "threshold", "--trace", t.string()});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# specguard verdicts v1");
  int lines = 0;
  while (std::getline(in, line)) {
    CHECK(nlohmann::json::parse(line)["suspect"] == true);
    ++lines;
  }
  CHECK(lines == 3);
}

TEST_CASE("config file fills in what flags leave out") {
  const auto t = scratch("attack2.jsonl");
  REQUIRE(cli({"gen", "--kind", "attack", "-n", "50", "--out", t.string()}).code == 0);
  const auto cfg = scratch("detect.json");
  write_file_atomic(cfg, R"({"threshold": 1e9, "stl_threshold": 1e9})");
  Result r = cli({"detect", "--trace", t.string(), "--config", cfg.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"suspect\":false") != std::string::npos);
  r = cli({"detect", "--trace", t.string(), "--config", cfg.string(), "--threshold",
           "4096"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"suspect\":true") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"nonsense"}).code == 1);
  CHECK(cli({"detect", "--trace", "/no/such/file"}).code == 1);
  CHECK(cli({"channel", "--table", "--grid"}).code == 1);
  CHECK(cli({"gen", "--kind", "alien"}).code == 1);
  CHECK(cli({"fleet", "--threshold", "-1"}).code == 1);
  const Result usage = cli({"sweep"});
  CHECK(usage.code == 1);
  CHECK(usage.err.find("--trace") != std::string::npos);
  CHECK(cli({"--help"}).code == 0);

  const auto bad = scratch("bad.jsonl");
  write_file_atomic(bad, "{\"worker_id\": 3}\n");
  CHECK(cli({"detect", "--trace", bad.string()}).code == 1);
}

TEST_CASE("artifacts are written atomically") {
  const auto out = scratch("series.csv");
  const auto report = scratch("report.json");
  REQUIRE(cli({"fleet", "--out", report.string(), "--series", out.string()}).code == 0);
  CHECK(fs::exists(out));
  CHECK(fs::exists(report));
  for (const auto& e : fs::directory_iterator(out.parent_path()))
    CHECK(e.path().extension() != ".tmp");
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "t_sec,throughput_rps,memory_bytes,isolated_count");
}

}  // TEST_SUITE
