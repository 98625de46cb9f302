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

#include <sstream>

#include "doctest.h"
#include "oracles.h"
#include "specguard/error.h"
#include "specguard/rng.h"
#include "specguard/trace.h"

using namespace specguard;

namespace {

CounterSnapshot snap(std::string worker, Nanos ts, std::uint64_t itlb,
                     std::uint64_t br) {
  CounterSnapshot s;
  s.worker_id = std::move(worker);
  s.timestamp = ts;
  s.itlb_accesses = itlb;
  s.branch_instructions = br;
  return s;
}

const char* kRecord =
    R"({"worker_id":"w","ts_ns":5,"itlb":10,"br_insn":100,"br_miss":3,)"
    R"("llc_ref":7,"llc_miss":2,"l1d_acc":50,"l1d_miss":4,"md_reset":9})";

}  // namespace

TEST_SUITE("trace") {

TEST_CASE("normalize divides every counter by iTLB accesses") {
  CHECK(normalize(snap("w", 0, 1000, 423171540)).branch_instructions ==
        doctest::Approx(423171.54).epsilon(1e-12));
  CHECK(normalize(snap("w", 0, 1000, 604710)).branch_instructions ==
        doctest::Approx(604.71).epsilon(1e-12));
  const NormalizedMetrics zero = normalize(snap("w", 0, 1, 0));
  for (int i = 0; i < kMetricCount; ++i) CHECK(metric_at(zero, i) == 0.0);
}

TEST_CASE("normalize rejects a zero denominator") {
  CHECK_THROWS_AS(normalize(snap("w", 0, 0, 5)), ZeroDenominator);
}

TEST_CASE("interval averages") {
  SUBCASE("two snapshots in one window average") {
    const auto avgs = fold_interval({snap("w", 10, 1, 100), snap("w", 20, 1, 300)});
    REQUIRE(avgs.size() == 1);
    CHECK(avgs[0].mean_metrics.branch_instructions == 200.0);
    CHECK(avgs[0].sample_count == 2);
  }
  SUBCASE("one snapshot per window is the identity") {
    const auto avgs = fold_interval({snap("w", 0, 4, 100), snap("w", kNanosPerSecond, 2, 100)});
    REQUIRE(avgs.size() == 2);
    CHECK(avgs[0].mean_metrics == normalize(snap("w", 0, 4, 100)));
    CHECK(avgs[1].window_start == kNanosPerSecond);
  }
  SUBCASE("zero-iTLB samples are dropped and counted") {
    std::size_t dropped = 0;
    const auto avgs = fold_interval({snap("w", 0, 0, 1), snap("w", 1, 2, 4)},
                                    kNanosPerSecond, &dropped);
    CHECK(dropped == 1);
    REQUIRE(avgs.size() == 1);
    CHECK(avgs[0].sample_count == 1);
  }
  SUBCASE("out-of-order samples of one worker are rejected") {
    IntervalFolder f;
    f.push(snap("w", 100, 1, 1));
    CHECK_THROWS_AS(f.push(snap("w", 50, 1, 1)), OutOfOrderTimestamp);
    CHECK_NOTHROW(f.push(snap("other", 50, 1, 1)));
  }
}

TEST_CASE("1000 snapshots over 10 s match the scalar reference fold") {
  Rng rng(7);
  std::vector<CounterSnapshot> snaps;
  for (int i = 0; i < 1000; ++i) {
    CounterSnapshot s;
    s.worker_id = "w";
    s.timestamp = static_cast<Nanos>(i) * 10 * kNanosPerSecond / 1000 +
                  static_cast<Nanos>(rng() % 1000);
    s.itlb_accesses = 1 + rng() % 5000;
    s.branch_instructions = rng() % 10'000'000;
    s.branch_misses = s.branch_instructions / 50;
    s.cache_references = rng() % 100000;
    s.cache_misses = s.cache_references / 3;
    s.l1d_read_accesses = rng() % 1000000;
    s.l1d_read_misses = s.l1d_read_accesses / 20;
    s.mem_disambiguation_resets = rng() % 10000000;
    snaps.push_back(s);
  }
  const auto avgs = fold_interval(snaps);
  const auto ref = oracle::fold_reference(snaps, kNanosPerSecond);
  REQUIRE(avgs.size() == 10);
  REQUIRE(ref.size() == 10);
  for (const auto& a : avgs) {
    CHECK(a.sample_count == 100);
    const auto& r = ref.at({a.worker_id, a.window_start / kNanosPerSecond});
    for (int i = 0; i < kMetricCount; ++i)
      CHECK(metric_at(a.mean_metrics, i) == doctest::Approx(r[i]).epsilon(1e-12));
  }
}

TEST_CASE("trace parsing") {
  SUBCASE("well-formed three-line file") {
    std::istringstream in(std::string("# specguard trace v1\n") + kRecord + "\n" +
                          kRecord + "\n\n" + kRecord + "\n");
    const auto snaps = parse_trace(in);
    REQUIRE(snaps.size() == 3);
    CHECK(snaps[0].worker_id == "w");
    CHECK(snaps[0].mem_disambiguation_resets == 9);
  }
  SUBCASE("empty file is an empty stream") {
    std::istringstream in("");
    CHECK(parse_trace(in).empty());
  }
  SUBCASE("misses above accesses violate the invariant") {
    std::istringstream in(
        R"({"worker_id":"w","ts_ns":0,"itlb":1,"br_insn":1,"br_miss":2,)"
        R"("llc_ref":0,"llc_miss":0,"l1d_acc":0,"l1d_miss":0,"md_reset":0})");
    CHECK_THROWS_AS(parse_trace(in), InvariantViolation);
  }
  SUBCASE("unknown keys and bad versions are rejected") {
    std::istringstream extra(
        R"({"worker_id":"w","ts_ns":0,"itlb":1,"br_insn":1,"br_miss":0,)"
        R"("llc_ref":0,"llc_miss":0,"l1d_acc":0,"l1d_miss":0,"md_reset":0,"x":1})");
    CHECK_THROWS_AS(parse_trace(extra), ParseError);
    std::istringstream version(std::string("# specguard trace v2\n") + kRecord);
    CHECK_THROWS_AS(parse_trace(version), ParseError);
    std::istringstream negative(
        R"({"worker_id":"w","ts_ns":0,"itlb":-1,"br_insn":1,"br_miss":0,)"
        R"("llc_ref":0,"llc_miss":0,"l1d_acc":0,"l1d_miss":0,"md_reset":0})");
    CHECK_THROWS_AS(parse_trace(negative), InputError);
  }
  SUBCASE("emit then parse round-trips") {
    std::istringstream in(kRecord);
    const auto snaps = parse_trace(in);
    std::istringstream again(emit_trace(snaps));
    CHECK(parse_trace(again) == snaps);
  }
}

}  // TEST_SUITE
