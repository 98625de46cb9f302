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

#include <numeric>

#include "doctest.h"
#include "oracles.h"
#include "specguard/channel.h"
#include "specguard/error.h"
#include "specguard/rng.h"

using namespace specguard;

namespace {

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("noise-free timing difference is linear in amplification") {
  const ChannelParams p = ChannelParams::noise_free();
  for (double a : {1.0, 10.0, 1000.0, 250000.0}) {
    const double delta = simulate_bit(0, a, p, 1) - simulate_bit(1, a, p, 2);
    CHECK(delta == doctest::Approx(a * (p.miss_cycles - p.hit_cycles)).epsilon(1e-12));
  }
}

TEST_CASE("calibrated mean difference at full amplification") {
  const ChannelParams p = ChannelParams::javascript();
  const double delta = mean(simulate_bits(0, 250000, p, 2000, 11)) -
                       mean(simulate_bits(1, 250000, p, 2000, 12));
  CHECK(delta == doctest::Approx(21779307).epsilon(0.10));
  CHECK(mean(simulate_bits(0, 1000, p, 2000, 3)) >
        mean(simulate_bits(1, 1000, p, 2000, 4)));
}

TEST_CASE("native calibration takes about 2.5 s per bit at 100000 iterations") {
  CHECK(bit_wall_time_s(100000, ChannelParams::native()) ==
        doctest::Approx(2.5).epsilon(0.10));
}

TEST_CASE("simulation is deterministic per seed") {
  const ChannelParams p;
  CHECK(simulate_bits(0, 100, p, 50, 9) == simulate_bits(0, 100, p, 50, 9));
  CHECK(simulate_bit(1, 100, p, 9) == simulate_bit(1, 100, p, 9));
}

TEST_CASE("box test") {
  SUBCASE("disjoint point masses") {
    const std::vector<double> zeros(20, 200), ones(20, 100);
    const BoxTestResult r = box_test(zeros, ones);
    CHECK(r.distinguishable);
    CHECK(r.decision_threshold == 150.0);
  }
  SUBCASE("identical distributions") {
    std::vector<double> xs(100);
    std::iota(xs.begin(), xs.end(), 0.0);
    CHECK_FALSE(box_test(xs, xs).distinguishable);
  }
  SUBCASE("coinciding point masses are degenerate") {
    const std::vector<double> same(5, 7);
    CHECK_THROWS_AS(box_test(same, same), DegenerateSamples);
  }
  SUBCASE("bad percentiles") {
    const std::vector<double> xs = {1, 2};
    CHECK_THROWS_AS(box_test(xs, xs, 90, 10), InputError);
  }
}

TEST_CASE("calibrated channel at amplification 1000 with 250 requests per class") {
  // Each of 1000 seeded trials averages 250 measurements per class; the box
  // test separates the two classes of averages and the midpoint decides.
  const ChannelParams p;
  const std::size_t trials = 1000, n = 250;
  std::vector<double> zeros, ones;
  for (std::size_t t = 0; t < trials; ++t) {
    zeros.push_back(mean(simulate_bits(0, 1000, p, n, derive_seed(5, {t, 0}))));
    ones.push_back(mean(simulate_bits(1, 1000, p, n, derive_seed(5, {t, 1}))));
  }
  const BoxTestResult r = box_test(zeros, ones);
  CHECK(r.distinguishable);
  std::size_t correct = 0;
  for (std::size_t t = 0; t < trials; ++t)
    correct += (zeros[t] > r.decision_threshold) + (ones[t] <= r.decision_threshold);
  CHECK(static_cast<double>(correct) / (2.0 * trials) >= 0.99);
}

TEST_CASE("required requests") {
  CHECK(required_requests(1, ChannelParams::noise_free(), 0.99, 1) == 1);
  const ChannelParams p;
  std::uint64_t prev = required_requests(1, p, 0.99, 3);
  CHECK(prev >= 175000);
  CHECK(prev <= 325000);
  for (double a = 2; a <= 16384; a *= 2) {
    const std::uint64_t n = required_requests(a, p, 0.99, 3);
    CHECK(n <= prev);
    prev = n;
  }
  CHECK_THROWS_AS(required_requests(1, p, 0.99, 3, {{}, 1000}), RequestsUnreachable);
  CHECK_THROWS_AS(required_requests(1, p, 1.0, 3), InputError);
}

TEST_CASE("sampled and binomial votes agree") {
  const ChannelParams p;
  MonteCarloOptions sampled{400, VoteMethod::kSampled};
  MonteCarloOptions binomial{400, VoteMethod::kBinomial};
  for (std::uint64_t n : {1, 50, 400}) {
    const double s = estimate_success(100, n, p, 8, sampled);
    const double b = estimate_success(100, n, p, 8, binomial);
    CHECK(std::abs(s - b) < 0.08);
  }
}

TEST_CASE("success grid") {
  const std::vector<double> one_amp = {1};
  const std::vector<std::uint64_t> one_req = {1};
  CHECK(success_rate_curve(one_amp, one_req, ChannelParams::noise_free(), 1)[0][0] == 1.0);

  const ChannelParams p;
  const std::vector<double> high = {250000};
  CHECK(success_rate_curve(high, one_req, p, 1)[0][0] >= 0.99);
  const std::vector<double> low = {10};
  const std::vector<std::uint64_t> many = {25000};
  CHECK(success_rate_curve(low, many, p, 1)[0][0] > 0.95);
}

TEST_CASE("leakage rate") {
  CHECK(leakage_rate(250000, 1, 30.0).leakage_bits_per_hour == doctest::Approx(120));
  CHECK(std::floor(leakage_rate(1000, 250, 0.231).leakage_bits_per_hour) == 62);
  CHECK(std::floor(leakage_rate(10, 25000, 0.123).leakage_bits_per_hour) == 1);
  for (const JsAttackRow& row : js_attack_table()) {
    const double got =
        leakage_rate(row.amplification, row.required_requests, row.runtime_ms / 1000)
            .leakage_bits_per_hour;
    CHECK(got == doctest::Approx(oracle::leak_per_hour(
                                     static_cast<double>(row.required_requests),
                                     row.runtime_ms / 1000)));
    CHECK(std::abs(got - row.leaked_bits_per_hour) <= 1.0);
  }
  // A noisy channel leaks less: capacity of a binary symmetric channel.
  CHECK(leakage_rate(250000, 1, 30.0, 0.9).leakage_bits_per_hour < 120);
  CHECK(bsc_capacity(0.5) == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("runtime models") {
  const RuntimeModel fit = RuntimeModel::fitted_to_table();
  CHECK(fit.is_affine());
  CHECK(fit.c0_ms() == doctest::Approx(216.374).epsilon(1e-4));
  CHECK(fit.c1_ms() == doctest::Approx(0.1191974).epsilon(1e-5));
  const RuntimeModel tab = RuntimeModel::tabulated();
  for (const JsAttackRow& row : js_attack_table())
    CHECK(tab.runtime_s(row.amplification) * 1000 == doctest::Approx(row.runtime_ms));
}

}  // TEST_SUITE
