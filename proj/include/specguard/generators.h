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

#ifndef SPECGUARD_GENERATORS_H_
#define SPECGUARD_GENERATORS_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "specguard/attack_profile.h"
#include "specguard/ks.h"
#include "specguard/rng.h"
#include "specguard/trace.h"

namespace specguard {

// A point on the benign false-positive curve: P(metric >= threshold).
struct SurvivalTarget {
  double threshold;
  double survival;
};

// Benign branch/iTLB metric population.
//
// Family: mixture of a lognormal body and a log-uniform tail on
// [tail_low, truncation), truncated at `truncation`. A plain lognormal
// cannot pass through all three measured points of the false-positive curve
// (its tail is ~7x too light at 8192), so the tail weight absorbs the
// excess; calibrated() solves for body parameters and weight.
struct BenignProfile {
  double body_log_mean = 0;
  double body_log_sd = 0;
  double tail_weight = 0;
  double tail_low = 4096;
  double truncation = 65536;

  // history_reset per iTLB access: lognormal with this mean.
  double md_reset_mean = kBenignMdResetMetric;
  double md_reset_log_sd = 0.15;

  // Spread of one script's executions around its own level.
  double execution_spread = 0.02;

  // Share of programs with a handful of hot loop branches in their
  // misprediction histogram, which look like an attack to the KS detector.
  double loop_heavy_fraction = 0.03;

  // P(metric >= x) of the population.
  double survival(double x) const;
  double mean() const;
  double stddev() const;
  std::string describe() const;

  static std::array<SurvivalTarget, 3> default_targets();

  // Fits the family to three survival points (ascending thresholds), the
  // middle one also being the tail's lower edge. Throws
  // CalibrationInfeasible when no mixture weight in [0, s_mid) fits.
  static BenignProfile calibrated(
      const std::array<SurvivalTarget, 3>& targets = default_targets(),
      double truncation = 65536);
};

// A benign script: the population draw for one worker.
struct BenignScript {
  double branch_metric = 0;
  double md_reset_metric = 0;
  double branch_miss_rate = 0;   // misses per retired branch
  double llc_ref_metric = 0;     // LLC references per iTLB access
  double llc_miss_rate = 0;
  double l1d_metric = 0;         // L1D reads per iTLB access
  double l1d_miss_rate = 0;
  double itlb_median = 0;        // iTLB accesses per execution
};

double sample_benign_metric(const BenignProfile& profile, Rng& rng);
BenignScript sample_benign_script(const BenignProfile& profile, Rng& rng);

// One execution of `script`, with the script's per-execution spread.
CounterSnapshot benign_execution(const BenignScript& script,
                                 const BenignProfile& profile,
                                 const std::string& worker, Nanos ts, Rng& rng);

// n executions, each from an independently drawn script (worker
// "benign-<i>"), so the normalized metrics follow the population.
std::vector<CounterSnapshot> generate_benign(const BenignProfile& profile,
                                             std::size_t n, std::uint64_t seed);

// One execution of an attack worker: `pages` extra code pages per bit.
CounterSnapshot attack_execution(const AttackProfile& profile,
                                 double amplification, double pages,
                                 const std::string& worker, Nanos ts, Rng& rng);

struct AttackTrace {
  std::vector<CounterSnapshot> snapshots;
  BranchHistogram histogram;
};

struct AttackTraceOptions {
  std::size_t executions = 500;
  Nanos period = 20'000'000;  // 50 executions per second
  std::string worker_id = "attack";
};

AttackTrace generate_attack(SpectreVariant variant, double amplification,
                            double pages, std::uint64_t seed,
                            const AttackTraceOptions& opts = {});

// Misprediction histogram of an in-place Spectre-PHT gadget: the delay loop
// first, the mistrained bounds check second, a short geometric tail of
// gadget-support branches and a floor of rarely mispredicted runtime
// branches.
BranchHistogram attack_histogram(std::uint64_t seed);

// Histogram of a benign program: hundreds to thousands of branches with a
// broad lognormal count distribution, or (loop_heavy_fraction of programs)
// a few dominant loops.
BranchHistogram benign_histogram(const BenignProfile& profile,
                                 std::uint64_t seed);

inline constexpr std::uint64_t kTemplateSeed = 0x5eed7e3a1a7eULL;

// The shipped attack template, data/pht_template.csv, is this histogram.
BranchHistogram default_attack_template();

}  // namespace specguard

#endif  // SPECGUARD_GENERATORS_H_
