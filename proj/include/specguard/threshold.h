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

#ifndef SPECGUARD_THRESHOLD_H_
#define SPECGUARD_THRESHOLD_H_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "specguard/attack_profile.h"
#include "specguard/channel.h"
#include "specguard/trace.h"

namespace specguard {

// Geometric mean of the STL-attack and benign history_reset means.
inline const double kDefaultStlThreshold =
    std::sqrt(kStlMdResetMetric * kBenignMdResetMetric);

struct ThresholdConfig {
  double branch_per_itlb_threshold = 4096;
  double stl_reset_threshold = kDefaultStlThreshold;
  std::uint64_t subrequest_limit = 10000;

  // Thresholds must be >= 0 (0 flags everything); the limit must be >= 1.
  void validate() const;
};

struct ThresholdVerdict {
  bool suspect = false;
  std::string triggering_metric;
  double value = 0;
  double threshold = 0;
};

// Branch rule first, then the history_reset rule. A benign verdict reports
// the branch rule.
ThresholdVerdict classify_threshold(const IntervalAverage& avg,
                                    const ThresholdConfig& cfg);

struct SweepPoint {
  double threshold;
  double fp_rate;
};

// False-positive rate of the branch rule over a benign population, per
// threshold. Thresholds must be ascending.
std::vector<SweepPoint> sweep_thresholds(
    std::span<const IntervalAverage> benign_averages,
    std::span<const double> thresholds);

std::string emit_sweep_csv(const std::vector<SweepPoint>& points);

struct EvasionCost {
  double target_metric = 0;

  // Padding route: full amplification, extra code pages per bit.
  std::uint64_t pages_per_bit = 0;
  std::uint64_t code_bytes = 0;
  double padded_metric = 0;
  LeakEstimate padded_leakage;

  // Amplification route: largest amplification under the target.
  double amplification = 0;
  double amplification_metric = 0;
  LeakEstimate amplification_leakage;
};

// What an attacker pays to stay under `target_metric`. Leakage uses the
// profile's request model and `runtime` (the measured JavaScript runtimes by
// default). Throws UnreachableTarget when even amplification 1 reaches the
// target, or when padding can never dilute below it.
EvasionCost evasion_cost(double target_metric, const AttackProfile& profile,
                         const RuntimeModel& runtime = RuntimeModel::tabulated());

}  // namespace specguard

#endif  // SPECGUARD_THRESHOLD_H_
