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

#include "specguard/threshold.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specguard/error.h"
#include "specguard/schema.h"

namespace specguard {

void ThresholdConfig::validate() const {
  if (!(branch_per_itlb_threshold >= 0) || !(stl_reset_threshold >= 0))
    throw InputError("thresholds must be non-negative");
  if (subrequest_limit == 0) throw InputError("subrequest_limit must be >= 1");
}

ThresholdVerdict classify_threshold(const IntervalAverage& avg,
                                    const ThresholdConfig& cfg) {
  const double branch = avg.mean_metrics.branch_instructions;
  const double stl = avg.mean_metrics.mem_disambiguation_resets;
  if (branch >= cfg.branch_per_itlb_threshold)
    return {true, "branch_instructions", branch, cfg.branch_per_itlb_threshold};
  if (stl >= cfg.stl_reset_threshold)
    return {true, "mem_disambiguation_resets", stl, cfg.stl_reset_threshold};
  return {false, "branch_instructions", branch, cfg.branch_per_itlb_threshold};
}

std::vector<SweepPoint> sweep_thresholds(
    std::span<const IntervalAverage> benign_averages,
    std::span<const double> thresholds) {
  if (benign_averages.empty()) throw EmptyPopulation();
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw InputError("thresholds must be ascending");
  std::vector<double> metric;
  metric.reserve(benign_averages.size());
  for (const auto& a : benign_averages)
    metric.push_back(a.mean_metrics.branch_instructions);
  std::sort(metric.begin(), metric.end());
  const double n = static_cast<double>(metric.size());
  std::vector<SweepPoint> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    const auto below = std::lower_bound(metric.begin(), metric.end(), t);
    out.push_back({t, static_cast<double>(metric.end() - below) / n});
  }
  return out;
}

std::string emit_sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out.precision(17);
  out << schema_line("sweep") << "\n" << "threshold,fp_rate\n";
  for (const auto& p : points) out << p.threshold << ',' << p.fp_rate << '\n';
  return out.str();
}

EvasionCost evasion_cost(double target_metric, const AttackProfile& profile,
                         const RuntimeModel& runtime) {
  if (!(target_metric > 0)) throw InputError("target metric must be positive");
  EvasionCost cost;
  cost.target_metric = target_metric;

  if (profile.metric_at(1) >= target_metric) {
    throw UnreachableTarget("metric " + std::to_string(profile.metric_at(1)) +
                            " without amplification already reaches " +
                            std::to_string(target_metric));
  }

  const double full = profile.full_amplification;
  const double base = profile.metric_at(full);
  if (base >= target_metric) {
    if (profile.branches_per_page >= target_metric)
      throw UnreachableTarget("padding pages carry too many branches");
    const double exact = profile.base_itlb_per_bit * (base - target_metric) /
                         (target_metric - profile.branches_per_page);
    auto pages = static_cast<std::uint64_t>(std::floor(exact)) + 1;
    while (profile.padded_metric(full, static_cast<double>(pages)) >= target_metric)
      ++pages;
    while (pages > 0 &&
           profile.padded_metric(full, static_cast<double>(pages - 1)) < target_metric)
      --pages;
    cost.pages_per_bit = pages;
  }
  cost.code_bytes = cost.pages_per_bit * profile.page_bytes;
  cost.padded_metric =
      profile.padded_metric(full, static_cast<double>(cost.pages_per_bit));
  cost.padded_leakage =
      leakage_rate(full, profile.requests_at(full), runtime);

  // metric_at is increasing in amplification; largest integer under target.
  double lo = 1, hi = std::floor(full);
  if (profile.metric_at(hi) < target_metric) {
    lo = hi;
  } else {
    while (hi - lo > 1) {
      const double mid = std::floor((lo + hi) / 2);
      if (profile.metric_at(mid) < target_metric) lo = mid;
      else hi = mid;
    }
  }
  cost.amplification = lo;
  cost.amplification_metric = profile.metric_at(lo);
  cost.amplification_leakage =
      leakage_rate(lo, profile.requests_at(lo), runtime);
  return cost;
}

}  // namespace specguard
