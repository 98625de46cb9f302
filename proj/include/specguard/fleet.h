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

#ifndef SPECGUARD_FLEET_H_
#define SPECGUARD_FLEET_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "specguard/attack_profile.h"
#include "specguard/generators.h"
#include "specguard/ks.h"
#include "specguard/rng.h"
#include "specguard/threshold.h"
#include "specguard/trace.h"

namespace specguard {

// Isolation cost model. Throughput and memory are affine in the number of
// isolated processes k:
//   throughput(k) = baseline_rps * (1 - detection_overhead_rel) - rps_slope * k
//   memory(k)     = n_workers * worker_memory_bytes + mem_slope * k
// A zero slope selects the default derived from the multipliers: with every
// worker isolated, throughput drops by isolated_cpu_multiplier and each
// worker's memory grows by the mid-range memory multiplier.
struct CostModel {
  double detection_overhead_rel = 0.02;
  double isolated_cpu_multiplier = 8;
  double isolated_mem_multiplier_low = 2;
  double isolated_mem_multiplier_high = 5;
  // Documented production figures for memory-hungry deployments and for
  // always-on precise sampling; reported, not simulated.
  double hungry_mem_overhead_low = 0.20;
  double hungry_mem_overhead_high = 0.70;
  double hungry_cpu_overhead = 0.60;
  double sampling_production_overhead = 0.50;

  double baseline_rps = 10000;
  double worker_memory_bytes = 8.0 * 1024 * 1024;
  double rps_slope = 0;  // requests/s lost per isolated process; 0 = default
  double mem_slope = 0;  // bytes per isolated process; 0 = default

  void validate() const;
  double effective_rps_slope(std::size_t n_workers) const;
  double effective_mem_slope() const;
  double throughput(std::size_t n_workers, std::size_t isolated) const;
  double memory(std::size_t n_workers, std::size_t isolated) const;
};

// Per-request limits of a worker.
struct FleetLimits {
  double cpu_ms = 50;
  double memory_mb = 64;
  double compile_ms = 200;
  std::uint64_t subrequests_per_request = 50;

  void validate() const;
};

enum class DetectorKind { kThreshold, kKs };

struct DetectorConfig {
  DetectorKind kind = DetectorKind::kThreshold;
  ThresholdConfig threshold;
  BranchHistogram ks_template;  // empty = default_attack_template()
  double ks_alpha = kDefaultKsAlpha;
};

struct FleetConfig {
  std::size_t n_benign = 50;
  std::size_t n_attack = 1;
  SpectreVariant attack_variant = SpectreVariant::kPht;
  double attack_amplification = 250000;
  double attack_pages = 0;  // > 0 makes the attackers evasive
  DetectorConfig detector;
  FleetLimits limits;
  CostModel cost_model;
  BenignProfile benign = BenignProfile::calibrated();

  double duration_s = 10;
  double attack_start_s = 2;
  std::size_t executions_per_second = 20;
  Nanos detection_interval = kNanosPerSecond;
  std::uint64_t rng_seed = kDefaultSeed;

  void validate() const;
};

// Reads the keys present in `j` on top of `base`; unknown keys are rejected.
FleetConfig fleet_config_from_json(const nlohmann::json& j,
                                   FleetConfig base = {});
nlohmann::ordered_json fleet_config_to_json(const FleetConfig& cfg);

enum class Placement { kShared, kIsolated };
enum class WorkerKind { kBenign, kAttack, kEvasive };

struct WorkerRecord {
  std::string worker_id;
  WorkerKind kind = WorkerKind::kBenign;
  Placement placement = Placement::kShared;
  std::uint64_t process_id = 0;  // 0 is the shared process
  std::vector<IntervalAverage> history;
  std::uint64_t subsequent_requests = 0;
  std::optional<Nanos> flagged_at;
  std::optional<Nanos> attack_started_at;
  std::uint64_t executions_served = 0;
  std::uint64_t served_after_isolation = 0;
  BranchHistogram histogram;  // sampled mispredictions of the current code
};

// One request served by a worker, with its counter reading.
struct ScriptExecution {
  CounterSnapshot snapshot;
  double cpu_ms = 0;
  std::uint64_t subrequests = 0;
  bool attack_code = false;
};

// A further request routed to a worker without a counter reading.
struct Subrequest {
  std::string worker_id;
  Nanos timestamp = 0;
};

// Detection-interval boundary: closes windows ending at or before t.
struct IntervalTick {
  Nanos timestamp = 0;
};

using FleetEvent = std::variant<ScriptExecution, Subrequest, IntervalTick>;

enum class ActionKind { kVerdict, kIsolate, kRedirect, kLimitExceeded };

struct Action {
  ActionKind kind = ActionKind::kVerdict;
  std::string worker_id;
  Nanos timestamp = 0;
  bool suspect = false;          // kVerdict
  std::string detail;            // triggering metric / limit name
  double value = 0;
};

std::string action_name(ActionKind kind);

struct FleetState {
  std::map<std::string, WorkerRecord> workers;
  IntervalFolder folder;
  std::uint64_t next_process_id = 1;
  Nanos now = 0;
  BranchHistogram ks_template;
};

// Builds the workers of `cfg`: "benign-NNNNNN" and "attack-NNNNNN", all in
// the shared process.
FleetState make_fleet_state(const FleetConfig& cfg);

// Applies one event. Throws UnknownWorker for an unknown worker id.
std::vector<Action> step_fleet(FleetState& state, const FleetEvent& event,
                               const FleetConfig& cfg);

struct SeriesPoint {
  double t_sec = 0;
  double throughput_rps = 0;
  double memory_bytes = 0;
  std::size_t isolated_count = 0;
};

struct FleetReport {
  std::uint64_t seed = 0;
  std::size_t n_workers = 0;
  std::size_t benign_flagged = 0;
  double fp_rate = 0;
  std::optional<double> predicted_fp_rate;  // threshold detector only
  double fp_standard_error = 0;
  std::vector<std::optional<double>> detection_latency_intervals;
  std::size_t co_residency_violations = 0;
  std::vector<std::string> starved_workers;
  std::size_t redirects = 0;
  std::size_t limit_exceeded = 0;
  double max_served_cpu_ms = 0;
  std::uint64_t max_served_subrequests = 0;
  std::size_t isolated_final = 0;
  bool degraded = false;
  std::string label;
  double total_overhead_rel = 0;
  std::string benign_family;
  std::vector<SeriesPoint> series;
  std::vector<Action> timeline;  // verdicts and isolations
};

inline constexpr const char* kDegradedLabel =
    "degraded to strict process isolation";

FleetReport run_fleet(const FleetConfig& cfg);

// Benign flag probability predicted from the population model.
double predicted_fp_rate(const FleetConfig& cfg);

std::string fleet_report_json(const FleetReport& report,
                              const FleetConfig& cfg);
std::string fleet_series_csv(const FleetReport& report);

}  // namespace specguard

#endif  // SPECGUARD_FLEET_H_
