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

#ifndef SPECGUARD_TRACE_H_
#define SPECGUARD_TRACE_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specguard {

using Nanos = std::int64_t;

inline constexpr Nanos kNanosPerSecond = 1'000'000'000;

// One per-execution reading of the hardware events collected for a worker.
struct CounterSnapshot {
  std::string worker_id;
  Nanos timestamp = 0;
  std::uint64_t itlb_accesses = 0;
  std::uint64_t branch_instructions = 0;
  std::uint64_t branch_misses = 0;
  std::uint64_t cache_references = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t l1d_read_accesses = 0;
  std::uint64_t l1d_read_misses = 0;
  std::uint64_t mem_disambiguation_resets = 0;

  bool operator==(const CounterSnapshot&) const = default;
};

// Throws InvariantViolation naming the first offending field.
void validate(const CounterSnapshot& s);

// Event counts divided by iTLB accesses.
struct NormalizedMetrics {
  double branch_instructions = 0;
  double branch_misses = 0;
  double cache_references = 0;
  double cache_misses = 0;
  double l1d_read_accesses = 0;
  double l1d_read_misses = 0;
  double mem_disambiguation_resets = 0;

  bool operator==(const NormalizedMetrics&) const = default;
};

inline constexpr int kMetricCount = 7;

// Field access by index in declaration order, for generic folding.
double& metric_at(NormalizedMetrics& m, int i);
double metric_at(const NormalizedMetrics& m, int i);
std::string_view metric_name(int i);

// Throws ZeroDenominator when itlb_accesses is zero.
NormalizedMetrics normalize(const CounterSnapshot& s);

struct IntervalAverage {
  std::string worker_id;
  Nanos window_start = 0;
  NormalizedMetrics mean_metrics;
  std::size_t sample_count = 0;

  bool operator==(const IntervalAverage&) const = default;
};

// Streaming fold of snapshots into tumbling, epoch-aligned windows, one
// window per worker at a time. A window is emitted once it can no longer
// receive samples: when a later window of the same worker starts, when
// close_until() passes its end, or on flush().
class IntervalFolder {
 public:
  explicit IntervalFolder(Nanos interval = kNanosPerSecond);

  // Returns the windows of s.worker_id closed by this sample. Samples with
  // zero iTLB accesses are counted and dropped. Throws OutOfOrderTimestamp
  // when s is older than the worker's previous sample.
  std::vector<IntervalAverage> push(const CounterSnapshot& s);

  // Closes every open window ending at or before `t`, ordered by worker id.
  std::vector<IntervalAverage> close_until(Nanos t);

  // Closes all open windows, ordered by worker id.
  std::vector<IntervalAverage> flush();

  Nanos interval() const { return interval_; }
  std::size_t dropped_zero_itlb() const { return dropped_zero_itlb_; }

  Nanos window_start_for(Nanos t) const;

 private:
  struct OpenWindow {
    Nanos start = 0;
    Nanos last_ts = 0;
    std::vector<NormalizedMetrics> samples;
  };

  IntervalAverage close(const std::string& worker, OpenWindow& w) const;

  Nanos interval_;
  std::map<std::string, OpenWindow> open_;
  std::map<std::string, Nanos> last_seen_;
  std::size_t dropped_zero_itlb_ = 0;
};

// Batch form of IntervalFolder: every window with at least one usable
// sample, in emission order.
std::vector<IntervalAverage> fold_interval(
    const std::vector<CounterSnapshot>& snapshots,
    Nanos interval = kNanosPerSecond, std::size_t* dropped = nullptr);

// JSONL trace format. Keys: worker_id, ts_ns, itlb, br_insn, br_miss,
// llc_ref, llc_miss, l1d_acc, l1d_miss, md_reset. An optional leading
// "# specguard trace v1" line is accepted; other versions are rejected.
std::vector<CounterSnapshot> parse_trace(std::istream& in);
std::vector<CounterSnapshot> ingest_trace(const std::filesystem::path& path);

std::string snapshot_to_json(const CounterSnapshot& s);
std::string emit_trace(const std::vector<CounterSnapshot>& snapshots);

}  // namespace specguard

#endif  // SPECGUARD_TRACE_H_
