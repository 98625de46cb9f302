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

#include "specguard/trace.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "specguard/error.h"
#include "specguard/schema.h"

namespace specguard {
namespace {

constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "branch_instructions", "branch_misses",     "cache_references",
    "cache_misses",        "l1d_read_accesses", "l1d_read_misses",
    "mem_disambiguation_resets"};

// JSONL key -> snapshot member, in emission order.
struct CountKey {
  std::string_view key;
  std::uint64_t CounterSnapshot::*member;
};
constexpr std::array<CountKey, 8> kCountKeys = {{
    {"itlb", &CounterSnapshot::itlb_accesses},
    {"br_insn", &CounterSnapshot::branch_instructions},
    {"br_miss", &CounterSnapshot::branch_misses},
    {"llc_ref", &CounterSnapshot::cache_references},
    {"llc_miss", &CounterSnapshot::cache_misses},
    {"l1d_acc", &CounterSnapshot::l1d_read_accesses},
    {"l1d_miss", &CounterSnapshot::l1d_read_misses},
    {"md_reset", &CounterSnapshot::mem_disambiguation_resets},
}};

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r';
  });
}

CounterSnapshot parse_record(std::string_view line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line_no, "record is not a JSON object");

  for (const auto& [key, _] : j.items()) {
    bool known = key == "worker_id" || key == "ts_ns";
    for (const auto& ck : kCountKeys) known = known || key == ck.key;
    if (!known) throw ParseError(line_no, "unknown key '" + key + "'");
  }

  CounterSnapshot s;
  auto wid = j.find("worker_id");
  if (wid == j.end() || !wid->is_string())
    throw ParseError(line_no, "worker_id must be a string");
  s.worker_id = wid->get<std::string>();

  auto ts = j.find("ts_ns");
  if (ts == j.end() || !ts->is_number_integer())
    throw ParseError(line_no, "ts_ns must be an integer");
  if (ts->is_number_unsigned()) {
    auto v = ts->get<std::uint64_t>();
    if (v > static_cast<std::uint64_t>(INT64_MAX))
      throw ParseError(line_no, "ts_ns out of range");
    s.timestamp = static_cast<Nanos>(v);
  } else {
    s.timestamp = ts->get<std::int64_t>();
  }

  for (const auto& ck : kCountKeys) {
    auto it = j.find(std::string(ck.key));
    if (it == j.end())
      throw ParseError(line_no, "missing key '" + std::string(ck.key) + "'");
    if (!it->is_number_integer())
      throw ParseError(line_no, std::string(ck.key) + " must be an integer");
    if (!it->is_number_unsigned() && it->get<std::int64_t>() < 0)
      throw InvariantViolation(std::string(ck.key), "count is negative");
    s.*ck.member = it->get<std::uint64_t>();
  }
  return s;
}

}  // namespace

void validate(const CounterSnapshot& s) {
  if (s.timestamp < 0)
    throw InvariantViolation("ts_ns", "timestamp is negative");
  if (s.branch_misses > s.branch_instructions)
    throw InvariantViolation("br_miss", "exceeds br_insn");
  if (s.cache_misses > s.cache_references)
    throw InvariantViolation("llc_miss", "exceeds llc_ref");
  if (s.l1d_read_misses > s.l1d_read_accesses)
    throw InvariantViolation("l1d_miss", "exceeds l1d_acc");
}

double& metric_at(NormalizedMetrics& m, int i) {
  switch (i) {
    case 0: return m.branch_instructions;
    case 1: return m.branch_misses;
    case 2: return m.cache_references;
    case 3: return m.cache_misses;
    case 4: return m.l1d_read_accesses;
    case 5: return m.l1d_read_misses;
    case 6: return m.mem_disambiguation_resets;
  }
  throw std::out_of_range("metric index");
}

double metric_at(const NormalizedMetrics& m, int i) {
  return metric_at(const_cast<NormalizedMetrics&>(m), i);
}

std::string_view metric_name(int i) { return kMetricNames.at(i); }

NormalizedMetrics normalize(const CounterSnapshot& s) {
  if (s.itlb_accesses == 0) throw ZeroDenominator();
  const double d = static_cast<double>(s.itlb_accesses);
  NormalizedMetrics m;
  m.branch_instructions = static_cast<double>(s.branch_instructions) / d;
  m.branch_misses = static_cast<double>(s.branch_misses) / d;
  m.cache_references = static_cast<double>(s.cache_references) / d;
  m.cache_misses = static_cast<double>(s.cache_misses) / d;
  m.l1d_read_accesses = static_cast<double>(s.l1d_read_accesses) / d;
  m.l1d_read_misses = static_cast<double>(s.l1d_read_misses) / d;
  m.mem_disambiguation_resets =
      static_cast<double>(s.mem_disambiguation_resets) / d;
  return m;
}

IntervalFolder::IntervalFolder(Nanos interval) : interval_(interval) {
  if (interval <= 0) throw InputError("interval must be positive");
}

Nanos IntervalFolder::window_start_for(Nanos t) const {
  Nanos q = t / interval_;
  if (t % interval_ != 0 && t < 0) --q;
  return q * interval_;
}

IntervalAverage IntervalFolder::close(const std::string& worker,
                                      OpenWindow& w) const {
  IntervalAverage avg;
  avg.worker_id = worker;
  avg.window_start = w.start;
  avg.sample_count = w.samples.size();
  // Summing in sorted order makes the mean independent of arrival order.
  std::vector<double> column(w.samples.size());
  for (int i = 0; i < kMetricCount; ++i) {
    for (std::size_t k = 0; k < w.samples.size(); ++k)
      column[k] = metric_at(w.samples[k], i);
    std::sort(column.begin(), column.end());
    double sum = 0;
    for (double v : column) sum += v;
    metric_at(avg.mean_metrics, i) = sum / static_cast<double>(column.size());
  }
  return avg;
}

std::vector<IntervalAverage> IntervalFolder::push(const CounterSnapshot& s) {
  std::vector<IntervalAverage> out;
  auto seen = last_seen_.find(s.worker_id);
  if (seen != last_seen_.end() && s.timestamp < seen->second) {
    throw OutOfOrderTimestamp("worker '" + s.worker_id + "': timestamp " +
                              std::to_string(s.timestamp) + " precedes " +
                              std::to_string(seen->second));
  }
  last_seen_[s.worker_id] = s.timestamp;

  const Nanos start = window_start_for(s.timestamp);
  auto open = open_.find(s.worker_id);
  if (open != open_.end() && open->second.start != start) {
    out.push_back(close(open->first, open->second));
    open_.erase(open);
    open = open_.end();
  }

  if (s.itlb_accesses == 0) {
    ++dropped_zero_itlb_;
    return out;
  }
  NormalizedMetrics m = normalize(s);
  if (open == open_.end()) {
    open = open_.emplace(s.worker_id, OpenWindow{start, s.timestamp, {}}).first;
  }
  open->second.last_ts = s.timestamp;
  open->second.samples.push_back(m);
  return out;
}

std::vector<IntervalAverage> IntervalFolder::close_until(Nanos t) {
  std::vector<IntervalAverage> out;
  for (auto it = open_.begin(); it != open_.end();) {
    if (it->second.start + interval_ <= t) {
      out.push_back(close(it->first, it->second));
      it = open_.erase(it);
    } else {
      ++it;
    }
  }
  return out;
}

std::vector<IntervalAverage> IntervalFolder::flush() {
  std::vector<IntervalAverage> out;
  for (auto& [worker, w] : open_) out.push_back(close(worker, w));
  open_.clear();
  return out;
}

std::vector<IntervalAverage> fold_interval(
    const std::vector<CounterSnapshot>& snapshots, Nanos interval,
    std::size_t* dropped) {
  IntervalFolder folder(interval);
  std::vector<IntervalAverage> out;
  for (const auto& s : snapshots) {
    auto closed = folder.push(s);
    out.insert(out.end(), closed.begin(), closed.end());
  }
  auto rest = folder.flush();
  out.insert(out.end(), rest.begin(), rest.end());
  if (dropped) *dropped = folder.dropped_zero_itlb();
  return out;
}

std::vector<CounterSnapshot> parse_trace(std::istream& in) {
  std::vector<CounterSnapshot> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    if (is_comment_line(line)) {
      if (!out.empty())
        throw ParseError(line_no, "comment line after first record");
      check_schema_line(line, "trace", line_no);
      continue;
    }
    CounterSnapshot s = parse_record(line, line_no);
    try {
      validate(s);
    } catch (const InvariantViolation& e) {
      throw InvariantViolation(e.field(), "line " + std::to_string(line_no) +
                                              ": " + e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<CounterSnapshot> ingest_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trace '" + path.string() + "'");
  return parse_trace(in);
}

std::string snapshot_to_json(const CounterSnapshot& s) {
  std::string out = "{\"worker_id\":" + nlohmann::json(s.worker_id).dump() +
                    ",\"ts_ns\":" + std::to_string(s.timestamp);
  for (const auto& ck : kCountKeys) {
    out += ",\"";
    out += ck.key;
    out += "\":";
    out += std::to_string(s.*ck.member);
  }
  out += '}';
  return out;
}

std::string emit_trace(const std::vector<CounterSnapshot>& snapshots) {
  std::string out = schema_line("trace") + "\n";
  for (const auto& s : snapshots) {
    out += snapshot_to_json(s);
    out += '\n';
  }
  return out;
}

}  // namespace specguard
