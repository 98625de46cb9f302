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

#include "specguard/fleet.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "specguard/channel.h"
#include "specguard/error.h"
#include "specguard/schema.h"

namespace specguard {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string worker_name(const char* prefix, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s-%06zu", prefix, i);
  return buf;
}

WorkerRecord& find_worker(FleetState& state, const std::string& id) {
  auto it = state.workers.find(id);
  if (it == state.workers.end()) throw UnknownWorker(id);
  return it->second;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

double std_normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Runs the configured detector on a closed window and applies isolation.
void judge(FleetState& state, const IntervalAverage& avg,
           const FleetConfig& cfg, Nanos now, std::vector<Action>& out) {
  WorkerRecord& w = find_worker(state, avg.worker_id);
  w.history.push_back(avg);
  Action verdict;
  verdict.worker_id = w.worker_id;
  verdict.timestamp = now;
  if (cfg.detector.kind == DetectorKind::kThreshold) {
    const ThresholdVerdict v = classify_threshold(avg, cfg.detector.threshold);
    verdict.suspect = v.suspect;
    verdict.detail = v.triggering_metric;
    verdict.value = v.value;
  } else {
    const KsVerdict v = classify_ks(w.histogram, state.ks_template,
                                    cfg.detector.ks_alpha);
    verdict.suspect = v.suspect;
    verdict.detail = "ks_p_value";
    verdict.value = v.ks.p_value;
  }
  out.push_back(verdict);
  if (verdict.suspect && w.placement == Placement::kShared) {
    w.placement = Placement::kIsolated;
    w.process_id = state.next_process_id++;
    w.flagged_at = now;
    out.push_back({ActionKind::kIsolate, w.worker_id, now, true, verdict.detail,
                   verdict.value});
  }
}

// Counts a request against the worker's subsequent-request budget. Returns
// false (and records a redirect) once the budget is spent.
bool admit_request(WorkerRecord& w, Nanos t, const FleetConfig& cfg,
                   std::vector<Action>& out) {
  if (w.subsequent_requests >= cfg.detector.threshold.subrequest_limit) {
    out.push_back({ActionKind::kRedirect, w.worker_id, t, false,
                   "subsequent_requests",
                   static_cast<double>(w.subsequent_requests + 1)});
    return false;
  }
  ++w.subsequent_requests;
  return true;
}

}  // namespace

void CostModel::validate() const {
  auto fraction = [](double v, const char* name) {
    if (!(v >= 0 && v <= 1))
      throw InputError(std::string(name) + " must be in [0, 1]");
  };
  auto factor = [](double v, const char* name) {
    if (!(v >= 1)) throw InputError(std::string(name) + " must be >= 1");
  };
  fraction(detection_overhead_rel, "detection_overhead_rel");
  fraction(hungry_mem_overhead_low, "hungry_mem_overhead_low");
  fraction(hungry_mem_overhead_high, "hungry_mem_overhead_high");
  fraction(hungry_cpu_overhead, "hungry_cpu_overhead");
  fraction(sampling_production_overhead, "sampling_production_overhead");
  factor(isolated_cpu_multiplier, "isolated_cpu_multiplier");
  factor(isolated_mem_multiplier_low, "isolated_mem_multiplier_low");
  factor(isolated_mem_multiplier_high, "isolated_mem_multiplier_high");
  if (isolated_mem_multiplier_low > isolated_mem_multiplier_high)
    throw InputError("isolated memory multiplier range is reversed");
  if (!(baseline_rps > 0)) throw InputError("baseline_rps must be positive");
  if (!(worker_memory_bytes > 0))
    throw InputError("worker_memory_bytes must be positive");
  if (!(rps_slope >= 0) || !(mem_slope >= 0))
    throw InputError("slopes must be non-negative");
}

double CostModel::effective_rps_slope(std::size_t n_workers) const {
  if (rps_slope > 0 || n_workers == 0) return rps_slope;
  return baseline_rps * (1 - detection_overhead_rel) *
         (1 - 1 / isolated_cpu_multiplier) / static_cast<double>(n_workers);
}

double CostModel::effective_mem_slope() const {
  if (mem_slope > 0) return mem_slope;
  const double mid = 0.5 * (isolated_mem_multiplier_low + isolated_mem_multiplier_high);
  return worker_memory_bytes * (mid - 1);
}

double CostModel::throughput(std::size_t n_workers, std::size_t isolated) const {
  return baseline_rps * (1 - detection_overhead_rel) -
         effective_rps_slope(n_workers) * static_cast<double>(isolated);
}

double CostModel::memory(std::size_t n_workers, std::size_t isolated) const {
  return worker_memory_bytes * static_cast<double>(n_workers) +
         effective_mem_slope() * static_cast<double>(isolated);
}

void FleetLimits::validate() const {
  if (!(cpu_ms > 0) || !(memory_mb > 0) || !(compile_ms > 0) ||
      subrequests_per_request == 0)
    throw InputError("limits must be positive");
}

void FleetConfig::validate() const {
  detector.threshold.validate();
  limits.validate();
  cost_model.validate();
  if (!(detector.ks_alpha > 0 && detector.ks_alpha < 1))
    throw InputError("ks alpha must be in (0, 1)");
  if (!(attack_amplification >= 1))
    throw InputError("attack amplification must be >= 1");
  if (!(attack_pages >= 0)) throw InputError("attack pages must be >= 0");
  if (!(duration_s > 0)) throw InputError("duration must be positive");
  if (!(attack_start_s >= 0)) throw InputError("attack start must be >= 0");
  if (executions_per_second == 0)
    throw InputError("executions_per_second must be >= 1");
  if (detection_interval <= 0)
    throw InputError("detection interval must be positive");
}

FleetConfig fleet_config_from_json(const json& j, FleetConfig base) {
  if (!j.is_object()) throw InputError("fleet config must be a JSON object");
  static const std::set<std::string> known = {
      "schema", "n_benign", "n_attack", "attack_variant",
      "attack_amplification", "attack_pages", "detector", "threshold",
      "stl_threshold", "subrequest_limit", "alpha", "duration_s",
      "attack_start_s", "executions_per_second", "detection_interval_ms",
      "seed", "limits", "cost_model"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw InputError("unknown config key: " + key);
  try {
    if (j.contains("schema") && j["schema"].get<int>() != kSchemaVersion)
      throw InputError("unsupported config schema version");
    FleetConfig& c = base;
    if (j.contains("n_benign")) c.n_benign = j["n_benign"].get<std::size_t>();
    if (j.contains("n_attack")) c.n_attack = j["n_attack"].get<std::size_t>();
    if (j.contains("attack_variant"))
      c.attack_variant = parse_variant(j["attack_variant"].get<std::string>());
    if (j.contains("attack_amplification"))
      c.attack_amplification = j["attack_amplification"].get<double>();
    if (j.contains("attack_pages")) c.attack_pages = j["attack_pages"].get<double>();
    if (j.contains("detector")) {
      const auto d = j["detector"].get<std::string>();
      if (d == "threshold") c.detector.kind = DetectorKind::kThreshold;
      else if (d == "ks") c.detector.kind = DetectorKind::kKs;
      else throw InputError("unknown detector: " + d);
    }
    if (j.contains("threshold"))
      c.detector.threshold.branch_per_itlb_threshold = j["threshold"].get<double>();
    if (j.contains("stl_threshold"))
      c.detector.threshold.stl_reset_threshold = j["stl_threshold"].get<double>();
    if (j.contains("subrequest_limit"))
      c.detector.threshold.subrequest_limit = j["subrequest_limit"].get<std::uint64_t>();
    if (j.contains("alpha")) c.detector.ks_alpha = j["alpha"].get<double>();
    if (j.contains("duration_s")) c.duration_s = j["duration_s"].get<double>();
    if (j.contains("attack_start_s")) c.attack_start_s = j["attack_start_s"].get<double>();
    if (j.contains("executions_per_second"))
      c.executions_per_second = j["executions_per_second"].get<std::size_t>();
    if (j.contains("detection_interval_ms"))
      c.detection_interval = static_cast<Nanos>(
          std::llround(j["detection_interval_ms"].get<double>() * 1e6));
    if (j.contains("seed")) c.rng_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("limits")) {
      const auto& l = j["limits"];
      for (const auto& [key, _] : l.items()) {
        if (key == "cpu_ms") c.limits.cpu_ms = l[key].get<double>();
        else if (key == "memory_mb") c.limits.memory_mb = l[key].get<double>();
        else if (key == "compile_ms") c.limits.compile_ms = l[key].get<double>();
        else if (key == "subrequests_per_request")
          c.limits.subrequests_per_request = l[key].get<std::uint64_t>();
        else throw InputError("unknown limits key: " + key);
      }
    }
    if (j.contains("cost_model")) {
      const auto& m = j["cost_model"];
      CostModel& cm = c.cost_model;
      const std::map<std::string, double*> fields = {
          {"detection_overhead_rel", &cm.detection_overhead_rel},
          {"isolated_cpu_multiplier", &cm.isolated_cpu_multiplier},
          {"isolated_mem_multiplier_low", &cm.isolated_mem_multiplier_low},
          {"isolated_mem_multiplier_high", &cm.isolated_mem_multiplier_high},
          {"hungry_mem_overhead_low", &cm.hungry_mem_overhead_low},
          {"hungry_mem_overhead_high", &cm.hungry_mem_overhead_high},
          {"hungry_cpu_overhead", &cm.hungry_cpu_overhead},
          {"sampling_production_overhead", &cm.sampling_production_overhead},
          {"baseline_rps", &cm.baseline_rps},
          {"worker_memory_bytes", &cm.worker_memory_bytes},
          {"rps_slope", &cm.rps_slope},
          {"mem_slope", &cm.mem_slope}};
      for (const auto& [key, _] : m.items()) {
        auto it = fields.find(key);
        if (it == fields.end()) throw InputError("unknown cost_model key: " + key);
        *it->second = m[key].get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad fleet config: ") + e.what());
  }
  base.validate();
  return base;
}

ordered_json fleet_config_to_json(const FleetConfig& c) {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["n_benign"] = c.n_benign;
  j["n_attack"] = c.n_attack;
  j["attack_variant"] = std::string(variant_name(c.attack_variant));
  j["attack_amplification"] = c.attack_amplification;
  j["attack_pages"] = c.attack_pages;
  j["detector"] = c.detector.kind == DetectorKind::kThreshold ? "threshold" : "ks";
  j["threshold"] = c.detector.threshold.branch_per_itlb_threshold;
  j["stl_threshold"] = c.detector.threshold.stl_reset_threshold;
  j["subrequest_limit"] = c.detector.threshold.subrequest_limit;
  j["alpha"] = c.detector.ks_alpha;
  j["duration_s"] = c.duration_s;
  j["attack_start_s"] = c.attack_start_s;
  j["executions_per_second"] = c.executions_per_second;
  j["detection_interval_ms"] = static_cast<double>(c.detection_interval) / 1e6;
  j["seed"] = c.rng_seed;
  j["limits"] = {{"cpu_ms", c.limits.cpu_ms},
                 {"memory_mb", c.limits.memory_mb},
                 {"compile_ms", c.limits.compile_ms},
                 {"subrequests_per_request", c.limits.subrequests_per_request}};
  const CostModel& m = c.cost_model;
  j["cost_model"] = {
      {"detection_overhead_rel", m.detection_overhead_rel},
      {"isolated_cpu_multiplier", m.isolated_cpu_multiplier},
      {"isolated_mem_multiplier_low", m.isolated_mem_multiplier_low},
      {"isolated_mem_multiplier_high", m.isolated_mem_multiplier_high},
      {"hungry_mem_overhead_low", m.hungry_mem_overhead_low},
      {"hungry_mem_overhead_high", m.hungry_mem_overhead_high},
      {"hungry_cpu_overhead", m.hungry_cpu_overhead},
      {"sampling_production_overhead", m.sampling_production_overhead},
      {"baseline_rps", m.baseline_rps},
      {"worker_memory_bytes", m.worker_memory_bytes},
      {"rps_slope", m.rps_slope},
      {"mem_slope", m.mem_slope}};
  return j;
}

std::string action_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::kVerdict: return "verdict";
    case ActionKind::kIsolate: return "isolate";
    case ActionKind::kRedirect: return "redirect";
    case ActionKind::kLimitExceeded: return "limit_exceeded";
  }
  return "unknown";
}

FleetState make_fleet_state(const FleetConfig& cfg) {
  FleetState state{{}, IntervalFolder(cfg.detection_interval), 1, 0, {}};
  state.ks_template = cfg.detector.ks_template.empty()
                          ? default_attack_template()
                          : cfg.detector.ks_template;
  for (std::size_t i = 0; i < cfg.n_benign; ++i) {
    WorkerRecord w;
    w.worker_id = worker_name("benign", i);
    w.histogram = benign_histogram(cfg.benign, derive_seed(cfg.rng_seed, {0x4b, i}));
    state.workers.emplace(w.worker_id, std::move(w));
  }
  for (std::size_t i = 0; i < cfg.n_attack; ++i) {
    WorkerRecord w;
    w.worker_id = worker_name("attack", i);
    w.kind = cfg.attack_pages > 0 ? WorkerKind::kEvasive : WorkerKind::kAttack;
    // Until the attack starts the worker runs ordinary code.
    w.histogram = benign_histogram(cfg.benign, derive_seed(cfg.rng_seed, {0xa4b, i}));
    state.workers.emplace(w.worker_id, std::move(w));
  }
  return state;
}

std::vector<Action> step_fleet(FleetState& state, const FleetEvent& event,
                               const FleetConfig& cfg) {
  std::vector<Action> out;
  if (const auto* tick = std::get_if<IntervalTick>(&event)) {
    state.now = std::max(state.now, tick->timestamp);
    for (const auto& avg : state.folder.close_until(tick->timestamp))
      judge(state, avg, cfg, tick->timestamp, out);
    return out;
  }
  if (const auto* sub = std::get_if<Subrequest>(&event)) {
    WorkerRecord& w = find_worker(state, sub->worker_id);
    state.now = std::max(state.now, sub->timestamp);
    if (admit_request(w, sub->timestamp, cfg, out)) {
      ++w.executions_served;
      if (w.placement == Placement::kIsolated) ++w.served_after_isolation;
    }
    return out;
  }

  const auto& ex = std::get<ScriptExecution>(event);
  const Nanos t = ex.snapshot.timestamp;
  WorkerRecord& w = find_worker(state, ex.snapshot.worker_id);
  state.now = std::max(state.now, t);
  if (!admit_request(w, t, cfg, out)) return out;

  CounterSnapshot reading = ex.snapshot;
  if (ex.cpu_ms > cfg.limits.cpu_ms) {
    out.push_back({ActionKind::kLimitExceeded, w.worker_id, t, false, "cpu_ms",
                   ex.cpu_ms});
  }
  if (ex.subrequests > cfg.limits.subrequests_per_request) {
    out.push_back({ActionKind::kLimitExceeded, w.worker_id, t, false,
                   "subrequests", static_cast<double>(ex.subrequests)});
  }
  if (ex.attack_code && !w.attack_started_at) {
    w.attack_started_at = t;
    w.histogram = attack_histogram(derive_seed(cfg.rng_seed, {0xa7, fnv1a(w.worker_id)}));
  }
  ++w.executions_served;
  if (w.placement == Placement::kIsolated) ++w.served_after_isolation;
  for (const auto& avg : state.folder.push(reading))
    judge(state, avg, cfg, t, out);
  return out;
}

double predicted_fp_rate(const FleetConfig& cfg) {
  // Per-execution spread averages out within a window, so a benign worker is
  // flagged when its script level crosses either rule.
  const ThresholdConfig& th = cfg.detector.threshold;
  const double branch = cfg.benign.survival(th.branch_per_itlb_threshold);
  double stl = 1.0;
  if (th.stl_reset_threshold > 0) {
    const double sd = cfg.benign.md_reset_log_sd;
    const double mu = std::log(cfg.benign.md_reset_mean) - 0.5 * sd * sd;
    stl = std_normal_sf((std::log(th.stl_reset_threshold) - mu) / sd);
  }
  return branch + (1 - branch) * stl;
}

FleetReport run_fleet(const FleetConfig& cfg) {
  cfg.validate();
  FleetState state = make_fleet_state(cfg);
  FleetReport report;
  report.seed = cfg.rng_seed;
  report.n_workers = state.workers.size();
  report.benign_family = cfg.benign.describe();

  const AttackProfile attack = AttackProfile::for_variant(cfg.attack_variant);
  const double attack_cpu_ms =
      RuntimeModel::tabulated().runtime_s(cfg.attack_amplification) * 1000;
  const Nanos attack_start =
      static_cast<Nanos>(std::llround(cfg.attack_start_s * 1e9));
  const Nanos end = static_cast<Nanos>(std::llround(cfg.duration_s * 1e9));
  const Nanos period =
      kNanosPerSecond / static_cast<Nanos>(cfg.executions_per_second);

  // Per-worker script and stream, in id order.
  struct Driver {
    WorkerRecord* record;
    BenignScript script;
    Rng rng;
  };
  std::vector<Driver> drivers;
  std::size_t idx = 0;
  for (auto& [id, w] : state.workers) {
    Rng rng(derive_seed(cfg.rng_seed, {0xd71e, idx++}));
    BenignScript script = sample_benign_script(cfg.benign, rng);
    drivers.push_back({&w, script, rng});
  }

  std::size_t isolated = 0;
  auto record_series = [&](Nanos t) {
    report.series.push_back({static_cast<double>(t) / 1e9,
                             cfg.cost_model.throughput(report.n_workers, isolated),
                             cfg.cost_model.memory(report.n_workers, isolated),
                             isolated});
  };
  auto apply = [&](const std::vector<Action>& actions) {
    for (const auto& a : actions) {
      switch (a.kind) {
        case ActionKind::kIsolate: ++isolated; [[fallthrough]];
        case ActionKind::kVerdict: report.timeline.push_back(a); break;
        case ActionKind::kRedirect: ++report.redirects; break;
        case ActionKind::kLimitExceeded: ++report.limit_exceeded; break;
      }
    }
  };
  auto check_co_residency = [&] {
    std::map<std::uint64_t, std::size_t> occupancy;
    for (const auto& [id, w] : state.workers) ++occupancy[w.process_id];
    for (const auto& [id, w] : state.workers)
      if (w.flagged_at && (w.process_id == 0 || occupancy[w.process_id] > 1))
        ++report.co_residency_violations;
  };

  std::lognormal_distribution<double> benign_cpu(std::log(3.0), 0.8);
  record_series(0);
  for (Nanos second = 0; second < end; second += cfg.detection_interval) {
    if (second > 0) {
      apply(step_fleet(state, IntervalTick{second}, cfg));
      check_co_residency();
      record_series(second);
    }
    const Nanos window_end = std::min(end, second + cfg.detection_interval);
    for (auto& d : drivers) {
      WorkerRecord& w = *d.record;
      for (Nanos t = second; t < window_end; t += period) {
        const Nanos ts = t + static_cast<Nanos>(uniform01(d.rng) * static_cast<double>(period));
        ScriptExecution ex;
        const bool attacking = w.kind != WorkerKind::kBenign && ts >= attack_start;
        if (attacking) {
          ex.snapshot = attack_execution(attack, cfg.attack_amplification,
                                         cfg.attack_pages, w.worker_id, ts, d.rng);
          ex.cpu_ms = attack_cpu_ms;
          ex.attack_code = true;
        } else {
          ex.snapshot = benign_execution(d.script, cfg.benign, w.worker_id, ts, d.rng);
          ex.cpu_ms = benign_cpu(d.rng);
        }
        ex.subrequests = std::poisson_distribution<std::uint64_t>(2.0)(d.rng);
        apply(step_fleet(state, ex, cfg));
        // Requests are cut off at the limits.
        report.max_served_cpu_ms = std::max(
            report.max_served_cpu_ms, std::min(ex.cpu_ms, cfg.limits.cpu_ms));
        report.max_served_subrequests =
            std::max(report.max_served_subrequests,
                     std::min(ex.subrequests, cfg.limits.subrequests_per_request));
      }
    }
  }
  apply(step_fleet(state, IntervalTick{end}, cfg));
  check_co_residency();
  record_series(end);

  std::size_t n_benign = 0;
  for (const auto& [id, w] : state.workers) {
    if (w.placement == Placement::kIsolated) {
      // An isolated worker must keep serving while the run has time left.
      if (*w.flagged_at < end && w.served_after_isolation == 0)
        report.starved_workers.push_back(id);
    }
    if (w.kind == WorkerKind::kBenign) {
      ++n_benign;
      if (w.flagged_at) ++report.benign_flagged;
      continue;
    }
    std::optional<double> latency;
    if (w.flagged_at) {
      const Nanos first_window = w.attack_started_at
                                     ? state.folder.window_start_for(*w.attack_started_at)
                                     : attack_start;
      const double intervals =
          std::ceil(static_cast<double>(*w.flagged_at - first_window) /
                    static_cast<double>(cfg.detection_interval));
      latency = std::max(0.0, intervals);
    }
    report.detection_latency_intervals.push_back(latency);
  }
  if (n_benign > 0) {
    report.fp_rate = static_cast<double>(report.benign_flagged) / n_benign;
  }
  if (cfg.detector.kind == DetectorKind::kThreshold) {
    const double p = predicted_fp_rate(cfg);
    report.predicted_fp_rate = p;
    if (n_benign > 0) report.fp_standard_error = std::sqrt(p * (1 - p) / n_benign);
  }
  report.isolated_final = isolated;
  report.degraded = report.n_workers > 0 && isolated == report.n_workers;
  report.label = report.degraded ? kDegradedLabel : "dynamic process isolation";
  report.total_overhead_rel =
      1 - cfg.cost_model.throughput(report.n_workers, isolated) /
              cfg.cost_model.baseline_rps;
  return report;
}

std::string fleet_report_json(const FleetReport& r, const FleetConfig& cfg) {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "fleet_report";
  j["config"] = fleet_config_to_json(cfg);
  j["label"] = r.label;
  j["degraded"] = r.degraded;
  j["n_workers"] = r.n_workers;
  j["isolated_final"] = r.isolated_final;
  j["benign_flagged"] = r.benign_flagged;
  j["fp_rate"] = r.fp_rate;
  j["predicted_fp_rate"] =
      r.predicted_fp_rate ? ordered_json(*r.predicted_fp_rate) : ordered_json();
  j["fp_standard_error"] = r.fp_standard_error;
  ordered_json lat = ordered_json::array();
  for (const auto& l : r.detection_latency_intervals)
    lat.push_back(l ? ordered_json(*l) : ordered_json());
  j["detection_latency_intervals"] = lat;
  j["co_residency_violations"] = r.co_residency_violations;
  j["starved_workers"] = r.starved_workers;
  j["redirects"] = r.redirects;
  j["limit_exceeded"] = r.limit_exceeded;
  j["max_served_cpu_ms"] = r.max_served_cpu_ms;
  j["max_served_subrequests"] = r.max_served_subrequests;
  j["total_overhead_rel"] = r.total_overhead_rel;
  j["benign_family"] = r.benign_family;
  ordered_json timeline = ordered_json::array();
  for (const auto& a : r.timeline) {
    ordered_json e;
    e["t_ns"] = a.timestamp;
    e["worker_id"] = a.worker_id;
    e["action"] = action_name(a.kind);
    e["suspect"] = a.suspect;
    e["metric"] = a.detail;
    e["value"] = a.value;
    timeline.push_back(std::move(e));
  }
  j["timeline"] = std::move(timeline);
  return j.dump(2) + "\n";
}

std::string fleet_series_csv(const FleetReport& r) {
  std::ostringstream out;
  out.precision(12);
  out << schema_line("fleet_series") << "\n"
      << "t_sec,throughput_rps,memory_bytes,isolated_count\n";
  for (const auto& p : r.series)
    out << p.t_sec << ',' << p.throughput_rps << ',' << p.memory_bytes << ','
        << p.isolated_count << '\n';
  return out.str();
}

}  // namespace specguard
