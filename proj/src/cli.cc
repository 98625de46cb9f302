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

#include "specguard/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "specguard/attack_profile.h"
#include "specguard/channel.h"
#include "specguard/error.h"
#include "specguard/fleet.h"
#include "specguard/generators.h"
#include "specguard/ks.h"
#include "specguard/rng.h"
#include "specguard/schema.h"
#include "specguard/threshold.h"
#include "specguard/trace.h"

namespace specguard {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Options shared by every command, plus the JSON config file whose keys fill
// in whatever was not given on the command line.
struct Common {
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::string config;
  json file = json::object();

  void load() {
    if (config.empty()) return;
    try {
      file = json::parse(read_file(config));
    } catch (const json::exception& e) {
      throw InputError("bad config file " + config + ": " + e.what());
    }
    if (!file.is_object()) throw InputError("config file must hold an object");
  }

  // Flag > config file > default.
  template <typename T>
  void merge(const CLI::Option* flag, const char* key, T& value) const {
    if (flag->count() > 0 || !file.contains(key)) return;
    try {
      value = file.at(key).get<T>();
    } catch (const json::exception& e) {
      throw InputError(std::string("config key ") + key + ": " + e.what());
    }
  }
};

void add_common(CLI::App* cmd, Common& c, std::vector<CLI::Option*>& opts) {
  opts.push_back(cmd->add_option("--seed", c.seed, "RNG seed")->capture_default_str());
  cmd->add_option("--out", c.out, "Output file (default: stdout)");
  cmd->add_option("--config", c.config, "JSON config file; flags override it")
      ->check(CLI::ExistingFile);
}

void emit(const Common& c, const std::string& content, std::ostream& out) {
  if (c.out.empty()) out << content;
  else write_file_atomic(c.out, content);
}

BranchHistogram template_or_default(const std::string& path) {
  return path.empty() ? default_attack_template() : load_histogram(path);
}

KsMode parse_ks_mode(const std::string& s) {
  if (s == "asymptotic") return KsMode::kAsymptotic;
  if (s == "exact") return KsMode::kExact;
  throw InputError("unknown KS mode: " + s);
}

ChannelParams channel_params(const std::string& calibration, const json& file) {
  ChannelParams p;
  if (calibration == "javascript") p = ChannelParams::javascript();
  else if (calibration == "native") p = ChannelParams::native();
  else if (calibration == "noise-free") p = ChannelParams::noise_free();
  else throw InputError("unknown calibration: " + calibration);
  if (file.contains("channel")) {
    const json& c = file["channel"];
    const std::map<std::string, double*> fields = {
        {"hit_cycles", &p.hit_cycles},
        {"miss_cycles", &p.miss_cycles},
        {"per_iteration_overhead", &p.per_iteration_overhead},
        {"timer_resolution_ns", &p.timer_resolution_ns},
        {"timer_jitter_rel", &p.timer_jitter_rel},
        {"network_noise_sd", &p.network_noise_sd},
        {"iteration_noise_sd", &p.iteration_noise_sd},
        {"cpu_ghz", &p.cpu_ghz}};
    for (const auto& [key, value] : c.items()) {
      if (key == "eviction_accesses") {
        p.eviction_accesses = value.get<std::uint64_t>();
        continue;
      }
      auto it = fields.find(key);
      if (it == fields.end()) throw InputError("unknown channel key: " + key);
      *it->second = value.get<double>();
    }
  }
  p.validate();
  return p;
}

// ---- detect ---------------------------------------------------------------

struct DetectArgs {
  Common common;
  std::string trace;
  std::string detector = "threshold";
  double threshold = 4096;
  double stl_threshold = kDefaultStlThreshold;
  std::string template_path;
  double alpha = kDefaultKsAlpha;
  std::size_t k = kDefaultTopBranches;
  std::vector<std::string> histograms;
  std::vector<CLI::Option*> opts;
};

std::string run_detect(DetectArgs& a) {
  std::ostringstream out;
  out << schema_line("verdicts") << "\n";
  if (a.detector == "threshold") {
    if (a.trace.empty()) throw InputError("detect --detector threshold needs --trace");
    ThresholdConfig cfg;
    cfg.branch_per_itlb_threshold = a.threshold;
    cfg.stl_reset_threshold = a.stl_threshold;
    cfg.validate();
    for (const auto& avg : fold_interval(ingest_trace(a.trace))) {
      const ThresholdVerdict v = classify_threshold(avg, cfg);
      ordered_json j;
      j["worker_id"] = avg.worker_id;
      j["window_start_ns"] = avg.window_start;
      j["samples"] = avg.sample_count;
      j["detector"] = "threshold";
      j["suspect"] = v.suspect;
      j["metric"] = v.triggering_metric;
      j["value"] = v.value;
      j["threshold"] = v.threshold;
      out << j.dump() << "\n";
    }
  } else if (a.detector == "ks") {
    if (a.histograms.empty())
      throw InputError("detect --detector ks needs at least one --histogram");
    if (!(a.alpha > 0 && a.alpha < 1)) throw InputError("alpha must be in (0, 1)");
    const BranchHistogram tmpl = template_or_default(a.template_path);
    for (const auto& path : a.histograms) {
      const KsVerdict v = classify_ks(load_histogram(path), tmpl, a.alpha, a.k);
      ordered_json j;
      j["histogram"] = path;
      j["detector"] = "ks";
      j["suspect"] = v.suspect;
      j["statistic"] = v.ks.statistic;
      j["p_value"] = v.ks.p_value;
      j["alpha"] = v.alpha;
      j["k"] = v.k_effective;
      out << j.dump() << "\n";
    }
  } else {
    throw InputError("unknown detector: " + a.detector);
  }
  return out.str();
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  Common common;
  std::string trace;
  std::vector<double> thresholds = {256,  512,  1024,  2048,  4096,
                                    8192, 16384, 32768, 65536};
  std::vector<CLI::Option*> opts;
};

std::string run_sweep(SweepArgs& a) {
  const auto averages = fold_interval(ingest_trace(a.trace));
  return emit_sweep_csv(sweep_thresholds(averages, a.thresholds));
}

// ---- channel --------------------------------------------------------------

struct ChannelArgs {
  Common common;
  bool table = false, grid = false, required = false, evasion = false;
  std::string calibration = "javascript";
  std::vector<double> amplifications;
  std::vector<std::uint64_t> requests;
  double target = 0.99;
  double threshold = 4096;
  std::size_t trials = 1000;
  std::string method = "binomial";
  std::vector<CLI::Option*> opts;
};

std::string run_channel(ChannelArgs& a) {
  const int modes = a.table + a.grid + a.required + a.evasion;
  if (modes > 1)
    throw InputError("choose one of --table, --grid, --required, --evasion");
  MonteCarloOptions mc;
  mc.trials = a.trials;
  if (a.method == "binomial") mc.method = VoteMethod::kBinomial;
  else if (a.method == "sampled") mc.method = VoteMethod::kSampled;
  else throw InputError("unknown method: " + a.method);
  if (a.trials == 0) throw InputError("trials must be >= 1");

  std::ostringstream out;
  if (a.grid) {
    const ChannelParams p = channel_params(a.calibration, a.common.file);
    if (a.amplifications.empty()) a.amplifications = {1, 10, 100, 1000, 10000};
    if (a.requests.empty()) a.requests = {1, 10, 100, 1000, 10000, 100000, 250000};
    const auto curve =
        success_rate_curve(a.amplifications, a.requests, p, a.common.seed, mc);
    out << schema_line("success_grid") << "\n"
        << "amplification,requests,success_rate\n";
    for (std::size_t i = 0; i < a.amplifications.size(); ++i)
      for (std::size_t j = 0; j < a.requests.size(); ++j)
        out << num(a.amplifications[i]) << ',' << a.requests[j] << ','
            << num(curve[i][j]) << '\n';
    return out.str();
  }
  if (a.required) {
    const ChannelParams p = channel_params(a.calibration, a.common.file);
    if (a.amplifications.empty()) a.amplifications = {1, 10, 100, 1000};
    RequiredRequestsOptions ro;
    ro.mc = mc;
    out << schema_line("required_requests") << "\n"
        << "amplification,required_requests,requests_times_amplification\n";
    for (double amp : a.amplifications) {
      const auto n = required_requests(amp, p, a.target, a.common.seed, ro);
      out << num(amp) << ',' << n << ',' << num(static_cast<double>(n) * amp)
          << '\n';
    }
    return out.str();
  }
  if (a.evasion) {
    const EvasionCost c =
        evasion_cost(a.threshold, AttackProfile::for_variant(SpectreVariant::kPht));
    ordered_json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "evasion_cost";
    j["target_metric"] = c.target_metric;
    j["padding"] = {{"pages_per_bit", c.pages_per_bit},
                    {"code_bytes", c.code_bytes},
                    {"metric", c.padded_metric},
                    {"requests_per_bit", c.padded_leakage.requests_per_bit},
                    {"runtime_s", c.padded_leakage.script_runtime_s},
                    {"leakage_bits_per_hour", c.padded_leakage.leakage_bits_per_hour}};
    j["amplification"] = {
        {"amplification", c.amplification},
        {"metric", c.amplification_metric},
        {"requests_per_bit", c.amplification_leakage.requests_per_bit},
        {"runtime_s", c.amplification_leakage.script_runtime_s},
        {"leakage_bits_per_hour", c.amplification_leakage.leakage_bits_per_hour}};
    return j.dump(2) + "\n";
  }
  // Leakage table: the measured per-row runtimes and request counts.
  out << schema_line("leakage_table") << "\n"
      << "amplification,required_requests,runtime_ms,leakage_bits_per_hour\n";
  for (const JsAttackRow& row : js_attack_table()) {
    const LeakEstimate e = leakage_rate(row.amplification, row.required_requests,
                                        row.runtime_ms / 1000.0);
    out << num(row.amplification) << ',' << row.required_requests << ','
        << num(row.runtime_ms) << ',' << num(e.leakage_bits_per_hour) << '\n';
  }
  return out.str();
}

// ---- fleet ----------------------------------------------------------------

struct FleetArgs {
  Common common;
  std::string series;
  std::string detector;
  double threshold = 4096;
  std::string template_path;
  double alpha = kDefaultKsAlpha;
  std::vector<CLI::Option*> opts;  // seed, threshold, detector, alpha
};

std::pair<std::string, std::string> run_fleet_cmd(FleetArgs& a) {
  FleetConfig cfg = fleet_config_from_json(a.common.file);
  if (a.opts[0]->count() > 0 || !a.common.file.contains("seed"))
    cfg.rng_seed = a.common.seed;
  if (a.opts[1]->count() > 0) cfg.detector.threshold.branch_per_itlb_threshold = a.threshold;
  if (a.opts[2]->count() > 0) {
    if (a.detector == "threshold") cfg.detector.kind = DetectorKind::kThreshold;
    else if (a.detector == "ks") cfg.detector.kind = DetectorKind::kKs;
    else throw InputError("unknown detector: " + a.detector);
  }
  if (a.opts[3]->count() > 0) cfg.detector.ks_alpha = a.alpha;
  if (!a.template_path.empty()) cfg.detector.ks_template = load_histogram(a.template_path);
  cfg.validate();
  const FleetReport report = run_fleet(cfg);
  return {fleet_report_json(report, cfg), fleet_series_csv(report)};
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
  Common common;
  std::string kind = "benign";
  std::size_t count = 1000;
  std::string variant = "pht";
  double amplification = 250000;
  double pages = 0;
  std::string histogram_out;
  std::vector<CLI::Option*> opts;
};

std::pair<std::string, std::string> run_gen(GenArgs& a) {
  if (a.count == 0) throw InputError("count must be >= 1");
  if (a.kind == "benign") {
    const BenignProfile profile = BenignProfile::calibrated();
    return {emit_trace(generate_benign(profile, a.count, a.common.seed)),
            emit_histogram_csv(benign_histogram(profile, a.common.seed))};
  }
  if (a.kind == "attack") {
    AttackTraceOptions opts;
    opts.executions = a.count;
    const AttackTrace t = generate_attack(parse_variant(a.variant), a.amplification,
                                          a.pages, a.common.seed, opts);
    return {emit_trace(t.snapshots), emit_histogram_csv(t.histogram)};
  }
  throw InputError("unknown kind: " + a.kind + " (benign or attack)");
}

// ---- ks -------------------------------------------------------------------

struct KsArgs {
  Common common;
  std::vector<std::string> files;
  std::string mode = "asymptotic";
  std::size_t k = kDefaultTopBranches;
  double alpha = kDefaultKsAlpha;
  std::vector<CLI::Option*> opts;
};

std::string run_ks(KsArgs& a) {
  if (a.files.size() != 2) throw InputError("ks needs exactly two histogram files");
  const BranchHistogram h1 = load_histogram(a.files[0]);
  const BranchHistogram h2 = load_histogram(a.files[1]);
  const auto s1 = top_branches(h1, a.k);
  const auto s2 = top_branches(h2, a.k);
  const KsResult r = ks_two_sample(s1, s2, parse_ks_mode(a.mode));
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "ks_result";
  j["mode"] = a.mode;
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  j["n"] = r.n;
  j["m"] = r.m;
  j["alpha"] = a.alpha;
  j["same_distribution"] = r.p_value >= a.alpha;
  return j.dump(2) + "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"specguard: Spectre detection, covert-channel and fleet toolkit",
               "specguard"};
  app.require_subcommand(1);

  DetectArgs detect;
  auto* d = app.add_subcommand("detect", "Classify a counter trace or histograms");
  add_common(d, detect.common, detect.opts);
  d->add_option("--trace", detect.trace, "Counter trace (JSONL)")->check(CLI::ExistingFile);
  detect.opts.push_back(d->add_option("--detector", detect.detector, "threshold or ks")
                            ->capture_default_str());
  detect.opts.push_back(d->add_option("--threshold", detect.threshold,
                                      "Branches per iTLB access")
                            ->capture_default_str());
  detect.opts.push_back(d->add_option("--stl-threshold", detect.stl_threshold,
                                      "history_reset per iTLB access")
                            ->capture_default_str());
  detect.opts.push_back(d->add_option("--alpha", detect.alpha, "KS significance")
                            ->capture_default_str());
  d->add_option("--template", detect.template_path, "Attack template histogram CSV")
      ->check(CLI::ExistingFile);
  d->add_option("--k", detect.k, "Top branches compared")->capture_default_str();
  d->add_option("--histogram", detect.histograms, "Histogram CSV (repeatable)")
      ->check(CLI::ExistingFile);

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "False-positive rate per threshold");
  add_common(s, sweep.common, sweep.opts);
  s->add_option("--trace", sweep.trace, "Benign counter trace (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep.opts.push_back(s->add_option("--thresholds", sweep.thresholds,
                                     "Ascending thresholds")
                           ->delimiter(','));

  ChannelArgs channel;
  auto* c = app.add_subcommand("channel", "Covert-channel model: leakage table, "
                                          "success grid, required requests, evasion");
  add_common(c, channel.common, channel.opts);
  c->add_flag("--table", channel.table, "Leakage table (default)");
  c->add_flag("--grid", channel.grid, "Success-rate grid");
  c->add_flag("--required", channel.required, "Requests for --target success");
  c->add_flag("--evasion", channel.evasion, "Cost of staying under --threshold");
  channel.opts.push_back(c->add_option("--calibration", channel.calibration,
                                       "javascript, native or noise-free")
                             ->capture_default_str());
  c->add_option("--amplification", channel.amplifications, "Amplifications")
      ->delimiter(',');
  c->add_option("--requests", channel.requests, "Request counts")->delimiter(',');
  channel.opts.push_back(c->add_option("--target", channel.target,
                                       "Target success rate")
                             ->capture_default_str());
  channel.opts.push_back(c->add_option("--threshold", channel.threshold,
                                       "Detection threshold for --evasion")
                             ->capture_default_str());
  channel.opts.push_back(c->add_option("--trials", channel.trials,
                                       "Monte-Carlo trials")
                             ->capture_default_str());
  channel.opts.push_back(c->add_option("--method", channel.method,
                                       "binomial or sampled")
                             ->capture_default_str());

  FleetArgs fleet;
  auto* f = app.add_subcommand("fleet", "Simulate a worker fleet");
  add_common(f, fleet.common, fleet.opts);
  f->add_option("--series", fleet.series, "Time-series CSV output");
  fleet.opts.push_back(f->add_option("--threshold", fleet.threshold,
                                     "Branches per iTLB access"));
  fleet.opts.push_back(f->add_option("--detector", fleet.detector, "threshold or ks"));
  fleet.opts.push_back(f->add_option("--alpha", fleet.alpha, "KS significance"));
  f->add_option("--template", fleet.template_path, "Attack template histogram CSV")
      ->check(CLI::ExistingFile);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic counter trace");
  add_common(g, gen.common, gen.opts);
  gen.opts.push_back(g->add_option("--kind", gen.kind, "benign or attack")
                         ->capture_default_str());
  gen.opts.push_back(g->add_option("-n,--count", gen.count, "Snapshots")
                         ->capture_default_str());
  gen.opts.push_back(g->add_option("--variant", gen.variant, "pht, btb, rsb or stl")
                         ->capture_default_str());
  gen.opts.push_back(g->add_option("--amplification", gen.amplification,
                                   "Attack amplification")
                         ->capture_default_str());
  gen.opts.push_back(g->add_option("--pages", gen.pages, "Padding pages per bit")
                         ->capture_default_str());
  g->add_option("--histogram-out", gen.histogram_out,
                "Also write the misprediction histogram CSV");

  KsArgs ks;
  auto* k = app.add_subcommand("ks", "Two-sample KS test of two histograms");
  add_common(k, ks.common, ks.opts);
  k->add_option("files", ks.files, "Two histogram CSV files")
      ->expected(2)
      ->required()
      ->check(CLI::ExistingFile);
  ks.opts.push_back(k->add_option("--mode", ks.mode, "asymptotic or exact")
                        ->capture_default_str());
  ks.opts.push_back(k->add_option("--k", ks.k, "Top branches compared")
                        ->capture_default_str());
  ks.opts.push_back(k->add_option("--alpha", ks.alpha, "Significance")
                        ->capture_default_str());

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitInputError;
  }

  try {
    if (d->parsed()) {
      auto& a = detect;
      a.common.load();
      a.common.merge(a.opts[0], "seed", a.common.seed);
      a.common.merge(a.opts[1], "detector", a.detector);
      a.common.merge(a.opts[2], "threshold", a.threshold);
      a.common.merge(a.opts[3], "stl_threshold", a.stl_threshold);
      a.common.merge(a.opts[4], "alpha", a.alpha);
      emit(a.common, run_detect(a), out);
    } else if (s->parsed()) {
      auto& a = sweep;
      a.common.load();
      a.common.merge(a.opts[1], "thresholds", a.thresholds);
      emit(a.common, run_sweep(a), out);
    } else if (c->parsed()) {
      auto& a = channel;
      a.common.load();
      a.common.merge(a.opts[0], "seed", a.common.seed);
      a.common.merge(a.opts[1], "calibration", a.calibration);
      a.common.merge(a.opts[2], "target", a.target);
      a.common.merge(a.opts[3], "threshold", a.threshold);
      a.common.merge(a.opts[4], "trials", a.trials);
      a.common.merge(a.opts[5], "method", a.method);
      emit(a.common, run_channel(a), out);
    } else if (f->parsed()) {
      auto& a = fleet;
      a.common.load();
      // The config file is the fleet's own schema; flags are applied on top.
      auto [report, series] = run_fleet_cmd(a);
      emit(a.common, report, out);
      if (!a.series.empty()) write_file_atomic(a.series, series);
    } else if (g->parsed()) {
      auto& a = gen;
      a.common.load();
      a.common.merge(a.opts[0], "seed", a.common.seed);
      a.common.merge(a.opts[1], "kind", a.kind);
      a.common.merge(a.opts[2], "count", a.count);
      a.common.merge(a.opts[3], "variant", a.variant);
      a.common.merge(a.opts[4], "amplification", a.amplification);
      a.common.merge(a.opts[5], "pages", a.pages);
      auto [trace, histogram] = run_gen(a);
      emit(a.common, trace, out);
      if (!a.histogram_out.empty()) write_file_atomic(a.histogram_out, histogram);
    } else if (k->parsed()) {
      auto& a = ks;
      a.common.load();
      a.common.merge(a.opts[1], "mode", a.mode);
      a.common.merge(a.opts[2], "k", a.k);
      a.common.merge(a.opts[3], "alpha", a.alpha);
      emit(a.common, run_ks(a), out);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitOk;
}

}  // namespace specguard
