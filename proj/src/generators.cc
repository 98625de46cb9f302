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

#include "specguard/generators.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "specguard/error.h"

namespace specguard {
namespace {

constexpr double kGadgetRunsPerExecution = 10000;

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double upper_quantile(double survival) {
  boost::math::normal_distribution<double> n01;
  return boost::math::quantile(boost::math::complement(n01, survival));
}

// Mean-one lognormal factor with log-sd `sd`.
double spread_factor(double sd, Rng& rng) {
  std::normal_distribution<double> gauss;
  return std::exp(sd * gauss(rng) - 0.5 * sd * sd);
}

double uniform(double lo, double hi, Rng& rng) {
  return lo + (hi - lo) * uniform01(rng);
}

std::uint64_t round_count(double v) {
  return v <= 0 ? 0 : static_cast<std::uint64_t>(std::llround(v));
}

std::string numbered(const char* prefix, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s-%06zu", prefix, i);
  return buf;
}

// Branch ids spaced 64 bytes apart with random low bits, starting at `base`.
class BranchIds {
 public:
  BranchIds(BranchId base, Rng& rng) : next_(base), rng_(rng) {}
  BranchId next() {
    const BranchId id = next_ + (rng_() % 16) * 2;
    next_ += 0x40;
    return id;
  }

 private:
  BranchId next_;
  Rng& rng_;
};

void add_noise_branches(BranchHistogram& h, BranchIds& ids, std::size_t count,
                        double p, Rng& rng) {
  std::geometric_distribution<std::uint64_t> geo(p);
  for (std::size_t i = 0; i < count; ++i) h.add(ids.next(), geo(rng) + 1);
}

void add_hot_loops(BranchHistogram& h, BranchIds& ids, double top,
                   double second_ratio, Rng& rng) {
  h.add(ids.next(), round_count(top));
  h.add(ids.next(), round_count(top * second_ratio));
  double x = top * 0.3 * uniform(0.9, 1.1, rng);
  const double r = uniform(0.45, 0.55, rng);
  while (x >= 2) {
    h.add(ids.next(), round_count(x));
    x *= r;
  }
}

}  // namespace

double BenignProfile::survival(double x) const {
  if (x >= truncation) return 0.0;
  const double lt = std::log(truncation);
  const double body_total = std_normal_cdf((lt - body_log_mean) / body_log_sd);
  double body = 1.0;
  if (x > 0) {
    const double z = (std::log(x) - body_log_mean) / body_log_sd;
    body = (body_total - std_normal_cdf(z)) / body_total;
  }
  double tail = 1.0;
  if (x > tail_low) tail = std::log(truncation / x) / std::log(truncation / tail_low);
  return (1 - tail_weight) * body + tail_weight * tail;
}

double BenignProfile::mean() const {
  const double mu = body_log_mean, s = body_log_sd;
  const double lt = std::log(truncation);
  const double mass = std_normal_cdf((lt - mu) / s);
  const double body = std::exp(mu + 0.5 * s * s) *
                      std_normal_cdf((lt - mu - s * s) / s) / mass;
  const double tail = (truncation - tail_low) / std::log(truncation / tail_low);
  return (1 - tail_weight) * body + tail_weight * tail;
}

double BenignProfile::stddev() const {
  const double mu = body_log_mean, s = body_log_sd;
  const double lt = std::log(truncation);
  const double mass = std_normal_cdf((lt - mu) / s);
  const double body2 = std::exp(2 * mu + 2 * s * s) *
                       std_normal_cdf((lt - mu - 2 * s * s) / s) / mass;
  const double tail2 = (truncation * truncation - tail_low * tail_low) /
                       (2 * std::log(truncation / tail_low));
  const double m = mean();
  const double second = (1 - tail_weight) * body2 + tail_weight * tail2;
  return std::sqrt(std::max(0.0, second - m * m));
}

std::string BenignProfile::describe() const {
  std::ostringstream out;
  out.precision(6);
  out << "mixture: (1-w) lognormal(mu=" << body_log_mean
      << ", sigma=" << body_log_sd << ") + w loguniform[" << tail_low << ", "
      << truncation << "), w=" << tail_weight << ", truncated at "
      << truncation;
  return out.str();
}

std::array<SurvivalTarget, 3> BenignProfile::default_targets() {
  return {{{1024, 0.2141}, {4096, 0.0061}, {8192, 0.0026}}};
}

BenignProfile BenignProfile::calibrated(
    const std::array<SurvivalTarget, 3>& t, double truncation) {
  const auto [t1, s1] = t[0];
  const auto [t2, s2] = t[1];
  const auto [t3, s3] = t[2];
  if (!(0 < t1 && t1 < t2 && t2 < t3 && t3 < truncation))
    throw CalibrationInfeasible("thresholds must ascend below the truncation");
  if (!(1 > s1 && s1 > s2 && s2 > s3 && s3 > 0))
    throw CalibrationInfeasible("survival targets must descend inside (0, 1)");

  BenignProfile p;
  p.tail_low = t2;
  p.truncation = truncation;
  // For a tail weight w the body must carry the remainder at t1 and t2.
  auto fit = [&](double w) {
    const double z1 = upper_quantile((s1 - w) / (1 - w));
    const double z2 = upper_quantile((s2 - w) / (1 - w));
    p.tail_weight = w;
    p.body_log_sd = (std::log(t2) - std::log(t1)) / (z2 - z1);
    p.body_log_mean = std::log(t1) - z1 * p.body_log_sd;
  };
  auto residual = [&](double w) {
    fit(w);
    return p.survival(t3) - s3;
  };

  double lo = 0, hi = s2 * (1 - 1e-9);
  double r_lo = residual(lo), r_hi = residual(hi);
  if (r_lo > 0 || r_hi < 0 || std::isnan(r_lo) || std::isnan(r_hi)) {
    throw CalibrationInfeasible(
        "no tail weight matches the third survival point");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) < 0) lo = mid;
    else hi = mid;
  }
  fit(0.5 * (lo + hi));
  return p;
}

double sample_benign_metric(const BenignProfile& profile, Rng& rng) {
  if (uniform01(rng) < profile.tail_weight) {
    const double span = std::log(profile.truncation / profile.tail_low);
    return profile.tail_low * std::exp(uniform01(rng) * span);
  }
  std::lognormal_distribution<double> body(profile.body_log_mean,
                                           profile.body_log_sd);
  for (;;) {
    const double x = body(rng);
    if (x < profile.truncation) return x;
  }
}

BenignScript sample_benign_script(const BenignProfile& profile, Rng& rng) {
  BenignScript s;
  s.branch_metric = sample_benign_metric(profile, rng);
  const double md_sd = profile.md_reset_log_sd;
  std::lognormal_distribution<double> md(
      std::log(profile.md_reset_mean) - 0.5 * md_sd * md_sd, md_sd);
  s.md_reset_metric = md(rng);
  s.branch_miss_rate = uniform(0.005, 0.04, rng);
  s.llc_ref_metric = std::lognormal_distribution<double>(std::log(40), 0.5)(rng);
  s.llc_miss_rate = uniform(0.05, 0.3, rng);
  s.l1d_metric = s.branch_metric * uniform(1.5, 3.0, rng);
  s.l1d_miss_rate = uniform(0.01, 0.08, rng);
  s.itlb_median = std::max(
      64.0, std::lognormal_distribution<double>(std::log(2000), 0.6)(rng));
  return s;
}

CounterSnapshot benign_execution(const BenignScript& script,
                                 const BenignProfile& profile,
                                 const std::string& worker, Nanos ts,
                                 Rng& rng) {
  CounterSnapshot c;
  c.worker_id = worker;
  c.timestamp = ts;
  const double itlb = std::max(1.0, std::round(script.itlb_median * spread_factor(0.3, rng)));
  const double jitter = profile.execution_spread;
  c.itlb_accesses = round_count(itlb);
  // The population is truncated, so an execution never reads at or above
  // the truncation point either.
  const auto cap = static_cast<std::uint64_t>(profile.truncation * itlb);
  do {
    c.branch_instructions =
        round_count(script.branch_metric * spread_factor(jitter, rng) * itlb);
  } while (c.branch_instructions >= cap);
  c.branch_misses = round_count(static_cast<double>(c.branch_instructions) *
                                script.branch_miss_rate);
  c.cache_references =
      round_count(script.llc_ref_metric * spread_factor(0.2, rng) * itlb);
  c.cache_misses = round_count(static_cast<double>(c.cache_references) *
                               script.llc_miss_rate);
  c.l1d_read_accesses =
      round_count(script.l1d_metric * spread_factor(jitter, rng) * itlb);
  c.l1d_read_misses = round_count(static_cast<double>(c.l1d_read_accesses) *
                                  script.l1d_miss_rate);
  c.mem_disambiguation_resets =
      round_count(script.md_reset_metric * spread_factor(jitter, rng) * itlb);
  return c;
}

std::vector<CounterSnapshot> generate_benign(const BenignProfile& profile,
                                             std::size_t n,
                                             std::uint64_t seed) {
  if (n == 0) throw InputError("n must be >= 1");
  std::vector<CounterSnapshot> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, {0xbe91, i}));
    const BenignScript script = sample_benign_script(profile, rng);
    out.push_back(benign_execution(script, profile, numbered("benign", i),
                                   static_cast<Nanos>(i) * 1000, rng));
  }
  return out;
}

CounterSnapshot attack_execution(const AttackProfile& profile,
                                 double amplification, double pages,
                                 const std::string& worker, Nanos ts,
                                 Rng& rng) {
  const double base_itlb = profile.base_itlb_per_bit;
  const double itlb = kGadgetRunsPerExecution * (base_itlb + pages);
  const double metric =
      profile.metric_at(amplification) * spread_factor(profile.relative_spread, rng);
  const double branches = kGadgetRunsPerExecution *
                          (metric * base_itlb + pages * profile.branches_per_page);
  CounterSnapshot c;
  c.worker_id = worker;
  c.timestamp = ts;
  c.itlb_accesses = round_count(itlb);
  c.branch_instructions = round_count(branches);
  // The gadget loop is well predicted apart from the mistrained check.
  c.branch_misses = round_count(branches * 2e-5);
  c.cache_references = round_count(itlb * 15 * spread_factor(0.1, rng));
  c.cache_misses = round_count(static_cast<double>(c.cache_references) * 0.5);
  // Eviction sweeps dominate L1D reads.
  c.l1d_read_accesses = round_count(branches * 1.2);
  c.l1d_read_misses = round_count(static_cast<double>(c.l1d_read_accesses) * 0.02);
  c.mem_disambiguation_resets = round_count(
      itlb * profile.md_reset_metric * spread_factor(profile.relative_spread, rng));
  return c;
}

AttackTrace generate_attack(SpectreVariant variant, double amplification,
                            double pages, std::uint64_t seed,
                            const AttackTraceOptions& opts) {
  if (!(amplification >= 1)) throw InputError("amplification must be >= 1");
  if (!(pages >= 0)) throw InputError("pages must be >= 0");
  const AttackProfile profile = AttackProfile::for_variant(variant);
  AttackTrace out;
  out.snapshots.reserve(opts.executions);
  Rng rng(derive_seed(seed, {0xa77ac, static_cast<std::uint64_t>(variant)}));
  for (std::size_t i = 0; i < opts.executions; ++i) {
    out.snapshots.push_back(attack_execution(profile, amplification, pages,
                                             opts.worker_id,
                                             static_cast<Nanos>(i) * opts.period,
                                             rng));
  }
  out.histogram = attack_histogram(derive_seed(seed, {0x4157}));
  return out;
}

BranchHistogram attack_histogram(std::uint64_t seed) {
  Rng rng(seed);
  BranchIds ids(0x401000, rng);
  BranchHistogram h;
  const double delay =
      std::max(1000.0, std::normal_distribution<double>(120000, 8000)(rng));
  add_hot_loops(h, ids, delay, uniform(0.45, 0.6, rng), rng);
  const auto floor_branches = static_cast<std::size_t>(40 + rng() % 21);
  add_noise_branches(h, ids, floor_branches, 0.25, rng);
  return h;
}

BranchHistogram benign_histogram(const BenignProfile& profile,
                                 std::uint64_t seed) {
  Rng rng(seed);
  BranchIds ids(0x400000 + (rng() % 0x1000) * 0x40, rng);
  BranchHistogram h;
  if (uniform01(rng) < profile.loop_heavy_fraction) {
    const double top =
        std::lognormal_distribution<double>(std::log(50000), 0.5)(rng);
    add_hot_loops(h, ids, top, uniform(0.3, 0.9, rng), rng);
    add_noise_branches(h, ids, static_cast<std::size_t>(20 + rng() % 60), 0.2,
                       rng);
    return h;
  }
  const auto branches = static_cast<std::size_t>(200 + rng() % 2801);
  const double median = std::exp(uniform(std::log(20), std::log(5000), rng));
  std::lognormal_distribution<double> counts(std::log(median),
                                             uniform(0.5, 1.2, rng));
  for (std::size_t i = 0; i < branches; ++i)
    h.add(ids.next(), std::max<std::uint64_t>(1, round_count(counts(rng))));
  return h;
}

BranchHistogram default_attack_template() {
  return attack_histogram(kTemplateSeed);
}

}  // namespace specguard
