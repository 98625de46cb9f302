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

#include "specguard/channel.h"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/distributions/binomial.hpp>

#include "specguard/error.h"
#include "specguard/rng.h"

namespace specguard {
namespace {

constexpr std::array<JsAttackRow, 6> kJsAttackTable = {{
    {1, 250000, 118, 0},
    {10, 25000, 123, 1},
    {100, 2500, 137, 10},
    {1000, 250, 231, 62},
    {10000, 25, 1813, 79},
    {250000, 1, 30000, 120},
}};

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Timings are truncated toward zero on the timer grid, so a measurement
// falls below `threshold` exactly when the raw time is below the next grid
// point at or above it.
double quantized_boundary(double threshold, const ChannelParams& p) {
  const double tick = p.timer_resolution_ns * p.cpu_ghz;
  if (tick <= 0) return threshold;
  return std::ceil(threshold / tick) * tick;
}

// Probability that one measurement votes for the true bit.
double vote_accuracy(int bit, double amplification, const ChannelParams& p,
                     double threshold) {
  const double boundary = quantized_boundary(threshold, p);
  const double mean = expected_cycles(bit, amplification, p);
  const double sd = timing_noise_sd(amplification, p);
  double below;
  if (sd <= 0) below = mean < boundary ? 1.0 : 0.0;
  else below = normal_cdf((boundary - mean) / sd);
  return bit == 1 ? below : 1.0 - below;
}

double measure(double mean, double sd, const ChannelParams& p, Rng& rng,
               std::normal_distribution<double>& gauss) {
  double cycles = mean + sd * gauss(rng);
  double ns = cycles / p.cpu_ghz;
  const double res = p.timer_resolution_ns;
  if (res > 0) {
    ns += p.timer_jitter_rel * res * gauss(rng);
    ns = std::trunc(ns / res) * res;
  }
  return std::max(ns, 0.0) * p.cpu_ghz;
}

bool majority_correct(std::uint64_t correct, std::uint64_t requests,
                      double coin) {
  if (2 * correct > requests) return true;
  if (2 * correct == requests) return coin < 0.5;
  return false;
}

double success_binomial(double amplification, std::uint64_t requests,
                        const ChannelParams& p, std::uint64_t seed,
                        std::size_t trials) {
  const double threshold = decision_threshold(amplification, p);
  const std::uint64_t half = requests / 2;
  const bool even = requests % 2 == 0;
  // Per bit: CDF of the correct-vote count at half and half - 1.
  std::array<double, 2> cdf_half{}, cdf_below{};
  for (int bit = 0; bit < 2; ++bit) {
    const double q = vote_accuracy(bit, amplification, p, threshold);
    boost::math::binomial_distribution<double> votes(
        static_cast<double>(requests), q);
    cdf_half[bit] = boost::math::cdf(votes, static_cast<double>(half));
    cdf_below[bit] =
        half == 0 ? 0.0 : boost::math::cdf(votes, static_cast<double>(half - 1));
  }
  std::size_t wins = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const int bit = static_cast<int>(t % 2);
    Rng rng(derive_seed(seed, {t}));
    const double u = uniform01(rng);
    const double coin = uniform01(rng);
    // count = F^-1(u) exceeds `half` iff u > F(half).
    bool ok = u >= cdf_half[bit];
    if (!ok && even && u >= cdf_below[bit]) ok = coin < 0.5;
    if (ok) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(trials);
}

double success_sampled(double amplification, std::uint64_t requests,
                       const ChannelParams& p, std::uint64_t seed,
                       std::size_t trials) {
  const double threshold = decision_threshold(amplification, p);
  const double sd = timing_noise_sd(amplification, p);
  std::size_t wins = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const int bit = static_cast<int>(t % 2);
    const double mean = expected_cycles(bit, amplification, p);
    Rng rng(derive_seed(seed, {t}));
    std::normal_distribution<double> gauss;
    std::uint64_t correct = 0;
    for (std::uint64_t r = 0; r < requests; ++r) {
      const bool says_one = measure(mean, sd, p, rng, gauss) < threshold;
      if (says_one == (bit == 1)) ++correct;
    }
    if (majority_correct(correct, requests, uniform01(rng))) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(trials);
}

}  // namespace

void ChannelParams::validate() const {
  if (!(hit_cycles > 0)) throw InputError("hit_cycles must be positive");
  if (!(miss_cycles > hit_cycles))
    throw InputError("miss_cycles must exceed hit_cycles");
  if (per_iteration_overhead < 0 || timer_resolution_ns < 0 ||
      timer_jitter_rel < 0 || network_noise_sd < 0 || iteration_noise_sd < 0)
    throw InputError("channel cost and noise terms must be non-negative");
  if (!(cpu_ghz > 0)) throw InputError("cpu_ghz must be positive");
}

ChannelParams ChannelParams::javascript() { return ChannelParams{}; }

ChannelParams ChannelParams::native() {
  ChannelParams p;
  p.miss_cycles = 45 + 34.34697;
  p.per_iteration_overhead = 52358.479545;
  p.iteration_noise_sd = 2945.041;
  return p;
}

ChannelParams ChannelParams::noise_free() {
  ChannelParams p;
  p.timer_resolution_ns = 0;
  p.timer_jitter_rel = 0;
  p.network_noise_sd = 0;
  p.iteration_noise_sd = 0;
  return p;
}

double per_iteration_cycles(int bit, const ChannelParams& p) {
  return p.per_iteration_overhead +
         (bit == 1 ? p.miss_cycles + p.hit_cycles : 2 * p.miss_cycles);
}

double expected_cycles(int bit, double amplification, const ChannelParams& p) {
  return amplification * per_iteration_cycles(bit, p) +
         static_cast<double>(p.eviction_accesses) * p.hit_cycles;
}

double timing_noise_sd(double amplification, const ChannelParams& p) {
  return std::sqrt(p.network_noise_sd * p.network_noise_sd +
                   amplification * p.iteration_noise_sd * p.iteration_noise_sd);
}

double bit_wall_time_s(double amplification, const ChannelParams& p) {
  const double mean =
      0.5 * (expected_cycles(0, amplification, p) +
             expected_cycles(1, amplification, p));
  return mean / (p.cpu_ghz * 1e9);
}

double simulate_bit(int bit, double amplification, const ChannelParams& p,
                    std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss;
  return measure(expected_cycles(bit, amplification, p),
                 timing_noise_sd(amplification, p), p, rng, gauss);
}

std::vector<double> simulate_bits(int bit, double amplification,
                                  const ChannelParams& p, std::size_t count,
                                  std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss;
  const double mean = expected_cycles(bit, amplification, p);
  const double sd = timing_noise_sd(amplification, p);
  std::vector<double> out(count);
  for (auto& v : out) v = measure(mean, sd, p, rng, gauss);
  return out;
}

double percentile(std::span<const double> samples, double q) {
  if (samples.empty()) throw InputError("percentile of empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double pos = q / 100.0 * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[hi] - s[lo]);
}

BoxTestResult box_test(std::span<const double> zeros,
                       std::span<const double> ones, double q_low,
                       double q_high) {
  if (zeros.empty() || ones.empty())
    throw InputError("box test needs samples of both classes");
  if (!(q_low >= 0 && q_low < q_high && q_high <= 100))
    throw InputError("box test needs 0 <= q_low < q_high <= 100");
  BoxTestResult r;
  r.zeros = {percentile(zeros, q_low), percentile(zeros, q_high)};
  r.ones = {percentile(ones, q_low), percentile(ones, q_high)};
  const bool zeros_point = r.zeros.low == r.zeros.high;
  const bool ones_point = r.ones.low == r.ones.high;
  if (zeros_point && ones_point && r.zeros.low == r.ones.low)
    throw DegenerateSamples("both classes collapse to the same value");

  const double zero_mid = 0.5 * (r.zeros.low + r.zeros.high);
  const double one_mid = 0.5 * (r.ones.low + r.ones.high);
  const Box& upper = zero_mid >= one_mid ? r.zeros : r.ones;
  const Box& lower = zero_mid >= one_mid ? r.ones : r.zeros;
  r.distinguishable = lower.high < upper.low;
  r.decision_threshold = 0.5 * (lower.high + upper.low);
  return r;
}

double decision_threshold(double amplification, const ChannelParams& p) {
  return 0.5 * (expected_cycles(0, amplification, p) +
                expected_cycles(1, amplification, p));
}

double estimate_success(double amplification, std::uint64_t requests,
                        const ChannelParams& p, std::uint64_t seed,
                        const MonteCarloOptions& opts) {
  if (!(amplification >= 1)) throw InputError("amplification must be >= 1");
  if (requests == 0) throw InputError("requests must be >= 1");
  if (opts.trials == 0) throw InputError("trials must be >= 1");
  p.validate();
  if (opts.method == VoteMethod::kSampled)
    return success_sampled(amplification, requests, p, seed, opts.trials);
  return success_binomial(amplification, requests, p, seed, opts.trials);
}

std::uint64_t required_requests(double amplification, const ChannelParams& p,
                                double target_success, std::uint64_t seed,
                                const RequiredRequestsOptions& opts) {
  if (!(target_success > 0 && target_success < 1))
    throw InputError("target_success must be in (0, 1)");
  auto reaches = [&](std::uint64_t n) {
    return estimate_success(amplification, n, p, seed, opts.mc) >=
           target_success;
  };
  if (reaches(1)) return 1;
  std::uint64_t lo = 1, hi = 2;
  while (!reaches(hi)) {
    lo = hi;
    if (hi >= opts.n_max) {
      throw RequestsUnreachable("success " + std::to_string(target_success) +
                                " not reached within " +
                                std::to_string(opts.n_max) + " requests");
    }
    hi = std::min(hi * 2, opts.n_max);
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (reaches(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

std::vector<std::vector<double>> success_rate_curve(
    std::span<const double> amplifications,
    std::span<const std::uint64_t> request_counts, const ChannelParams& p,
    std::uint64_t seed, const MonteCarloOptions& opts) {
  if (amplifications.empty() || request_counts.empty())
    throw InputError("success grid needs non-empty axes");
  std::vector<std::vector<double>> grid;
  grid.reserve(amplifications.size());
  for (double a : amplifications) {
    std::vector<double> row;
    row.reserve(request_counts.size());
    for (std::uint64_t n : request_counts)
      row.push_back(estimate_success(a, n, p, seed, opts));
    grid.push_back(std::move(row));
  }
  return grid;
}

std::span<const JsAttackRow> js_attack_table() { return kJsAttackTable; }

RuntimeModel RuntimeModel::affine(double c0_ms, double c1_ms_per_iteration) {
  RuntimeModel m;
  m.c0_ms_ = c0_ms;
  m.c1_ms_ = c1_ms_per_iteration;
  return m;
}

RuntimeModel RuntimeModel::fitted_to_table() {
  double sx = 0, sy = 0;
  for (const auto& row : kJsAttackTable) {
    sx += row.amplification;
    sy += row.runtime_ms;
  }
  const double n = static_cast<double>(kJsAttackTable.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& row : kJsAttackTable) {
    sxx += (row.amplification - mx) * (row.amplification - mx);
    sxy += (row.amplification - mx) * (row.runtime_ms - my);
  }
  const double slope = sxy / sxx;
  return affine(my - slope * mx, slope);
}

RuntimeModel RuntimeModel::tabulated() {
  RuntimeModel m;
  for (const auto& row : kJsAttackTable)
    m.points_.emplace_back(row.amplification, row.runtime_ms);
  return m;
}

double RuntimeModel::runtime_s(double amplification) const {
  if (points_.empty()) return (c0_ms_ + c1_ms_ * amplification) / 1000.0;
  std::size_t seg = 1;
  while (seg + 1 < points_.size() && points_[seg].first < amplification) ++seg;
  const auto [x0, y0] = points_[seg - 1];
  const auto [x1, y1] = points_[seg];
  const double ms = y0 + (amplification - x0) * (y1 - y0) / (x1 - x0);
  return ms / 1000.0;
}

double bsc_capacity(double s) {
  if (s <= 0 || s >= 1) return 1.0;
  const double h = -s * std::log2(s) - (1 - s) * std::log2(1 - s);
  return 1.0 - h;
}

LeakEstimate leakage_rate(double amplification, std::uint64_t requests_per_bit,
                          double script_runtime_s, double success_rate) {
  if (!(amplification > 0) || requests_per_bit == 0 || !(script_runtime_s > 0))
    throw InputError("leakage inputs must be positive");
  if (!(success_rate >= 0 && success_rate <= 1))
    throw InputError("success_rate must be in [0, 1]");
  LeakEstimate e;
  e.amplification = amplification;
  e.requests_per_bit = requests_per_bit;
  e.script_runtime_s = script_runtime_s;
  e.success_rate = success_rate;
  e.leakage_bits_per_hour =
      3600.0 / (static_cast<double>(requests_per_bit) * script_runtime_s) *
      bsc_capacity(success_rate);
  return e;
}

LeakEstimate leakage_rate(double amplification, std::uint64_t requests_per_bit,
                          const RuntimeModel& runtime, double success_rate) {
  return leakage_rate(amplification, requests_per_bit,
                      runtime.runtime_s(amplification), success_rate);
}

}  // namespace specguard
