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

#ifndef SPECGUARD_CHANNEL_H_
#define SPECGUARD_CHANNEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace specguard {

// Timing model of the amplified remote-timer covert channel.
//
// One leaked bit runs `amplification` iterations of the gadget
//   if (secret_bit) read A; else read B;   // transient
//   read A;                                // architectural
// after evicting A and B. A '1' costs one miss and one hit per iteration,
// a '0' costs two misses, so the 0/1 gap grows linearly with amplification.
// The response time seen by the remote timer carries Gaussian noise with
// variance network_noise_sd^2 + amplification * iteration_noise_sd^2, plus
// timer jitter, and is truncated to the timer resolution.
struct ChannelParams {
  double hit_cycles = 45;
  double miss_cycles = 132.117228;
  double per_iteration_overhead = 251779.324158;  // eviction pass + loop body
  std::uint64_t eviction_accesses = 32768;    // 2 MiB / 64 B lines
  double timer_resolution_ns = 0.47;
  double timer_jitter_rel = 0.0167;  // of one timer tick
  double network_noise_sd = 0;       // cycles, per request
  double iteration_noise_sd = 7469.766;  // cycles per sqrt(iteration)
  double cpu_ghz = 2.1;

  // Throws InputError when miss <= hit, hit <= 0, or any noise term < 0.
  void validate() const;

  // The JavaScript attack: 21779307-cycle gap at 250000 iterations and a
  // 30 s script at that amplification. Noise is set so that ~250000 requests
  // are needed without amplification.
  static ChannelParams javascript();
  // Native attack: 3434697-cycle gap and 2.5 s per bit at 100000 iterations.
  static ChannelParams native();
  // No noise, no quantization.
  static ChannelParams noise_free();
};

double per_iteration_cycles(int bit, const ChannelParams& p);
double expected_cycles(int bit, double amplification, const ChannelParams& p);
// Total timing noise in cycles before quantization.
double timing_noise_sd(double amplification, const ChannelParams& p);
// Seconds of CPU time to run the gadget once for one request.
double bit_wall_time_s(double amplification, const ChannelParams& p);

// One remote timing measurement of a leaked bit, in cycles. Deterministic
// given the seed.
double simulate_bit(int bit, double amplification, const ChannelParams& p,
                    std::uint64_t seed);

// Draws `count` measurements from a single seeded stream.
std::vector<double> simulate_bits(int bit, double amplification,
                                  const ChannelParams& p, std::size_t count,
                                  std::uint64_t seed);

struct Box {
  double low = 0;
  double high = 0;
};

struct BoxTestResult {
  bool distinguishable = false;
  double decision_threshold = 0;
  Box zeros;
  Box ones;
};

inline constexpr double kDefaultBoxLow = 10;
inline constexpr double kDefaultBoxHigh = 90;

// Linear-interpolated percentile, q in [0, 100].
double percentile(std::span<const double> samples, double q);

// Box test: the [q_low, q_high] percentile boxes of both classes are
// distinguishable when disjoint; the decision threshold is the midpoint of
// the facing edges. Throws DegenerateSamples when both classes are the same
// single repeated value.
BoxTestResult box_test(std::span<const double> zeros,
                       std::span<const double> ones,
                       double q_low = kDefaultBoxLow,
                       double q_high = kDefaultBoxHigh);

enum class VoteMethod {
  // Per-request votes are Bernoulli with the closed-form probability of
  // landing on the correct side of the threshold; each trial inverts the
  // binomial CDF of the vote count with its own uniform draw.
  kBinomial,
  // Each request is drawn through the sampling channel, like simulate_bit.
  kSampled,
};

struct MonteCarloOptions {
  std::size_t trials = 1000;
  VoteMethod method = VoteMethod::kBinomial;
};

// Threshold used to classify a single measurement: midpoint between the
// expected '0' and '1' timings, where the box test converges for symmetric
// noise.
double decision_threshold(double amplification, const ChannelParams& p);

// Fraction of trials in which a majority vote over `requests` measurements
// recovers the bit. Trials alternate the secret bit and use per-trial seeds
// derived from `seed`, so the estimate does not depend on evaluation order.
double estimate_success(double amplification, std::uint64_t requests,
                        const ChannelParams& p, std::uint64_t seed,
                        const MonteCarloOptions& opts = {});

struct RequiredRequestsOptions {
  MonteCarloOptions mc;
  std::uint64_t n_max = 4'000'000;
};

// Smallest request count whose estimated success reaches target_success,
// found by binary search. Throws RequestsUnreachable when n_max falls short.
std::uint64_t required_requests(double amplification, const ChannelParams& p,
                                double target_success, std::uint64_t seed,
                                const RequiredRequestsOptions& opts = {});

// Success estimates on an amplification x request-count grid; row i is
// amplifications[i].
std::vector<std::vector<double>> success_rate_curve(
    std::span<const double> amplifications,
    std::span<const std::uint64_t> request_counts, const ChannelParams& p,
    std::uint64_t seed, const MonteCarloOptions& opts = {});

// One row of the measured JavaScript attack table.
struct JsAttackRow {
  double amplification;
  std::uint64_t required_requests;
  double runtime_ms;
  int leaked_bits_per_hour;
};

std::span<const JsAttackRow> js_attack_table();

// Script runtime as a function of amplification.
class RuntimeModel {
 public:
  // runtime(a) = c0 + c1 * a, in milliseconds.
  static RuntimeModel affine(double c0_ms, double c1_ms_per_iteration);
  // Least-squares affine fit to the table's (amplification, runtime) pairs.
  static RuntimeModel fitted_to_table();
  // Piecewise-linear through the table rows, linear extrapolation outside.
  static RuntimeModel tabulated();

  double runtime_s(double amplification) const;

  bool is_affine() const { return points_.empty(); }
  double c0_ms() const { return c0_ms_; }
  double c1_ms() const { return c1_ms_; }

 private:
  double c0_ms_ = 0;
  double c1_ms_ = 0;
  std::vector<std::pair<double, double>> points_;  // (amplification, ms)
};

struct LeakEstimate {
  double amplification = 0;
  std::uint64_t requests_per_bit = 0;
  double script_runtime_s = 0;
  double leakage_bits_per_hour = 0;
  double success_rate = 1;
};

// Binary-symmetric-channel capacity 1 - H(s), 1 at s in {0, 1}.
double bsc_capacity(double success_rate);

// leakage = 3600 / (requests_per_bit * runtime) bits per hour, scaled by
// bsc_capacity(success_rate).
LeakEstimate leakage_rate(double amplification, std::uint64_t requests_per_bit,
                          double script_runtime_s, double success_rate = 1);
LeakEstimate leakage_rate(double amplification, std::uint64_t requests_per_bit,
                          const RuntimeModel& runtime, double success_rate = 1);

}  // namespace specguard

#endif  // SPECGUARD_CHANNEL_H_
