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

// Randomized properties shared by the unit suite and the acceptance gate.
// Each returns how many generated cases were checked and how many failed.
#ifndef SPECGUARD_TESTS_PROPERTIES_H_
#define SPECGUARD_TESTS_PROPERTIES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "oracles.h"
#include "specguard/channel.h"
#include "specguard/ks.h"
#include "specguard/rng.h"
#include "specguard/threshold.h"
#include "specguard/trace.h"

namespace props {

struct Outcome {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  void check(bool ok, const std::string& what) {
    ++cases;
    if (ok) return;
    if (failures++ == 0) first_failure = what;
  }
  bool ok() const { return failures == 0; }
};

inline std::uint64_t below(specguard::Rng& rng, std::uint64_t n) { return rng() % n; }

// Multiplying every counter (denominator included) by k leaves the metrics
// unchanged; multiplying only the numerators by k scales them by k.
inline Outcome normalize_scale_covariance(std::size_t n, std::uint64_t seed) {
  using namespace specguard;
  Outcome o;
  Rng rng(seed);
  for (std::size_t c = 0; c < n; ++c) {
    CounterSnapshot s;
    s.worker_id = "w";
    s.itlb_accesses = 1 + below(rng, 1 << 20);
    s.branch_instructions = below(rng, 1ULL << 30);
    s.branch_misses = below(rng, s.branch_instructions + 1);
    s.cache_references = below(rng, 1 << 24);
    s.cache_misses = below(rng, s.cache_references + 1);
    s.l1d_read_accesses = below(rng, 1ULL << 30);
    s.l1d_read_misses = below(rng, s.l1d_read_accesses + 1);
    s.mem_disambiguation_resets = below(rng, 1 << 24);
    const std::uint64_t k = 1 + below(rng, 1000);

    CounterSnapshot all = s, num = s;
    for (auto* f : {&all.itlb_accesses, &all.branch_instructions, &all.branch_misses,
                    &all.cache_references, &all.cache_misses, &all.l1d_read_accesses,
                    &all.l1d_read_misses, &all.mem_disambiguation_resets})
      *f *= k;
    for (auto* f : {&num.branch_instructions, &num.branch_misses, &num.cache_references,
                    &num.cache_misses, &num.l1d_read_accesses, &num.l1d_read_misses,
                    &num.mem_disambiguation_resets})
      *f *= k;
    const NormalizedMetrics base = normalize(s);
    const NormalizedMetrics same = normalize(all);
    const NormalizedMetrics scaled = normalize(num);
    bool ok = same == base;
    for (int i = 0; i < kMetricCount; ++i) {
      const double want = metric_at(base, i) * static_cast<double>(k);
      ok = ok && std::abs(metric_at(scaled, i) - want) <= 1e-12 * std::max(1.0, want);
    }
    o.check(ok, "case " + std::to_string(c) + " k=" + std::to_string(k));
  }
  return o;
}

// fp(t) of a sweep is a survival curve: within [0, 1], nonincreasing in t,
// and equal to a direct count.
inline Outcome sweep_monotone(std::size_t n, std::uint64_t seed) {
  using namespace specguard;
  Outcome o;
  Rng rng(seed);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<IntervalAverage> pop(1 + below(rng, 300));
    for (auto& a : pop) {
      a.worker_id = "w";
      a.sample_count = 1;
      a.mean_metrics.branch_instructions =
          std::exp(uniform01(rng) * std::log(100000.0));
    }
    std::vector<double> ts(1 + below(rng, 30));
    for (auto& t : ts) t = uniform01(rng) * 120000;
    if (below(rng, 4) == 0) ts.push_back(pop[0].mean_metrics.branch_instructions);
    std::sort(ts.begin(), ts.end());
    const auto pts = sweep_thresholds(pop, ts);
    bool ok = pts.size() == ts.size();
    for (std::size_t i = 0; ok && i < pts.size(); ++i) {
      std::size_t count = 0;
      for (const auto& a : pop) count += a.mean_metrics.branch_instructions >= ts[i];
      ok = pts[i].fp_rate >= 0 && pts[i].fp_rate <= 1 &&
           pts[i].fp_rate == static_cast<double>(count) / static_cast<double>(pop.size()) &&
           (i == 0 || pts[i].fp_rate <= pts[i - 1].fp_rate);
    }
    o.check(ok, "case " + std::to_string(c));
  }
  return o;
}

// ks(a, b) and ks(b, a) agree on D and p in both modes.
inline Outcome ks_symmetry(std::size_t n, std::uint64_t seed) {
  using namespace specguard;
  Outcome o;
  Rng rng(seed);
  for (std::size_t c = 0; c < n; ++c) {
    const bool small = c % 2 == 0;
    const std::size_t na = 1 + below(rng, small ? 6 : 150);
    const std::size_t nb = 1 + below(rng, small ? 12 - na : 150);
    const std::uint64_t range = 1 + below(rng, small ? 5 : 10000);
    std::vector<std::uint64_t> a(na), b(nb);
    for (auto& x : a) x = below(rng, range);
    for (auto& x : b) x = below(rng, range);
    const KsMode mode = small ? KsMode::kExact : KsMode::kAsymptotic;
    const KsResult ab = ks_two_sample(a, b, mode);
    const KsResult ba = ks_two_sample(b, a, mode);
    o.check(ab.statistic == ba.statistic && ab.p_value == ba.p_value &&
                ab.p_value >= 0 && ab.p_value <= 1,
            "case " + std::to_string(c));
  }
  return o;
}

// Disjoint point masses are distinguishable at their midpoint; a sample
// against itself never is; samples shifted beyond their range always are.
inline Outcome box_trivial(std::size_t n, std::uint64_t seed) {
  using namespace specguard;
  Outcome o;
  Rng rng(seed);
  for (std::size_t c = 0; c < n; ++c) {
    const double lo = uniform01(rng) * 1e6;
    const double hi = lo + 1 + uniform01(rng) * 1e6;
    const std::vector<double> ones(1 + below(rng, 50), lo), zeros(1 + below(rng, 50), hi);
    const BoxTestResult point = box_test(zeros, ones);

    std::vector<double> xs(2 + below(rng, 200));
    for (auto& x : xs) x = uniform01(rng) * 1000;
    const BoxTestResult self = box_test(xs, xs);

    std::vector<double> shifted(xs);
    for (auto& x : shifted) x += 2000;
    const BoxTestResult apart = box_test(shifted, xs);

    o.check(point.distinguishable && point.decision_threshold == 0.5 * (lo + hi) &&
                !self.distinguishable && apart.distinguishable &&
                apart.decision_threshold > *std::max_element(xs.begin(), xs.end()) &&
                apart.decision_threshold <
                    *std::min_element(shifted.begin(), shifted.end()),
            "case " + std::to_string(c));
  }
  return o;
}

// Success never drops by more than one Monte-Carlo standard error when
// amplification or the request count grows.
inline Outcome success_monotone(std::size_t n, std::uint64_t seed) {
  using namespace specguard;
  Outcome o;
  Rng rng(seed);
  const ChannelParams p;
  const MonteCarloOptions mc{400, VoteMethod::kBinomial};
  auto se = [&](double s) { return std::sqrt(std::max(s * (1 - s), 0.25 / mc.trials) / mc.trials); };
  for (std::size_t c = 0; c < n; ++c) {
    const double a1 = std::floor(std::exp(uniform01(rng) * std::log(20000.0))) + 1;
    const double a2 = a1 * (1 + std::floor(uniform01(rng) * 8));
    const std::uint64_t n1 = 1 + below(rng, 2000);
    const std::uint64_t n2 = n1 + below(rng, 2000);
    const std::uint64_t s = derive_seed(seed, {c});
    const std::vector<double> amps = {a1, a2};
    const std::vector<std::uint64_t> reqs = {n1, n2};
    const auto g = success_rate_curve(amps, reqs, p, s, mc);
    bool ok = true;
    for (int i = 0; i < 2; ++i) ok = ok && g[i][1] >= g[i][0] - se(g[i][0]);
    for (int j = 0; j < 2; ++j) ok = ok && g[1][j] >= g[0][j] - se(g[0][j]);
    o.check(ok, "case " + std::to_string(c) + " a=" + std::to_string(a1) + "/" +
                    std::to_string(a2) + " n=" + std::to_string(n1) + "/" +
                    std::to_string(n2));
  }
  return o;
}

// D against the brute-force ECDF oracle and exact p against full permutation
// enumeration, for samples with n + m <= 8 over the values {1..4}.
inline Outcome ks_oracle(std::size_t n, std::uint64_t seed) {
  using namespace specguard;
  Outcome o;
  Rng rng(seed);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t total = 2 + below(rng, 7);
    const std::size_t na = 1 + below(rng, total - 1);
    std::vector<std::uint64_t> a(na), b(total - na);
    for (auto& x : a) x = 1 + below(rng, 4);
    for (auto& x : b) x = 1 + below(rng, 4);
    const KsResult r = ks_two_sample(a, b, KsMode::kExact);
    o.check(r.statistic == oracle::ks_statistic(a, b) &&
                r.p_value == oracle::ks_permutation_p(a, b),
            "case " + std::to_string(c));
  }
  return o;
}

}  // namespace props

#endif  // SPECGUARD_TESTS_PROPERTIES_H_
