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

#ifndef SPECGUARD_KS_H_
#define SPECGUARD_KS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace specguard {

using BranchId = std::uint64_t;

// Per-branch misprediction counts from PEBS-style sampling. Zero counts are
// never stored.
class BranchHistogram {
 public:
  BranchHistogram() = default;

  // Adds `count` mispredictions to `branch`; count 0 is a no-op.
  void add(BranchId branch, std::uint64_t count);

  const std::map<BranchId, std::uint64_t>& entries() const { return entries_; }
  std::uint64_t total() const { return total_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool operator==(const BranchHistogram&) const = default;

 private:
  std::map<BranchId, std::uint64_t> entries_;
  std::uint64_t total_ = 0;
};

// CSV with header "branch_id,mispredictions". Branch ids are written as
// 0x-prefixed hex and read as hex or decimal. Duplicate ids and zero counts
// are rejected.
BranchHistogram parse_histogram_csv(std::istream& in);
BranchHistogram load_histogram(const std::filesystem::path& path);
std::string emit_histogram_csv(const BranchHistogram& h);

// The k largest counts in descending order; ties by ascending branch id.
// Returns every count when the histogram has fewer than k branches.
std::vector<std::uint64_t> top_branches(const BranchHistogram& h,
                                        std::size_t k);

enum class KsMode { kAsymptotic, kExact };

inline constexpr std::size_t kExactModeLimit = 12;

struct KsResult {
  double statistic = 0;  // D
  double p_value = 1;
  std::size_t n = 0;
  std::size_t m = 0;
};

// Two-sided two-sample Kolmogorov-Smirnov test. D is evaluated at the
// observed support points, so ties in discrete data are handled exactly.
//
// kAsymptotic: p from the Kolmogorov distribution at
//   lambda = D * sqrt(n*m / (n+m)).
// kExact: p is the fraction of the C(n+m, n) relabellings of the pooled
//   sample whose statistic is at least D (n+m <= kExactModeLimit).
KsResult ks_two_sample(std::span<const std::uint64_t> a,
                       std::span<const std::uint64_t> b,
                       KsMode mode = KsMode::kAsymptotic);

// Complementary Kolmogorov CDF Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 l^2),
// at most 100 terms; returns 1 if the series has not converged by then.
double kolmogorov_survival(double lambda);

struct KsVerdict {
  bool suspect = false;
  KsResult ks;
  double alpha = 0.1;
  std::size_t k_effective = 0;
};

inline constexpr double kDefaultKsAlpha = 0.1;
inline constexpr std::size_t kDefaultTopBranches = 100;

// Suspect when the program's top-k misprediction counts cannot be told
// apart from the attack template at level alpha (p >= alpha).
KsVerdict classify_ks(const BranchHistogram& hist,
                      const BranchHistogram& attack_template,
                      double alpha = kDefaultKsAlpha,
                      std::size_t k = kDefaultTopBranches);

}  // namespace specguard

#endif  // SPECGUARD_KS_H_
