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

#ifndef SPECGUARD_ATTACK_PROFILE_H_
#define SPECGUARD_ATTACK_PROFILE_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "specguard/channel.h"

namespace specguard {

enum class SpectreVariant { kPht, kBtb, kRsb, kStl };

std::string_view variant_name(SpectreVariant v);
// Accepts "pht", "btb", "rsb", "stl"; throws InputError otherwise.
SpectreVariant parse_variant(std::string_view name);

// Retired branches per iTLB access as a function of amplification,
//   metric(a) = scale * (a + c) / (a + k),
// i.e. each gadget iteration adds a fixed number of branches and iTLB
// accesses on top of a constant per-execution footprint.
class AmplificationCurve {
 public:
  struct Anchor {
    double amplification;
    double metric;
  };

  // The unique curve through three anchors. Throws InputError when the
  // anchors are collinear or the solution has a pole at a >= 1.
  static AmplificationCurve through(Anchor a, Anchor b, Anchor c);

  double operator()(double amplification) const;

  double scale() const { return scale_; }
  double c() const { return c_; }
  double k() const { return k_; }

 private:
  double scale_ = 0;
  double c_ = 0;
  double k_ = 0;
};

// Parameters of a generated or analysed attack worker.
struct AttackProfile {
  SpectreVariant variant = SpectreVariant::kPht;

  // Branch/iTLB metric at full amplification for this variant.
  double full_metric = 423171.54;
  double full_amplification = 250000;
  // memory_disambiguation.history_reset per iTLB access.
  double md_reset_metric = 2644.73;
  // Per-execution lognormal spread of the generated metrics.
  double relative_spread = 0.03;

  // iTLB accesses per leaked bit before any padding, and branches executed
  // per extra code page touched. The base footprint is set so that the
  // branch metric at full amplification needs 125 extra pages to fall under
  // 4096.
  double base_itlb_per_bit = 1.215;
  double branches_per_page = 8;
  std::uint64_t page_bytes = 4096;

  // Requests needed to leak one bit without amplification; the request
  // count at amplification a is ceil(requests_at_unit / a).
  double requests_at_unit = 250000;

  // Branch/iTLB metric with `amplification` iterations and no padding.
  double metric_at(double amplification) const;
  // Same, with `pages` extra code pages touched per bit.
  double padded_metric(double amplification, double pages) const;
  std::uint64_t requests_at(double amplification) const;

  static AttackProfile for_variant(SpectreVariant v);
};

// The measured PHT amplification curve: 604.71 without amplification,
// 3492.41 at factor 10, 423171.54 at full amplification. Other variants use
// the same shape rescaled to their full-amplification metric.
const AmplificationCurve& pht_amplification_curve();

inline constexpr double kPhtMetric = 423171.54;
inline constexpr double kBtbMetric = 23401.20;
inline constexpr double kRsbMetric = 38369.17;
inline constexpr double kStlMetric = 982.20;
inline constexpr double kStlMdResetMetric = 8993.98;
inline constexpr double kBenignMdResetMetric = 2644.73;

}  // namespace specguard

#endif  // SPECGUARD_ATTACK_PROFILE_H_
