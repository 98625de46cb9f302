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

#include "specguard/attack_profile.h"

#include <cmath>

#include "specguard/error.h"

namespace specguard {

std::string_view variant_name(SpectreVariant v) {
  switch (v) {
    case SpectreVariant::kPht: return "pht";
    case SpectreVariant::kBtb: return "btb";
    case SpectreVariant::kRsb: return "rsb";
    case SpectreVariant::kStl: return "stl";
  }
  return "unknown";
}

SpectreVariant parse_variant(std::string_view name) {
  if (name == "pht") return SpectreVariant::kPht;
  if (name == "btb") return SpectreVariant::kBtb;
  if (name == "rsb") return SpectreVariant::kRsb;
  if (name == "stl") return SpectreVariant::kStl;
  throw InputError("unknown Spectre variant '" + std::string(name) + "'");
}

AmplificationCurve AmplificationCurve::through(Anchor a, Anchor b, Anchor c) {
  // y (x + k) = s x + s c, linear in (k, s, s*c):
  //   y k - s x - sc = -y x
  const Anchor pts[3] = {a, b, c};
  double m[3][3], rhs[3];
  for (int i = 0; i < 3; ++i) {
    m[i][0] = pts[i].metric;
    m[i][1] = -pts[i].amplification;
    m[i][2] = -1;
    rhs[i] = -pts[i].metric * pts[i].amplification;
  }
  auto det3 = [](const double (&x)[3][3]) {
    return x[0][0] * (x[1][1] * x[2][2] - x[1][2] * x[2][1]) -
           x[0][1] * (x[1][0] * x[2][2] - x[1][2] * x[2][0]) +
           x[0][2] * (x[1][0] * x[2][1] - x[1][1] * x[2][0]);
  };
  const double det = det3(m);
  if (std::abs(det) < 1e-9) throw InputError("amplification anchors are degenerate");
  double sol[3];
  for (int col = 0; col < 3; ++col) {
    double mc[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mc[i][j] = j == col ? rhs[i] : m[i][j];
    sol[col] = det3(mc) / det;
  }
  AmplificationCurve curve;
  curve.k_ = sol[0];
  curve.scale_ = sol[1];
  curve.c_ = sol[2] / sol[1];
  if (curve.k_ <= -1) throw InputError("amplification curve has a pole at a >= 1");
  return curve;
}

double AmplificationCurve::operator()(double amplification) const {
  return scale_ * (amplification + c_) / (amplification + k_);
}

const AmplificationCurve& pht_amplification_curve() {
  static const AmplificationCurve curve = AmplificationCurve::through(
      {1, 604.71}, {10, 3492.41}, {250000, kPhtMetric});
  return curve;
}

double AttackProfile::metric_at(double amplification) const {
  const auto& curve = pht_amplification_curve();
  return full_metric * curve(amplification) / curve(full_amplification);
}

double AttackProfile::padded_metric(double amplification, double pages) const {
  return (metric_at(amplification) * base_itlb_per_bit +
          pages * branches_per_page) /
         (base_itlb_per_bit + pages);
}

std::uint64_t AttackProfile::requests_at(double amplification) const {
  return static_cast<std::uint64_t>(std::ceil(requests_at_unit / amplification));
}

AttackProfile AttackProfile::for_variant(SpectreVariant v) {
  AttackProfile p;
  p.variant = v;
  switch (v) {
    case SpectreVariant::kPht: p.full_metric = kPhtMetric; break;
    case SpectreVariant::kBtb: p.full_metric = kBtbMetric; break;
    case SpectreVariant::kRsb: p.full_metric = kRsbMetric; break;
    case SpectreVariant::kStl:
      p.full_metric = kStlMetric;
      p.md_reset_metric = kStlMdResetMetric;
      break;
  }
  return p;
}

}  // namespace specguard
