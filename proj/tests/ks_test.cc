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

#include <sstream>

#include "doctest.h"
#include "oracles.h"
#include "specguard/error.h"
#include "specguard/generators.h"
#include "specguard/ks.h"
#include "specguard/schema.h"

using namespace specguard;

namespace {

std::vector<std::uint64_t> v(std::initializer_list<std::uint64_t> xs) { return xs; }

}  // namespace

TEST_SUITE("ks") {

TEST_CASE("top_branches orders by count") {
  BranchHistogram h;
  h.add(0xb1, 50);
  h.add(0xb2, 10);
  h.add(0xb3, 5);
  CHECK(top_branches(h, 2) == v({50, 10}));
  CHECK(top_branches(h, 10).size() == 3);
  CHECK_THROWS_AS(top_branches(BranchHistogram{}, 3), EmptyHistogram);

  BranchHistogram flat;
  for (BranchId id = 1; id <= 100; ++id) flat.add(id, 7);
  CHECK(top_branches(flat, 100) == std::vector<std::uint64_t>(100, 7));
}

TEST_CASE("the attack template ranks the delay loop above the mistrained branch") {
  const auto top = top_branches(default_attack_template(), 2);
  CHECK(top[0] > top[1]);
}

TEST_CASE("two-sample statistic and p-value") {
  SUBCASE("identical samples") {
    const auto a = v({3, 1, 4, 1, 5});
    const KsResult r = ks_two_sample(a, a);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
  }
  SUBCASE("disjoint supports") {
    CHECK(ks_two_sample(v({1, 1, 1, 1}), v({9, 9, 9, 9})).statistic == 1.0);
  }
  SUBCASE("exact mode equals the permutation enumeration") {
    const auto a = v({1, 2, 3}), b = v({2, 3, 4});
    const KsResult r = ks_two_sample(a, b, KsMode::kExact);
    CHECK(r.statistic == oracle::ks_statistic(a, b));
    CHECK(r.p_value == oracle::ks_permutation_p(a, b));
  }
  SUBCASE("exact mode has a size limit") {
    std::vector<std::uint64_t> a(7, 1), b(6, 2);
    CHECK_THROWS_AS(ks_two_sample(a, b, KsMode::kExact), ExactModeTooLarge);
  }
  SUBCASE("empty samples are rejected") {
    CHECK_THROWS_AS(ks_two_sample(v({}), v({1})), EmptySample);
  }
}

TEST_CASE("Kolmogorov series agrees with a long-double reference") {
  for (double lambda : {0.3, 0.5, 0.8, 1.0, 1.36, 2.0, 3.0})
    CHECK(kolmogorov_survival(lambda) ==
          doctest::Approx(oracle::kolmogorov_q(lambda)).epsilon(1e-9));
  CHECK(kolmogorov_survival(0) == 1.0);
}

TEST_CASE("classification against the template") {
  const BranchHistogram tmpl = default_attack_template();
  CHECK(classify_ks(tmpl, tmpl).suspect);

  // A broad, flat benign program (not one of the loop-heavy ones).
  BenignProfile profile = BenignProfile::calibrated();
  profile.loop_heavy_fraction = 0;
  const KsVerdict benign = classify_ks(benign_histogram(profile, 42), tmpl);
  CHECK_FALSE(benign.suspect);
  CHECK(benign.ks.p_value < 0.1);
}

TEST_CASE("histogram CSV") {
  SUBCASE("round trip") {
    const BranchHistogram h = default_attack_template();
    std::istringstream in(emit_histogram_csv(h));
    CHECK(parse_histogram_csv(in) == h);
  }
  SUBCASE("duplicates and zero counts violate invariants") {
    std::istringstream dup("branch_id,mispredictions\n0x1,3\n0x1,4\n");
    CHECK_THROWS_AS(parse_histogram_csv(dup), InvariantViolation);
    std::istringstream zero("branch_id,mispredictions\n0x1,0\n");
    CHECK_THROWS_AS(parse_histogram_csv(zero), InvariantViolation);
  }
  SUBCASE("the shipped template is the generated one") {
    CHECK(load_histogram(std::string(SPECGUARD_DATA_DIR) + "/pht_template.csv") ==
          default_attack_template());
  }
}

}  // TEST_SUITE
