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

#include "doctest.h"
#include "properties.h"

namespace {

void expect(const props::Outcome& o, std::size_t min_cases) {
  CHECK(o.cases >= min_cases);
  CHECK_MESSAGE(o.ok(), o.failures, " failures; first: ", o.first_failure);
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("normalize is scale-covariant") { expect(props::normalize_scale_covariance(500, 1), 500); }
TEST_CASE("sweep is a survival curve") { expect(props::sweep_monotone(300, 2), 300); }
TEST_CASE("KS is symmetric") { expect(props::ks_symmetry(400, 3), 400); }
TEST_CASE("box test trivial cases") { expect(props::box_trivial(300, 4), 300); }
TEST_CASE("success curve is monotone") { expect(props::success_monotone(200, 5), 200); }
TEST_CASE("KS matches the brute-force oracles") { expect(props::ks_oracle(1000, 6), 1000); }

}  // TEST_SUITE
