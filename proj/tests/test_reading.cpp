// Copyright 2026 The Chronolace Authors
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

#include "chronolace/reading.hpp"

#include <cmath>

#include <doctest.h>

#include "test_helpers.hpp"

using chronolace::fold_phase;
using chronolace::Reading;
using chronolace::reading_from_value;
using chronolace_tests::rel;

TEST_SUITE("reading") {

TEST_CASE("fold_phase lands in (-1/2, 1/2] with the boundary kept at +1/2") {
  CHECK(fold_phase(0.0) == 0.0);
  CHECK(fold_phase(0.5) == 0.5);
  CHECK(fold_phase(-0.5) == 0.5);
  CHECK(fold_phase(0.75) == rel(-0.25, 1e-15));
  CHECK(fold_phase(-0.75) == rel(0.25, 1e-15));
  CHECK(fold_phase(1.0) == 0.0);
  CHECK(fold_phase(17.3) == rel(0.3, 1e-12));
  CHECK(fold_phase(-17.3) == rel(-0.3, 1e-12));
  for (double x = -3.0; x <= 3.0; x += 0.0625) {
    const double phi = fold_phase(x);
    CHECK(phi > -0.5);
    CHECK(phi <= 0.5);
  }
}

TEST_CASE("readings order by cycle plus phase") {
  CHECK(Reading{2, 0.3}.value() == rel(2.3, 1e-15));
  CHECK(Reading{2, -0.4} < Reading{2, 0.3});
  CHECK(Reading{3, -0.4} > Reading{2, 0.3});
  CHECK(Reading{5, 0.0}.is_tick());
  CHECK_FALSE(Reading{5, 0.1}.is_tick());
  CHECK(Reading{2, 0.3} == Reading{2, 0.3});
}

TEST_CASE("reading_from_value splits into the normal form") {
  const Reading a = reading_from_value(2.7);
  CHECK(a.cycle == 3);
  CHECK(a.phase == rel(-0.3, 1e-14));

  const Reading b = reading_from_value(2.5);
  CHECK(b.cycle == 2);
  CHECK(b.phase == 0.5);

  const Reading c = reading_from_value(-2.5);
  CHECK(c.cycle == -3);
  CHECK(c.phase == 0.5);

  const Reading d = reading_from_value(4.0);
  CHECK(d.cycle == 4);
  CHECK(d.phase == 0.0);

  for (double v = -5.0; v <= 5.0; v += 0.03125) {
    const Reading r = reading_from_value(v);
    CHECK(r.phase > -0.5);
    CHECK(r.phase <= 0.5);
    CHECK(std::abs(r.value() - v) < 1e-12);
  }
}

}  // TEST_SUITE
