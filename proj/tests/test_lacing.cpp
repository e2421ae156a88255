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

#include "chronolace/lacing.hpp"

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "chronolace/adjustments.hpp"
#include "chronolace/constants.hpp"
#include "chronolace/errors.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

namespace {

using namespace chronolace;
using namespace chronolace::lacing;
using chronolace_tests::rel;

constexpr double kCc = kSpeedOfLight;

// Uniform pair: two static machines 1.5 light-seconds apart.
WorldlineImage uniform_a() { return {{-40.0, 0.0}, {80.0, 0.0}}; }
WorldlineImage uniform_b() {
  return {{-40.0, 1.5 * kCc}, {80.0, 1.5 * kCc}};
}

// Drifting pair: A static, B receding at c/5 from 2 light-seconds.
WorldlineImage drift_a() { return {{-6.0, 0.0}, {60.0, 0.0}}; }
WorldlineImage drift_b() {
  return {{-6.0, 0.8 * kCc}, {60.0, 14.0 * kCc}};
}

// Kinked pair: B hovers at 2 light-seconds, then recedes at c/2.
WorldlineImage kink_a() { return {{-15.0, 0.0}, {30.0, 0.0}}; }
WorldlineImage kink_b() {
  return {{-10.0, 2.0 * kCc}, {5.0, 2.0 * kCc}, {40.0, 19.5 * kCc}};
}

LacingSpec drift_spec() {
  return LacingSpec{drift_a(), drift_b(), {0.0, 0.0}, 2, {{2.0, 0.0}}};
}

LacingSpec uniform_spec_n3() {
  return LacingSpec{uniform_a(), uniform_b(), {0.0, 0.0}, 3,
                    {{1.0, 0.0}, {2.0, 0.0}}};
}

TEST_SUITE("lacing") {

TEST_CASE("worldline images validate ordering and timelikeness") {
  CHECK_THROWS_AS(validate_image({{0.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(validate_image({{1.0, 0.0}, {0.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(validate_image({{0.0, 0.0}, {1.0, kCc}}), ConfigError);
  CHECK_NOTHROW(validate_image({{0.0, 0.0}, {1.0, 0.5 * kCc}}));

  const WorldlineImage b = kink_b();
  CHECK(position_at(b, 5.0) == 2.0 * kCc);
  CHECK(position_at(b, 22.5) == rel(10.75 * kCc, 1e-12));
  CHECK(position_at(b, 50.0) == rel(24.5 * kCc, 1e-12));   // Back extension.
  CHECK(position_at(b, -20.0) == rel(2.0 * kCc, 1e-12));   // Front extension.
}

TEST_CASE("light cone crossings hit static, slanted, and kinked images") {
  const Event1D origin{0.0, 0.0};
  const Event1D hit = forward_reception(uniform_b(), origin);
  CHECK(hit.t == rel(1.5, 1e-12));
  CHECK(hit.x == rel(1.5 * kCc, 1e-12));

  const WorldlineImage left{{-40.0, -2.0 * kCc}, {80.0, -2.0 * kCc}};
  const Event1D hit_left = forward_reception(left, origin);
  CHECK(hit_left.t == rel(2.0, 1e-12));
  CHECK(hit_left.x == rel(-2.0 * kCc, 1e-12));

  // The ray from t=4 misses B's hovering segment and lands past the kink.
  const Event1D kinked = forward_reception(kink_b(), {4.0, 0.0});
  CHECK(kinked.t == rel(7.0, 1e-12));
  CHECK(kinked.x == rel(3.0 * kCc, 1e-12));

  const Event1D emitter = backward_emission(kink_b(), {10.0, 0.0});
  CHECK(emitter.t == rel(7.0, 1e-12));
  CHECK(emitter.x == rel(3.0 * kCc, 1e-12));

  CHECK_THROWS_AS(forward_reception(uniform_a(), origin), GeometryError);
  CHECK_THROWS_AS(backward_emission(uniform_a(), origin), GeometryError);
}

TEST_CASE("two-machine placement puts B ticks on cone intersections") {
  std::vector<Event1D> ticks;
  for (int m = 0; m < 12; ++m) ticks.push_back({static_cast<double>(m), 0.0});

  SUBCASE("uniform ticks displace B by half the echo count") {
    const TwoMachineSolutions sol = solve_two_machine(ticks, 3);
    REQUIRE(sol.right.size() == 9);
    REQUIRE(sol.left.size() == 9);
    for (std::size_t m = 0; m < sol.right.size(); ++m) {
      CHECK(sol.right[m].t == rel(static_cast<double>(m) + 1.5, 1e-12));
      CHECK(sol.right[m].x == rel(1.5 * kCc, 1e-12));
      CHECK(sol.left[m].t == rel(static_cast<double>(m) + 1.5, 1e-12));
      CHECK(sol.left[m].x == rel(-1.5 * kCc, 1e-12));
    }
  }

  SUBCASE("refining A's clock triples B's tick density, same corridor") {
    std::vector<Event1D> fine;
    for (int m = 0; m < 34; ++m) fine.push_back({m / 3.0, 0.0});
    const TwoMachineSolutions sol = solve_two_machine(fine, 9);
    REQUIRE(sol.right.size() == 25);
    for (std::size_t m = 0; m < sol.right.size(); ++m) {
      CHECK(sol.right[m].x == rel(1.5 * kCc, 1e-12));  // Same corridor.
      CHECK(sol.right[m].t == rel(m / 3.0 + 1.5, 1e-12));
    }
  }

  SUBCASE("skewed worldline solutions check out by ray tracing") {
    std::vector<Event1D> skewed;
    for (int m = 0; m < 12; ++m) {
      skewed.push_back({static_cast<double>(m), 0.05 * kCc * m});
    }
    const TwoMachineSolutions sol = solve_two_machine(skewed, 3);
    for (const auto* side : {&sol.right, &sol.left}) {
      for (std::size_t m = 0; m < side->size(); ++m) {
        const Event1D& b = (*side)[m];
        const Event1D& send = skewed[m];
        const Event1D& receive = skewed[m + 3];
        CHECK(std::abs(b.x - send.x) ==
              rel(kCc * (b.t - send.t), 1e-12));
        CHECK(std::abs(receive.x - b.x) ==
              rel(kCc * (receive.t - b.t), 1e-12));
      }
    }
  }

  SUBCASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(solve_two_machine(ticks, 0), ConfigError);
    CHECK_THROWS_AS(solve_two_machine(ticks, -2), ConfigError);
    std::vector<Event1D> three{ticks.begin(), ticks.begin() + 3};
    CHECK_THROWS_AS(solve_two_machine(three, 3), ConfigError);
    std::vector<Event1D> spacelike{{0.0, 0.0}, {1.0, 2.0 * kCc}, {2.0, 0.0}};
    CHECK_THROWS_AS(solve_two_machine(spacelike, 1), ConfigError);
  }
}

TEST_CASE("uniform lacings tick uniformly") {
  SUBCASE("echo count 1 gives period 3") {
    const LacingSpec spec{uniform_a(), uniform_b(), {0.0, 0.0}, 1, {}};
    const LacingClockings laced = build_lacing_clockings(spec);
    CHECK(laced.n == 1);
    CHECK(laced.clock_a.breakpoints.front() == -13.0);
    CHECK(laced.clock_a.breakpoints.back() == 26.0);
    for (int ell = -13; ell <= 26; ++ell) {
      if (ell == 0) {
        CHECK(std::abs(adjustments::apply(laced.clock_a, 0.0)) < 1e-12);
      } else {
        CHECK(adjustments::apply(laced.clock_a, ell) == rel(3.0 * ell, 1e-12));
      }
      CHECK(adjustments::apply(laced.clock_b, ell) ==
            rel(3.0 * ell + 1.5, 1e-12));
    }
  }

  SUBCASE("interpolated chains make echo count 3 at period 1") {
    const LacingClockings laced = build_lacing_clockings(uniform_spec_n3());
    // One backward chain lands exactly on A's first image event, so the
    // laced window opens at reading -40.
    CHECK(laced.clock_a.breakpoints.front() == -40.0);
    CHECK(laced.clock_a.breakpoints.back() == 80.0);
    CHECK(laced.clock_b.breakpoints.back() == 78.0);
    for (int ell = -40; ell <= 78; ++ell) {
      if (ell == 0) {
        CHECK(std::abs(adjustments::apply(laced.clock_a, 0.0)) < 1e-12);
      } else {
        CHECK(adjustments::apply(laced.clock_a, ell) ==
              rel(static_cast<double>(ell), 1e-12));
      }
      CHECK(adjustments::apply(laced.clock_b, ell) ==
            rel(ell + 1.5, 1e-12));
    }
    // The laced B ticks coincide with the two-machine solution for delta 3.
    std::vector<Event1D> ticks;
    for (int m = 0; m < 12; ++m) {
      ticks.push_back({static_cast<double>(m), 0.0});
    }
    const TwoMachineSolutions sol = solve_two_machine(ticks, 3);
    for (std::size_t m = 0; m < sol.right.size(); ++m) {
      CHECK(adjustments::apply(laced.clock_b, static_cast<double>(m)) ==
            rel(sol.right[m].t, 1e-12));
    }
  }
}

TEST_CASE("drifting lacing matches the frozen chain readings") {
  const LacingClockings laced = build_lacing_clockings(drift_spec());
  const std::vector<double> a_times{
      -50.0 / 9.0, -14.0 / 3.0, -10.0 / 3.0, -2.0, 0.0, 2.0, 5.0,
      8.0,         12.5,        17.0,        23.75, 30.5, 40.625, 50.75};
  const std::vector<double> b_times{
      -40.0 / 9.0, -10.0 / 3.0, -5.0 / 3.0, 0.0,   2.5,    5.0, 8.75,
      12.5,        18.125,      23.75,      32.1875, 40.625, 53.28125};
  REQUIRE(laced.clock_a.breakpoints.size() == a_times.size());
  REQUIRE(laced.clock_b.breakpoints.size() == b_times.size());
  CHECK(laced.clock_a.breakpoints.front() == -4.0);
  CHECK(laced.clock_a.breakpoints.back() == 9.0);
  CHECK(laced.clock_b.breakpoints.front() == -4.0);
  CHECK(laced.clock_b.breakpoints.back() == 8.0);
  for (std::size_t i = 0; i < a_times.size(); ++i) {
    if (a_times[i] == 0.0) {
      CHECK(std::abs(laced.clock_a.values[i]) < 1e-12);
    } else {
      CHECK(laced.clock_a.values[i] == rel(a_times[i], 1e-12));
    }
  }
  for (std::size_t i = 0; i < b_times.size(); ++i) {
    if (b_times[i] == 0.0) {
      CHECK(std::abs(laced.clock_b.values[i]) < 1e-12);
    } else {
      CHECK(laced.clock_b.values[i] == rel(b_times[i], 1e-12));
    }
  }

  // Regenerated channels carry null phases and the canonical offsets.
  const auto ab = regenerate_channel(laced.clock_a, drift_a(), laced.clock_b,
                                     drift_b(), -4, 8);
  for (const ReadingPair& pair : ab) {
    CHECK(std::abs(pair.receive - pair.send) < 1e-9);
  }
  const auto ba = regenerate_channel(laced.clock_b, drift_b(), laced.clock_a,
                                     drift_a(), -4, 7);
  for (const ReadingPair& pair : ba) {
    CHECK(std::abs(pair.receive - (pair.send + 2.0)) < 1e-9);
  }
}

TEST_CASE("kinked lacing matches the frozen chain readings") {
  const LacingSpec spec{kink_a(), kink_b(), {0.0, 0.0}, 1, {}};
  const LacingClockings laced = build_lacing_clockings(spec);
  const std::vector<double> a_times{-12.0, -8.0, -4.0, 0.0, 4.0, 10.0, 28.0};
  const std::vector<double> b_times{-10.0, -6.0, -2.0, 2.0, 7.0, 19.0};
  REQUIRE(laced.clock_a.breakpoints.size() == a_times.size());
  REQUIRE(laced.clock_b.breakpoints.size() == b_times.size());
  CHECK(laced.clock_a.breakpoints.front() == -3.0);
  CHECK(laced.clock_a.breakpoints.back() == 3.0);
  CHECK(laced.clock_b.breakpoints.back() == 2.0);
  for (std::size_t i = 0; i < a_times.size(); ++i) {
    if (a_times[i] == 0.0) {
      CHECK(std::abs(laced.clock_a.values[i]) < 1e-12);
    } else {
      CHECK(laced.clock_a.values[i] == rel(a_times[i], 1e-12));
    }
  }
  for (std::size_t i = 0; i < b_times.size(); ++i) {
    CHECK(laced.clock_b.values[i] == rel(b_times[i], 1e-12));
  }
}

TEST_CASE("lacing specs are validated") {
  SUBCASE("anchor must lie on the image") {
    LacingSpec spec{uniform_a(), uniform_b(), {0.0, 5.0}, 1, {}};
    CHECK_THROWS_AS(build_lacing_clockings(spec), ConfigError);
  }
  SUBCASE("interior events must sit between anchor and first return") {
    LacingSpec spec{uniform_a(), uniform_b(), {0.0, 0.0}, 2, {{3.5, 0.0}}};
    CHECK_THROWS_AS(build_lacing_clockings(spec), ConfigError);
    spec.interior = {{-0.5, 0.0}};
    CHECK_THROWS_AS(build_lacing_clockings(spec), ConfigError);
  }
  SUBCASE("interior count must match the echo count") {
    LacingSpec spec{uniform_a(), uniform_b(), {0.0, 0.0}, 3, {{1.0, 0.0}}};
    CHECK_THROWS_AS(build_lacing_clockings(spec), ConfigError);
    spec.n = 0;
    spec.interior = {};
    CHECK_THROWS_AS(build_lacing_clockings(spec), ConfigError);
  }
  SUBCASE("intersecting images are not radar linkable") {
    const WorldlineImage crossing{{0.0, -1.0 * kCc}, {10.0, 4.0 * kCc}};
    LacingSpec spec{{{0.0, 0.0}, {10.0, 0.0}}, crossing, {0.0, 0.0}, 1, {}};
    CHECK_THROWS_AS(build_lacing_clockings(spec), GeometryError);
  }
  SUBCASE("images must overlap in time") {
    LacingSpec spec{{{0.0, 0.0}, {5.0, 0.0}},
                    {{6.0, kCc}, {10.0, kCc}},
                    {0.0, 0.0},
                    1,
                    {}};
    CHECK_THROWS_AS(build_lacing_clockings(spec), GeometryError);
  }
  SUBCASE("images too short to lace") {
    LacingSpec spec{{{0.0, 0.0}, {2.0, 0.0}},
                    {{0.0, 1.5 * kCc}, {2.0, 1.5 * kCc}},
                    {0.0, 0.0},
                    1,
                    {}};
    CHECK_THROWS_AS(build_lacing_clockings(spec), GeometryError);
  }
}

TEST_CASE("identity choices reconstruct the identity pair") {
  SUBCASE("drifting pair") {
    const AdjustmentPair pair =
        construct_k_pair(drift_spec(), 0.0, std::vector<double>{1.0});
    for (double x = -3.0; x <= 8.0; x += 0.37) {
      CHECK(std::abs(adjustments::apply(pair.f_a, x) - x) < 1e-9);
    }
    for (double x = -3.0; x <= 6.0; x += 0.37) {
      CHECK(std::abs(adjustments::apply(pair.f_b, x) - x) < 1e-9);
    }
    CHECK(verify_invariance(pair, lacing_channel_ab(2), lacing_channel_ba(2),
                            drift_spec()));
  }
  SUBCASE("uniform pair at echo count 3") {
    const AdjustmentPair pair = construct_k_pair(
        uniform_spec_n3(), 0.0, std::vector<double>{1.0, 2.0});
    for (double x = -30.0; x <= 70.0; x += 1.7) {
      CHECK(std::abs(adjustments::apply(pair.f_a, x) - x) < 1e-9);
    }
    CHECK(verify_invariance(pair, lacing_channel_ab(3), lacing_channel_ba(3),
                            uniform_spec_n3()));
  }
}

TEST_CASE("sliding the anchor leaves the channels invariant") {
  const LacingSpec spec{uniform_a(), uniform_b(), {0.0, 0.0}, 1, {}};
  const AdjustmentPair pair = construct_k_pair(spec, 0.25, {});
  for (double x = -10.0; x <= 20.0; x += 0.51) {
    CHECK(adjustments::apply(pair.f_a, x) == rel(x + 0.25, 1e-12));
    CHECK(adjustments::apply(pair.f_b, x) == rel(x + 0.25, 1e-12));
  }
  CHECK(verify_invariance(pair, lacing_channel_ab(1), lacing_channel_ba(1),
                          spec));
}

TEST_CASE("nudged interior choices stay members, moving B's ticks") {
  SUBCASE("drifting pair, frozen adjustment knots") {
    const AdjustmentPair pair =
        construct_k_pair(drift_spec(), 0.5, std::vector<double>{2.2});
    const std::vector<double> frozen{-3.8, -3.5, -1.8, -1.5, 0.2, 0.5, 2.2,
                                     2.5,  4.2,  4.5,  6.2,  6.5, 8.2, 8.5};
    for (int j = -5; j <= 8; ++j) {
      CHECK(adjustments::apply(pair.f_a, j) ==
            rel(frozen[static_cast<std::size_t>(j + 5)], 1e-12));
    }
    for (int j = -5; j <= 6; ++j) {
      CHECK(adjustments::apply(pair.f_b, j) ==
            rel(frozen[static_cast<std::size_t>(j + 5)], 1e-12));
    }
    CHECK(verify_invariance(pair, lacing_channel_ab(2), lacing_channel_ba(2),
                            drift_spec()));
    // B's tick 0 moved along B's image: bounce of the new seed.
    const LacingClockings base = build_lacing_clockings(drift_spec());
    const auto adjusted_b = adjustments::compose(base.clock_b, pair.f_b);
    CHECK(adjustments::apply(base.clock_b, 0.0) == rel(2.5, 1e-12));
    CHECK(adjustments::apply(adjusted_b, 0.0) == rel(3.75, 1e-12));
  }
  SUBCASE("uniform pair at echo count 3") {
    const AdjustmentPair pair = construct_k_pair(
        uniform_spec_n3(), 0.3, std::vector<double>{1.45, 2.9});
    const std::vector<double> expected{0.3, 1.45, 2.9, 3.3, 4.45, 5.9};
    for (int j = 0; j <= 5; ++j) {
      CHECK(adjustments::apply(pair.f_a, j) ==
            rel(expected[static_cast<std::size_t>(j)], 1e-12));
    }
    CHECK(verify_invariance(pair, lacing_channel_ab(3), lacing_channel_ba(3),
                            uniform_spec_n3()));
    const LacingClockings base = build_lacing_clockings(uniform_spec_n3());
    const auto adjusted_b = adjustments::compose(base.clock_b, pair.f_b);
    CHECK(adjustments::apply(adjusted_b, 0.0) == rel(1.8, 1e-12));
  }
}

TEST_CASE("invalid choices are rejected") {
  CHECK_THROWS_AS(
      construct_k_pair(drift_spec(), 0.5, std::vector<double>{3.0}),
      InvalidChoiceError);  // Trails the re-adjusted first echo.
  CHECK_THROWS_AS(
      construct_k_pair(drift_spec(), 0.5, std::vector<double>{0.4}),
      InvalidChoiceError);  // Not increasing.
  CHECK_THROWS_AS(
      construct_k_pair(drift_spec(), 0.5, std::vector<double>{0.5}),
      InvalidChoiceError);  // Not strictly increasing.
  CHECK_THROWS_AS(
      construct_k_pair(drift_spec(), -100.0, std::vector<double>{-99.0}),
      InvalidChoiceError);  // Outside the laced window.
  CHECK_THROWS_AS(construct_k_pair(drift_spec(), 0.5, {}), ConfigError);
  CHECK_THROWS_AS(
      construct_k_pair(drift_spec(), 0.5, std::vector<double>{1.0, 2.0}),
      ConfigError);
}

TEST_CASE("random members verify; random pairs do not") {
  std::mt19937 rng(20260823u);
  std::uniform_real_distribution<double> anchor_choice(-1.0, 0.5);
  std::uniform_real_distribution<double> gap(0.2, 1.8);

  SUBCASE("randomized constructed members pass") {
    for (int trial = 0; trial < 8; ++trial) {
      const double z0 = anchor_choice(rng);
      const double z1 = z0 + gap(rng);
      const AdjustmentPair pair =
          construct_k_pair(drift_spec(), z0, std::vector<double>{z1});
      CHECK(verify_invariance(pair, lacing_channel_ab(2),
                              lacing_channel_ba(2), drift_spec()));
    }
  }

  SUBCASE("targeted non-members fail") {
    const AdjustmentPair mismatched{adjustments::identity_adjustment(),
                                    adjustments::shift_adjustment(0.3)};
    CHECK_FALSE(verify_invariance(mismatched, lacing_channel_ab(2),
                                  lacing_channel_ba(2), drift_spec()));
    const AdjustmentPair shifted_a{adjustments::shift_adjustment(0.3),
                                   adjustments::identity_adjustment()};
    CHECK_FALSE(verify_invariance(shifted_a, lacing_channel_ab(2),
                                  lacing_channel_ba(2), drift_spec()));
    // A matched rescaling keeps the one-way offsets but breaks the echo.
    const AdjustmentPair scaled{adjustments::scale_adjustment(1.01),
                                adjustments::scale_adjustment(1.01)};
    CHECK_FALSE(verify_invariance(scaled, lacing_channel_ab(2),
                                  lacing_channel_ba(2), drift_spec()));
  }

  SUBCASE("random independent pairs fail") {
    std::uniform_real_distribution<double> start(-4.0, -1.0);
    std::uniform_real_distribution<double> step(0.3, 2.2);
    const auto random_adjustment = [&]() {
      std::vector<double> b{start(rng)};
      std::vector<double> v{start(rng)};
      for (int i = 0; i < 5; ++i) {
        b.push_back(b.back() + step(rng));
        v.push_back(v.back() + step(rng));
      }
      return adjustments::make_adjustment(b, v);
    };
    for (int trial = 0; trial < 10; ++trial) {
      const AdjustmentPair pair{random_adjustment(), random_adjustment()};
      CHECK_FALSE(verify_invariance(pair, lacing_channel_ab(2),
                                    lacing_channel_ba(2), drift_spec()));
    }
  }

  SUBCASE("declared channels with wrong offsets fail") {
    const AdjustmentPair identity{adjustments::identity_adjustment(),
                                  adjustments::identity_adjustment()};
    CHECK_FALSE(verify_invariance(identity, lacing_channel_ab(2),
                                  lacing_channel_ba(3), drift_spec()));
  }
}

TEST_CASE("compositions of members remain members") {
  SUBCASE("drifting pair") {
    const AdjustmentPair m1 =
        construct_k_pair(drift_spec(), 0.3, std::vector<double>{1.45});
    const AdjustmentPair m2 =
        construct_k_pair(drift_spec(), 0.1, std::vector<double>{1.2});
    CHECK(verify_invariance(compose_pairs(m1, m2), lacing_channel_ab(2),
                            lacing_channel_ba(2), drift_spec()));
    CHECK(verify_invariance(compose_pairs(m2, m1), lacing_channel_ab(2),
                            lacing_channel_ba(2), drift_spec()));
  }
  SUBCASE("uniform pair at echo count 3") {
    std::mt19937 rng(5u);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      const double a0 = -0.4 + 0.8 * u(rng);
      const double a1 = a0 + 0.4 + u(rng);
      const double a2 = a1 + 0.2 + (a0 + 3.0 - a1 - 0.3) * u(rng) * 0.5;
      const double b0 = -0.4 + 0.8 * u(rng);
      const double b1 = b0 + 0.4 + u(rng);
      const double b2 = b1 + 0.2 + (b0 + 3.0 - b1 - 0.3) * u(rng) * 0.5;
      const AdjustmentPair m1 = construct_k_pair(
          uniform_spec_n3(), a0, std::vector<double>{a1, a2});
      const AdjustmentPair m2 = construct_k_pair(
          uniform_spec_n3(), b0, std::vector<double>{b1, b2});
      CHECK(verify_invariance(compose_pairs(m1, m2), lacing_channel_ab(3),
                              lacing_channel_ba(3), uniform_spec_n3()));
    }
  }
}

}  // TEST_SUITE

}  // namespace
