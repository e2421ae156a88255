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

#ifndef CHRONOLACE_LACING_HPP_
#define CHRONOLACE_LACING_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "chronolace/adjustments.hpp"
#include "chronolace/channels.hpp"

namespace chronolace::lacing {

/// An event in a 1+1 chart: coordinate time (seconds) and position (meters).
struct Event1D {
  double t = 0.0;
  double x = 0.0;

  friend bool operator==(const Event1D&, const Event1D&) = default;
};

/// A worldline image: a timelike polyline, ordered by strictly increasing t,
/// extended linearly beyond its end events when a signal construction needs
/// it. Positions between listed events interpolate linearly.
using WorldlineImage = std::vector<Event1D>;

/// Checks image invariants (>= 2 events, strictly increasing t, every segment
/// timelike). Violations raise ConfigError.
void validate_image(const WorldlineImage& image);

/// Interpolated position of the image at coordinate time t.
double position_at(const WorldlineImage& image, double t);

/// The unique event on `target` where the forward light cone of `from` first
/// meets it. Raises GeometryError if `from` lies on the target worldline.
Event1D forward_reception(const WorldlineImage& target, const Event1D& from);

/// The unique event on `source` whose light signal arrives exactly at `to`
/// (the backward light cone crossing). Raises GeometryError if `to` lies on
/// the source worldline.
Event1D backward_emission(const WorldlineImage& source, const Event1D& to);

/// Tick-event sequences for a second machine B such that a two-way channel
/// with A has echo count delta on both sides. B's tick k sits at the
/// intersection of the forward cone of A's tick k with the backward cone of
/// A's tick k+delta; the right/left fields are the two mirror solutions.
struct TwoMachineSolutions {
  std::vector<Event1D> right;
  std::vector<Event1D> left;
  std::int64_t delta = 0;
};

/// Solves the two-machine placement for A's clocked tick events (reading =
/// index). Requires delta >= 1 and at least delta + 1 timelike-ordered
/// events (ConfigError).
TwoMachineSolutions solve_two_machine(const std::vector<Event1D>& a_events,
                                      std::int64_t delta);

/// Inputs for a lacing: the two worldline images, the anchor event a0 on A
/// (chain 0), the echo count n, and the n - 1 interior A-events strictly
/// between a0 and the lacing's first return to A.
struct LacingSpec {
  WorldlineImage image_a;
  WorldlineImage image_b;
  Event1D anchor;
  std::int64_t n = 1;
  std::vector<Event1D> interior;
};

/// Clockings produced by a lacing: piecewise-linear maps from readings to
/// coordinate time. A's tick i + k*n is the k-th chain event seeded at the
/// anchor (i = 0) or at interior event i; B's tick ell sits at the bounce of
/// A's tick ell, so the repeating channels are AB: (ell.0, ell.0) and
/// BA: (ell.0, (ell+n).0), giving echo count n on both sides with null
/// phases. Chains extend only while events stay inside the listed images.
struct LacingClockings {
  adjustments::ClockAdjustment clock_a;
  adjustments::ClockAdjustment clock_b;
  std::int64_t n = 1;
};

/// Builds the lacing clockings. Raises ConfigError for invalid specs
/// (off-image anchor/interior events, misordered interior events) and
/// GeometryError when the images intersect or are too short to lace.
LacingClockings build_lacing_clockings(const LacingSpec& spec);

/// The two repeating channels generated by a lacing with echo count n:
/// AB pairs (ell.0, ell.0) and BA pairs (ell.0, (ell+n).0).
channels::RepeatingChannel lacing_channel_ab(std::int64_t n);
channels::RepeatingChannel lacing_channel_ba(std::int64_t n);

/// One (send reading, receive reading) pair of a regenerated channel.
struct ReadingPair {
  double send = 0.0;
  double receive = 0.0;
};

/// Regenerates a one-way channel geometrically: for each integer sender
/// reading in [send_lo, send_hi], emits from the sender's tick event and
/// reads the receiver's clock at the reception event.
std::vector<ReadingPair> regenerate_channel(
    const adjustments::ClockAdjustment& clock_send,
    const WorldlineImage& image_send,
    const adjustments::ClockAdjustment& clock_recv,
    const WorldlineImage& image_recv, std::int64_t send_lo,
    std::int64_t send_hi);

/// A paired adjustment (f_A, f_B) acting on the two laced clockings: the
/// adjusted clocking of A is clock_a o f_a, i.e. the new tick zeta sits at
/// the event whose old reading is f_a(zeta).
///
/// The windows bound the new readings (per machine) on which the adjustment
/// is backed by lacing evidence; outside them the maps are linear-extension
/// convention only and verification does not consult them. The default
/// (unbounded) windows claim validity wherever the geometry reaches.
struct AdjustmentPair {
  adjustments::ClockAdjustment f_a;
  adjustments::ClockAdjustment f_b;
  double window_a_lo = -std::numeric_limits<double>::infinity();
  double window_a_hi = std::numeric_limits<double>::infinity();
  double window_b_lo = -std::numeric_limits<double>::infinity();
  double window_b_hi = std::numeric_limits<double>::infinity();
};

/// Composes two members pointwise (outer after inner) and intersects their
/// evidence windows: the composite is backed where the inner pair is backed
/// and lands inside the outer pair's windows.
AdjustmentPair compose_pairs(const AdjustmentPair& outer,
                             const AdjustmentPair& inner);

/// Constructs a member of the invariance subgroup K(A,B) for the laced
/// channel pair. choice_f0 is the old A-reading assigned to the new tick 0
/// and choice_interior the old A-readings of the new interior ticks
/// 1..n-1. The choices must be strictly increasing and the last one must
/// precede the re-adjusted first echo (the return reading of the chain
/// seeded at choice_f0); violations raise InvalidChoiceError. f_B is
/// induced so that each lacing maps to another lacing.
AdjustmentPair construct_k_pair(const LacingSpec& spec, double choice_f0,
                                std::span<const double> choice_interior);

/// True iff the channel pair regenerated under the adjusted clockings equals
/// the declared repeating channels (readings compared to 1e-9 cycles) over
/// the laced window. Raises GeometryError when the adjusted window leaves
/// fewer than three pairs to compare.
bool verify_invariance(const AdjustmentPair& pair,
                       const channels::RepeatingChannel& ab,
                       const channels::RepeatingChannel& ba,
                       const LacingSpec& spec);

}  // namespace chronolace::lacing

#endif  // CHRONOLACE_LACING_HPP_
