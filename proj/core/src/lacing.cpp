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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "chronolace/constants.hpp"
#include "chronolace/errors.hpp"

namespace chronolace::lacing {
namespace {

constexpr double kC = kSpeedOfLight;
/// Acceptable reading error (in cycles) when comparing regenerated channel
/// pairs against their declared form.
constexpr double kInvarianceTol = 1e-9;

struct Segment {
  double ta = 0.0;     ///< reference time on the segment
  double xa = 0.0;     ///< position at the reference time
  double v = 0.0;      ///< slope dx/dt, |v| < c
  double t_lo = 0.0;   ///< segment time range (inclusive)
  double t_hi = 0.0;
};

/// The image's linear pieces in time order, with the end segments extended
/// to infinity.
std::vector<Segment> segments_of(const WorldlineImage& image) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Segment> out;
  out.reserve(image.size() + 1);
  const auto slope = [&](std::size_t i) {
    return (image[i + 1].x - image[i].x) / (image[i + 1].t - image[i].t);
  };
  out.push_back({image.front().t, image.front().x, slope(0), -inf,
                 image.front().t});
  for (std::size_t i = 0; i + 1 < image.size(); ++i) {
    out.push_back({image[i].t, image[i].x, slope(i), image[i].t,
                   image[i + 1].t});
  }
  out.push_back({image.back().t, image.back().x, slope(image.size() - 2),
                 image.back().t, inf});
  return out;
}

double segment_position(const Segment& s, double t) {
  return s.xa + s.v * (t - s.ta);
}

/// Candidate crossing times of a light ray with one segment; at most one per
/// cone arm.
void cone_candidates(const Segment& s, const Event1D& apex, bool forward,
                     std::vector<double>& out) {
  out.clear();
  // Right arm: x(t) - apex.x = +/- c (t - apex.t); left arm mirrored.
  const double t_right =
      forward ? (kC * apex.t + s.xa - s.v * s.ta - apex.x) / (kC - s.v)
              : (kC * apex.t + apex.x - s.xa + s.v * s.ta) / (kC + s.v);
  const double t_left =
      forward ? (kC * apex.t + apex.x - s.xa + s.v * s.ta) / (kC + s.v)
              : (kC * apex.t - apex.x + s.xa - s.v * s.ta) / (kC - s.v);
  for (const auto [t, is_right] : {std::pair{t_right, true},
                                   std::pair{t_left, false}}) {
    if (!(t >= s.t_lo && t <= s.t_hi)) continue;
    if (forward ? !(t > apex.t) : !(t < apex.t)) continue;
    const double x = segment_position(s, t);
    const double atol = 1e-9 * (std::abs(x) + std::abs(apex.x) + 1.0);
    if (is_right ? x >= apex.x - atol : x <= apex.x + atol) {
      out.push_back(t);
    }
  }
}

Event1D cone_crossing(const WorldlineImage& image, const Event1D& apex,
                      bool forward) {
  const auto segs = segments_of(image);
  std::vector<double> candidates;
  if (forward) {
    for (const Segment& s : segs) {
      cone_candidates(s, apex, true, candidates);
      if (!candidates.empty()) {
        const double t = *std::min_element(candidates.begin(),
                                           candidates.end());
        return {t, segment_position(s, t)};
      }
    }
  } else {
    for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
      cone_candidates(*it, apex, false, candidates);
      if (!candidates.empty()) {
        const double t = *std::max_element(candidates.begin(),
                                           candidates.end());
        return {t, segment_position(*it, t)};
      }
    }
  }
  throw GeometryError(
      "no light-cone crossing: the event lies on the target worldline");
}

/// Chain knots (reading -> event) for A's ticks and their bounces on B.
struct ChainKnots {
  std::map<std::int64_t, Event1D> a;
  std::map<std::int64_t, Event1D> b;
};

/// Builds the zigzag chains seeded at the given A-events (seed i carries
/// reading i, later returns i + k*n) and keeps events inside the listed
/// image spans.
ChainKnots build_chains(const WorldlineImage& image_a,
                        const WorldlineImage& image_b,
                        const std::vector<Event1D>& seeds, std::int64_t n) {
  ChainKnots knots;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto base = static_cast<std::int64_t>(i);
    knots.a[base] = seeds[i];
    Event1D cur = seeds[i];
    for (std::int64_t k = 1;; ++k) {
      const Event1D bounce = forward_reception(image_b, cur);
      if (bounce.t > image_b.back().t) break;
      const Event1D ret = forward_reception(image_a, bounce);
      if (ret.t > image_a.back().t) break;
      knots.a[base + k * n] = ret;
      cur = ret;
    }
    cur = seeds[i];
    for (std::int64_t k = 1;; ++k) {
      const Event1D bounce = backward_emission(image_b, cur);
      if (bounce.t < image_b.front().t) break;
      const Event1D sender = backward_emission(image_a, bounce);
      if (sender.t < image_a.front().t) break;
      knots.a[base - k * n] = sender;
      cur = sender;
    }
  }
  for (const auto& [reading, event] : knots.a) {
    const Event1D bounce = forward_reception(image_b, event);
    if (bounce.t >= image_b.front().t && bounce.t <= image_b.back().t) {
      knots.b[reading] = bounce;
    }
  }
  return knots;
}

adjustments::ClockAdjustment clocking_from_knots(
    const std::map<std::int64_t, Event1D>& knots, const std::string& who) {
  if (knots.size() < 2) {
    throw GeometryError("images too short to lace machine " + who);
  }
  std::vector<double> readings;
  std::vector<double> times;
  readings.reserve(knots.size());
  times.reserve(knots.size());
  for (const auto& [reading, event] : knots) {
    readings.push_back(static_cast<double>(reading));
    if (!times.empty() && !(event.t > times.back())) {
      throw GeometryError("lacing chains of machine " + who +
                          " are not time ordered");
    }
    times.push_back(event.t);
  }
  return adjustments::make_adjustment(std::move(readings), std::move(times));
}

void require_on_image(const WorldlineImage& image, const Event1D& event,
                      const std::string& what) {
  const double x = position_at(image, event.t);
  const double tol = 1e-9 * (std::abs(x) + std::abs(event.x) + 1.0);
  if (std::abs(x - event.x) > tol) {
    throw ConfigError(what + " does not lie on the machine's image");
  }
}

/// The images must keep a strictly one-sided separation over their common
/// time range; piecewise linearity makes checking the union of knot times
/// exact.
void require_separated(const WorldlineImage& image_a,
                       const WorldlineImage& image_b) {
  const double t0 = std::max(image_a.front().t, image_b.front().t);
  const double t1 = std::min(image_a.back().t, image_b.back().t);
  if (!(t0 < t1)) {
    throw GeometryError("images do not overlap in time");
  }
  std::vector<double> ts{t0, t1};
  for (const auto& image : {image_a, image_b}) {
    for (const Event1D& e : image) {
      if (e.t > t0 && e.t < t1) ts.push_back(e.t);
    }
  }
  int sign = 0;
  for (double t : ts) {
    const double sep = position_at(image_b, t) - position_at(image_a, t);
    const int s = sep > 0.0 ? 1 : (sep < 0.0 ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) {
      throw GeometryError("images intersect; the pair is not radar linkable");
    }
    sign = s;
  }
}

void validate_spec(const LacingSpec& spec) {
  validate_image(spec.image_a);
  validate_image(spec.image_b);
  if (spec.n < 1) {
    throw ConfigError("lacing echo count must be a positive integer");
  }
  if (std::ssize(spec.interior) != spec.n - 1) {
    throw ConfigError("lacing needs exactly n - 1 interior events");
  }
  require_separated(spec.image_a, spec.image_b);
  require_on_image(spec.image_a, spec.anchor, "anchor event");
  for (const Event1D& e : spec.interior) {
    require_on_image(spec.image_a, e, "interior event");
  }
}

/// First return to A of the chain seeded at the given A-event.
Event1D first_return(const LacingSpec& spec, const Event1D& seed) {
  return forward_reception(spec.image_a,
                           forward_reception(spec.image_b, seed));
}

std::vector<Event1D> spec_seeds(const LacingSpec& spec) {
  std::vector<Event1D> seeds{spec.anchor};
  seeds.insert(seeds.end(), spec.interior.begin(), spec.interior.end());
  return seeds;
}

double expected_receive(const channels::RepeatingChannel& channel,
                        double send) {
  const double ell = (send - static_cast<double>(channel.m)) /
                     static_cast<double>(channel.j);
  const double nearest = std::round(ell);
  if (std::abs(ell - nearest) > kInvarianceTol) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double receive = static_cast<double>(channel.n) +
                   nearest * static_cast<double>(channel.k);
  const auto it = channel.phases.find(static_cast<std::int64_t>(nearest));
  if (it != channel.phases.end()) {
    receive += it->second.arrival;
  }
  return receive;
}

/// Regenerates one direction under the adjusted clockings and compares it to
/// the declared channel. Returns the number of compared pairs, or -1 on the
/// first mismatch.
std::int64_t check_direction(const adjustments::ClockAdjustment& clock_send,
                             const WorldlineImage& image_send,
                             const adjustments::ClockAdjustment& clock_recv,
                             const WorldlineImage& image_recv,
                             const channels::RepeatingChannel& channel,
                             double window_send_lo, double window_send_hi,
                             double window_recv_lo, double window_recv_hi) {
  const double lo = std::max(clock_send.breakpoints.front(), window_send_lo);
  const double hi = std::min(clock_send.breakpoints.back(), window_send_hi);
  const auto send_lo = static_cast<std::int64_t>(std::ceil(lo));
  const auto send_hi = static_cast<std::int64_t>(std::floor(hi));
  if (send_hi < send_lo) return 0;
  const double recv_lo =
      std::max(clock_recv.breakpoints.front(), window_recv_lo);
  const double recv_hi =
      std::min(clock_recv.breakpoints.back(), window_recv_hi);
  std::int64_t compared = 0;
  for (const ReadingPair& pair :
       regenerate_channel(clock_send, image_send, clock_recv, image_recv,
                          send_lo, send_hi)) {
    // Skip pairs whose reception falls outside the receiver's laced window;
    // there the clocking is linear extension, not lacing evidence.
    if (pair.receive < recv_lo || pair.receive > recv_hi) {
      continue;
    }
    const double expected = expected_receive(channel, pair.send);
    if (!(std::abs(pair.receive - expected) <= kInvarianceTol)) {
      return -1;
    }
    ++compared;
  }
  return compared;
}

}  // namespace

void validate_image(const WorldlineImage& image) {
  if (image.size() < 2) {
    throw ConfigError("worldline image needs at least two events");
  }
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (!std::isfinite(image[i].t) || !std::isfinite(image[i].x)) {
      throw ConfigError("worldline image events must be finite");
    }
    if (i == 0) continue;
    const double dt = image[i].t - image[i - 1].t;
    if (!(dt > 0.0)) {
      throw ConfigError("worldline image must be ordered by increasing time");
    }
    if (!(std::abs(image[i].x - image[i - 1].x) < kC * dt)) {
      throw ConfigError("worldline image must be timelike");
    }
  }
}

double position_at(const WorldlineImage& image, double t) {
  for (const Segment& s : segments_of(image)) {
    if (t >= s.t_lo && t <= s.t_hi) {
      return segment_position(s, t);
    }
  }
  throw ConfigError("worldline image has no segment at the requested time");
}

Event1D forward_reception(const WorldlineImage& target, const Event1D& from) {
  return cone_crossing(target, from, /*forward=*/true);
}

Event1D backward_emission(const WorldlineImage& source, const Event1D& to) {
  return cone_crossing(source, to, /*forward=*/false);
}

TwoMachineSolutions solve_two_machine(const std::vector<Event1D>& a_events,
                                      std::int64_t delta) {
  if (delta < 1) {
    throw ConfigError("two-machine echo count must be a positive integer");
  }
  validate_image(a_events);
  if (std::ssize(a_events) < delta + 1) {
    throw ConfigError("two-machine placement needs at least delta + 1 events");
  }
  TwoMachineSolutions out;
  out.delta = delta;
  for (std::size_t m = 0; m + static_cast<std::size_t>(delta) <
                          a_events.size();
       ++m) {
    const Event1D& send = a_events[m];
    const Event1D& receive = a_events[m + static_cast<std::size_t>(delta)];
    const double mid = 0.5 * (send.t + receive.t);
    const double skew = (receive.x - send.x) / (2.0 * kC);
    const double t_right = mid + skew;
    const double t_left = mid - skew;
    out.right.push_back({t_right, send.x + kC * (t_right - send.t)});
    out.left.push_back({t_left, send.x - kC * (t_left - send.t)});
  }
  for (const auto* side : {&out.right, &out.left}) {
    for (std::size_t i = 1; i < side->size(); ++i) {
      if (!((*side)[i].t > (*side)[i - 1].t)) {
        throw GeometryError("two-machine solution is not time ordered");
      }
    }
  }
  return out;
}

LacingClockings build_lacing_clockings(const LacingSpec& spec) {
  validate_spec(spec);
  const Event1D ret = first_return(spec, spec.anchor);
  double prev = spec.anchor.t;
  for (const Event1D& e : spec.interior) {
    if (!(e.t > prev && e.t < ret.t)) {
      throw ConfigError(
          "interior events must be strictly between the anchor and the "
          "lacing's first return");
    }
    prev = e.t;
  }
  const ChainKnots knots =
      build_chains(spec.image_a, spec.image_b, spec_seeds(spec), spec.n);
  return LacingClockings{clocking_from_knots(knots.a, "A"),
                         clocking_from_knots(knots.b, "B"), spec.n};
}

channels::RepeatingChannel lacing_channel_ab(std::int64_t n) {
  (void)n;  // The AB offset is zero regardless of the echo count.
  channels::RepeatingChannel channel;
  channel.from = "A";
  channel.to = "B";
  channel.m = 0;
  channel.n = 0;
  return channel;
}

channels::RepeatingChannel lacing_channel_ba(std::int64_t n) {
  channels::RepeatingChannel channel;
  channel.from = "B";
  channel.to = "A";
  channel.m = 0;
  channel.n = n;
  return channel;
}

std::vector<ReadingPair> regenerate_channel(
    const adjustments::ClockAdjustment& clock_send,
    const WorldlineImage& image_send,
    const adjustments::ClockAdjustment& clock_recv,
    const WorldlineImage& image_recv, std::int64_t send_lo,
    std::int64_t send_hi) {
  const adjustments::ClockAdjustment recv_inverse =
      adjustments::invert(clock_recv);
  std::vector<ReadingPair> pairs;
  for (std::int64_t ell = send_lo; ell <= send_hi; ++ell) {
    const double t = adjustments::apply(clock_send,
                                        static_cast<double>(ell));
    const Event1D tick{t, position_at(image_send, t)};
    const Event1D reception = forward_reception(image_recv, tick);
    pairs.push_back({static_cast<double>(ell),
                     adjustments::apply(recv_inverse, reception.t)});
  }
  return pairs;
}

AdjustmentPair construct_k_pair(const LacingSpec& spec, double choice_f0,
                                std::span<const double> choice_interior) {
  const LacingClockings base = build_lacing_clockings(spec);
  if (std::ssize(choice_interior) != spec.n - 1) {
    throw ConfigError("construct_k_pair needs exactly n - 1 interior choices");
  }
  std::vector<double> choices{choice_f0};
  choices.insert(choices.end(), choice_interior.begin(),
                 choice_interior.end());
  for (std::size_t i = 1; i < choices.size(); ++i) {
    if (!(choices[i] > choices[i - 1])) {
      throw InvalidChoiceError(
          "adjustment choices must be strictly increasing");
    }
  }
  if (choices.front() < base.clock_a.breakpoints.front() ||
      choices.back() > base.clock_a.breakpoints.back()) {
    throw InvalidChoiceError("adjustment choice outside the laced window");
  }

  std::vector<Event1D> seeds;
  seeds.reserve(choices.size());
  for (double zeta : choices) {
    const double t = adjustments::apply(base.clock_a, zeta);
    seeds.push_back({t, position_at(spec.image_a, t)});
  }
  const Event1D echo = first_return(spec, seeds.front());
  const double rho =
      adjustments::apply(adjustments::invert(base.clock_a), echo.t);
  if (!(choices.back() < rho)) {
    throw InvalidChoiceError(
        "the last choice must precede the re-adjusted first echo");
  }

  const ChainKnots knots =
      build_chains(spec.image_a, spec.image_b, seeds, spec.n);
  adjustments::ClockAdjustment new_clock_a;
  adjustments::ClockAdjustment new_clock_b;
  try {
    new_clock_a = clocking_from_knots(knots.a, "A");
    new_clock_b = clocking_from_knots(knots.b, "B");
  } catch (const GeometryError&) {
    throw InvalidChoiceError("choices leave too little laced window");
  }
  // The new chains bound the evidence windows: outside the re-laced knot
  // ranges the composed maps are linear extension, not lacing evidence.
  return AdjustmentPair{
      adjustments::compose(adjustments::invert(base.clock_a), new_clock_a),
      adjustments::compose(adjustments::invert(base.clock_b), new_clock_b),
      new_clock_a.breakpoints.front(), new_clock_a.breakpoints.back(),
      new_clock_b.breakpoints.front(), new_clock_b.breakpoints.back()};
}

AdjustmentPair compose_pairs(const AdjustmentPair& outer,
                             const AdjustmentPair& inner) {
  // Pull each finite outer bound back through the inner map; infinite
  // bounds stay infinite.
  const auto pull = [](const adjustments::ClockAdjustment& f, double bound) {
    if (std::isinf(bound)) return bound;
    return adjustments::apply(adjustments::invert(f), bound);
  };
  return AdjustmentPair{
      adjustments::compose(outer.f_a, inner.f_a),
      adjustments::compose(outer.f_b, inner.f_b),
      std::max(inner.window_a_lo, pull(inner.f_a, outer.window_a_lo)),
      std::min(inner.window_a_hi, pull(inner.f_a, outer.window_a_hi)),
      std::max(inner.window_b_lo, pull(inner.f_b, outer.window_b_lo)),
      std::min(inner.window_b_hi, pull(inner.f_b, outer.window_b_hi))};
}

bool verify_invariance(const AdjustmentPair& pair,
                       const channels::RepeatingChannel& ab,
                       const channels::RepeatingChannel& ba,
                       const LacingSpec& spec) {
  const LacingClockings base = build_lacing_clockings(spec);
  const adjustments::ClockAdjustment adj_a =
      adjustments::compose(base.clock_a, pair.f_a);
  const adjustments::ClockAdjustment adj_b =
      adjustments::compose(base.clock_b, pair.f_b);
  const std::int64_t ab_pairs = check_direction(
      adj_a, spec.image_a, adj_b, spec.image_b, ab, pair.window_a_lo,
      pair.window_a_hi, pair.window_b_lo, pair.window_b_hi);
  if (ab_pairs < 0) return false;
  const std::int64_t ba_pairs = check_direction(
      adj_b, spec.image_b, adj_a, spec.image_a, ba, pair.window_b_lo,
      pair.window_b_hi, pair.window_a_lo, pair.window_a_hi);
  if (ba_pairs < 0) return false;
  if (ab_pairs + ba_pairs < 3) {
    throw GeometryError(
        "adjusted clockings leave too few channel pairs to verify");
  }
  return true;
}

}  // namespace chronolace::lacing
