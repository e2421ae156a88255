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

#ifndef CHRONOLACE_ARRANGEMENTS_HPP_
#define CHRONOLACE_ARRANGEMENTS_HPP_

#include <string>
#include <vector>

#include "chronolace/geometry.hpp"
#include "json.hpp"

namespace chronolace::arrangements {

/// A clock-stepped machine pinned at a spatial chart point.
struct Machine {
  std::string name;
  geometry::Vec3 position;
};

/// Echo-count / phase target for one two-way channel. `echo_count` is the
/// round-trip reading difference in cycles seen at `from`; `phase` is the
/// folded reception phase both parties should observe.
struct ChannelTarget {
  std::string from;
  std::string to;
  double echo_count = 0.0;
  double phase = 0.0;
};

/// A static constellation of machines in a weak-field chart, with one
/// anchored proper period and a list of channel targets for the solvers.
struct Arrangement {
  geometry::Metric metric;
  std::vector<Machine> machines;
  std::string anchor;                ///< machine whose proper period is pinned
  double anchor_proper_period = 0.0; ///< seconds of proper time per cycle
  std::vector<ChannelTarget> targets;
};

/// Achieved state of one two-way channel after solving. `echo_count` is the
/// achieved round-trip reading difference (2 x one-way time of flight over
/// the coordinate period); `phase` is the one-way reception offset against
/// the target leg count (folded against the nearest tick when the channel
/// carries no target). `constrained` records whether the solver enforced the
/// target or merely measured the channel.
struct ChannelReport {
  std::string from;
  std::string to;
  double echo_count = 0.0;
  double phase = 0.0;
  double target_echo_count = 0.0;
  double residual = 0.0;  ///< echo_count - target_echo_count, cycles
  bool constrained = true;
};

/// Full output of an arrangement solver: the solved arrangement, the common
/// coordinate period of the stepped clocks, per-channel achievements and
/// per-machine metric-derived proper periods (ordered as the machines).
struct SolverReport {
  Arrangement arrangement;
  double coordinate_period = 0.0;  ///< p_t, seconds
  double cycles_per_leg = 0.0;     ///< leg scale N used by the solver
  std::vector<ChannelReport> channels;
  std::vector<double> proper_periods;
  /// Ring-chord reception phase of the symmetric five-machine cluster,
  /// reported by solve_five_complete from the numeric time-of-flight
  /// pipeline and from the first-order closed form; zero elsewhere.
  double ring_phase_numeric = 0.0;
  double ring_phase_closed_form = 0.0;
};

/// Outcome of the frozen-evidence audit. `sensitivity` holds the echo-count
/// Jacobian (one row per recorded channel, one column per machine
/// coordinate); `singular_value_ratio` is sigma_min / sigma_max of that
/// matrix. The evidence is frozen when the rows are linearly dependent: a
/// self-stress then ties the recorded echo counts together, so they cannot
/// be posted independently.
struct FreezeReport {
  bool frozen = false;
  double singular_value_ratio = 0.0;
  std::vector<std::vector<double>> sensitivity;
};

/// Solves the regular four-machine arrangement: V1 at the chart origin
/// (whose clock steps exactly the anchored proper period), V2 on V1's
/// equal-echo surface along +x, V3 in the z = 0 plane on the intersection
/// ring of V1's and V2's surfaces, V4 above the plane on the triple
/// intersection. All six two-way channels achieve echo count 2N with null
/// phase; the report carries the common coordinate period.
SolverReport solve_tetrahedron(const geometry::Metric& metric, double p_tau,
                               double cycles_per_leg);

/// Adds a fifth machine V5 below the z = 0 plane with echo count 2N to V1,
/// V2 and V3, completing a bipyramid. Nine two-way channels are enforced;
/// the tenth (apex-to-apex V4-V5) channel is measured, not constrained, and
/// in a curved chart its echo count deviates from the straight flat-chart
/// expectation. The measured channel is reported with `constrained = false`
/// and its residual taken against that flat expectation.
SolverReport extend_fifth(const SolverReport& tetra);

/// Solves the symmetric five-machine cluster around a spherical mass: B1 and
/// B2 on the +-x axis with all seven B-involved channels achieving echo
/// count 4N with null phase, and an A ring of three machines in the x = 0
/// plane. The three ring chords then miss their 6N echo target by a common
/// curvature-induced reception phase, reported both from the numeric
/// time-of-flight pipeline and from the first-order closed form. B1 anchors
/// the proper period; A-ring proper periods are metric-derived.
///
/// With `enforce_period_bound` set (the default) the solver refuses
/// configurations where 27 G M N^3 p_tau^2 / (4 r^3) >= 1 by throwing
/// CurvatureTooStrongError; audits that probe the phase gate beyond that
/// bound pass false, leaving only the weak-field chart guard.
SolverReport solve_five_complete(const geometry::Metric& metric, double p_tau,
                                 double cycles_per_leg,
                                 bool enforce_period_bound = true);

/// Convenience overload taking the central mass (kg) and chart distance (m).
SolverReport solve_five_complete(double mass_kg, double distance_m,
                                 double cycles_per_leg, double p_tau,
                                 bool enforce_period_bound = true);

/// Solves the five-machine cluster forcing nine channels to null phase: the
/// seven B-involved channels plus two of the three ring chords. The tenth
/// channel (the remaining ring chord) cannot also be nulled; it is forced to
/// carry the whole curvature mismatch, three times the per-chord phase of
/// the symmetric cluster, because the echo-count evidence of the complete
/// graph is frozen. The forced channel is reported unconstrained.
SolverReport solve_five_nine_null(const geometry::Metric& metric, double p_tau,
                                  double cycles_per_leg);

/// Distributes the curvature mismatch of the five-machine cluster over the
/// last m channels of the canonical order
///   B1B2, B1A0, B1A1, B1A2, B2A0, B2A1, B2A2, A0A1, A0A2, A1A2
/// for m = 1..10: the other 10 - m channels are constrained to null phase
/// and a deterministic projected coordinate-descent optimizer minimizes the
/// maximum |phase| over the allowed set. Returns the ten achieved minima;
/// each run warm-starts from the previous optimum (the newly released
/// channel enters with null phase), so the sequence is non-increasing by
/// construction. No global optimality is claimed.
std::vector<double> distribute_phases(const geometry::Metric& metric,
                                      double p_tau, double cycles_per_leg);

/// Smallest proper period for which a machine pair separated by leg length L
/// (metres of round-trip half-path) can keep logically synchronized clocks
/// around a mass: 27 G M L^3 / (32 r^3 c^3) seconds. Zero mass gives zero.
double min_proper_period(double mass_kg, double distance_m,
                         double leg_length_m);

/// Largest logically synchronized signalling rate for a clock of the given
/// proper period carrying `bits_per_cycle` bits per cycle.
double max_bit_rate(double proper_period, double bits_per_cycle = 1.0);

/// Frozen-evidence audit of the constrained channels recorded in `report`:
/// central-difference Jacobian of their echo counts with respect to every
/// machine coordinate (the coordinate period held fixed), then the singular
/// value ratio sigma_min / sigma_max. Ratios below 1e-6 mean the rows are
/// dependent and the echo-count evidence is frozen. Throws SolverError on
/// degenerate input (fewer than two machines, no constrained channel, or a
/// vanishing Jacobian).
FreezeReport freeze_test(const SolverReport& report);

/// Same audit treating every reported channel as recorded evidence,
/// including measured-only channels: the complete-graph audit.
FreezeReport freeze_test_complete(const SolverReport& report);

/// JSON round-trip for arrangements and one-way serialization of reports.
nlohmann::json arrangement_to_json(const Arrangement& arrangement);
Arrangement arrangement_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const SolverReport& report);
nlohmann::json freeze_report_to_json(const FreezeReport& report);

/// CSV echo/phase table of a report: one row per channel.
std::string report_to_csv(const SolverReport& report);

}  // namespace chronolace::arrangements

#endif  // CHRONOLACE_ARRANGEMENTS_HPP_
