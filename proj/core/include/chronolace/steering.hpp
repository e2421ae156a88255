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

#ifndef CHRONOLACE_STEERING_HPP_
#define CHRONOLACE_STEERING_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "chronolace/errors.hpp"
#include "chronolace/geometry.hpp"
#include "chronolace/openmachine.hpp"

namespace chronolace::steering {

/// The defined cesium ground-state hyperfine frequency the synthesizer gears
/// its output to.
inline constexpr double kCesiumDefinedHz = 9192631770.0;

/// Documented drift threshold: with the default loop (delay 4, gain 0.4,
/// guard band 0.1) a rate random walk at or below this sigma produced zero
/// reception-gate violations over 10^4 cycles across 100 seeds.
inline constexpr double kZeroViolationRateSigma = 1e-3;

/// An active oscillator whose output frequency is the sum of its free-running
/// frequency, an accumulated random-walk drift, and the steering knob.
struct OscillatorModel {
  double true_frequency = kCesiumDefinedHz;  ///< Hz, free-running
  double drift_sigma = 0.0;  ///< random-walk step per cycle, Hz
  double control_knob = 0.0;  ///< Hz offset, moved by the feedback loop
  std::uint64_t seed = 0;
};

/// A Lorentzian detection-rate resonance. `center` is the intensity-shifted
/// operating resonance; `imagined_0k` is the defined frequency the output is
/// geared to, which no measurement ever observes directly.
struct ResonanceModel {
  double center = kCesiumDefinedHz;  ///< Hz
  double width = 100.0;  ///< full width at half maximum, Hz
  double peak_rate = 100.0;  ///< detections per cycle at the center
  double imagined_0k = kCesiumDefinedHz;  ///< Hz, defined resonance

  /// Cesium preset: the operating center sits `center_offset` above the
  /// defined frequency (the chosen-wave-function / intensity gap).
  static ResonanceModel cesium(double center_offset = 0.0, double width = 100.0,
                               double peak_rate = 100.0);
};

/// The operating condition feedback steers toward: a detection rate for the
/// clock loop, or a phase for the network loop.
struct AimingPoint {
  double target = 0.0;  ///< detections per cycle, or target phase
  double tolerance = 0.1;  ///< guard band eta in (0, 1)
  double gain = 0.4;  ///< overall loop gain, > 0
  double predictor_horizon = 0.0;  ///< extra prediction lead, cycles
};

/// The default steep-flank operating point: half maximum on the low flank.
AimingPoint half_maximum_aim(const ResonanceModel& res, double gain = 0.4,
                             double tolerance = 0.1);

/// Lorentzian detection rate at the given oscillator frequency.
double resonance_rate(const ResonanceModel& res, double frequency);

/// The low-flank frequency whose detection rate equals the aiming target.
/// Targets at or beyond the peak (or non-positive) have no sloped operating
/// point and throw ConfigError.
double aiming_frequency(const ResonanceModel& res, const AimingPoint& aim);

/// Slope of the rate curve at the aiming frequency, detections per Hz.
double aiming_slope(const ResonanceModel& res, const AimingPoint& aim);

/// One cycle of an atomic-clock run. `rate_deviation` is the measured
/// fractional frequency deviation inferred from the detection count;
/// `time_deviation` integrates the true fractional frequency error, in
/// cycles of the aiming frequency.
struct ClockSample {
  std::uint64_t cycle = 0;
  double frequency_error = 0.0;  ///< Hz, oscillator minus aiming frequency
  double detections = 0.0;
  double knob = 0.0;  ///< Hz, after this cycle's correction
  double rate_deviation = 0.0;  ///< measured, dimensionless
  double time_deviation = 0.0;  ///< true, cycles
  double synthesizer_output = 0.0;  ///< Hz, geared to the defined frequency
};

struct ClockTrace {
  OscillatorModel oscillator;
  ResonanceModel resonance;
  AimingPoint aim;
  bool feedback = true;
  bool deterministic_detections = false;
  double aiming_frequency = 0.0;  ///< Hz
  double slope = 0.0;  ///< detections per Hz at the aiming point
  std::vector<ClockSample> samples;
};

/// Runs the detection/steering loop: each cycle samples detections at the
/// Lorentzian rate (Poisson, or the expectation when
/// `deterministic_detections`), and with feedback on, moves the knob by
/// gain * (detections - target) / slope toward the aiming point.
ClockTrace simulate_atomic_clock(const OscillatorModel& osc,
                                 const ResonanceModel& res,
                                 const AimingPoint& aim,
                                 std::uint64_t n_cycles, bool feedback = true,
                                 bool deterministic_detections = false);

/// Retrospective correction: subtracts the integral of the measured rate
/// deviations from the time-deviation series. Returns the corrected series.
std::vector<double> retro_correct(const ClockTrace& trace);

/// Two-sample (Allan-style) deviation of a time-deviation series at an
/// averaging window of `tau_samples` samples. Needs at least 2*tau+1 points.
double allan_deviation(std::span<const double> series,
                       std::size_t tau_samples);

enum class Predictor { kNone, kLinear };

/// Disturbances acting on the steered machine: a rate random walk
/// (sigma per cycle), a position random walk (cycles of transport phase per
/// cycle), and a deterministic linear rate drift (cycles per cycle^2).
struct NetworkDrift {
  double rate_sigma = 0.0;
  double position_sigma = 0.0;
  double rate_slope = 0.0;
};

/// One cycle of a network-steering run. Phases follow the reading
/// convention; `delta_a` is the deviation of the reference-side reception
/// phase from the aiming phase (the quantity steering drives to zero) and
/// `delta_b` mirrors it at the steered machine.
struct NetworkSample {
  std::uint64_t cycle = 0;
  double delta_a = 0.0;
  double delta_b = 0.0;
  double correction = 0.0;  ///< rate correction applied this cycle
  double rate_error = 0.0;  ///< true rate error of the steered clock
  double offset = 0.0;  ///< true (unfolded) time offset, cycles
  bool violation_a = false;  ///< reception at the reference outside the gate
  bool violation_b = false;  ///< reception at the steered machine outside
};

struct NetworkTrace {
  std::string reference;
  std::string steered;
  double gate = 0.45;  ///< (1 - tolerance) / 2
  double phase_target = 0.0;
  std::uint64_t delay = 1;  ///< report age floor, cycles
  Predictor predictor = Predictor::kNone;
  bool feedback = true;
  double metric_rate_offset = 0.0;  ///< curvature-induced rate offset
  std::vector<NetworkSample> samples;
  std::uint64_t violation_count = 0;
  std::optional<std::uint64_t> first_violation_cycle;
  std::optional<std::uint64_t> lost_sync_cycle;  ///< first wrap of the offset
  double rms_delta = 0.0;
  double peak_delta = 0.0;
};

/// Steers machine B toward machine A's aiming phase using A's phase reports,
/// which become usable only once they are at least `delta_bab` cycles old
/// (asserted structurally in the loop). The stations sit at the radar
/// distance implied by the echo count, so a curved metric imposes a
/// deterministic rate offset on B. Loss of sync and gate violations are
/// recorded in the trace, never thrown.
NetworkTrace simulate_network_steering(
    const machine::OpenMachine& reference, const machine::OpenMachine& steered,
    const geometry::Metric& metric, std::uint64_t delta_bab,
    const NetworkDrift& drift, const AimingPoint& aim, Predictor predictor,
    std::uint64_t n_cycles, std::uint64_t seed, bool feedback = true);

/// CSV traces with the header cycle,delta,knob,detections,violation.
std::string clock_trace_to_csv(const ClockTrace& trace);
std::string network_trace_to_csv(const NetworkTrace& trace);

/// JSON summaries carrying rms, peak, and first-violation data.
nlohmann::json clock_summary_to_json(const ClockTrace& trace);
nlohmann::json network_summary_to_json(const NetworkTrace& trace);

const char* to_string(Predictor predictor);

}  // namespace chronolace::steering

#endif  // CHRONOLACE_STEERING_HPP_
