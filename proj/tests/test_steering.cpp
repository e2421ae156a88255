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

#include "chronolace/steering.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <doctest.h>

#include "chronolace/constants.hpp"
#include "test_helpers.hpp"

namespace {

using chronolace::ConfigError;
using chronolace::DomainError;
using chronolace::WeakFieldDomainError;
using chronolace::kSpeedOfLight;
using chronolace::geometry::Metric;
using chronolace::machine::OpenMachine;
using chronolace::machine::Program;
using chronolace::machine::make_machine;
using namespace chronolace::steering;
using chronolace_tests::rel;

OpenMachine station(const std::string& id) {
  return make_machine(id, Program{}, "_");
}

double tail_mean(const NetworkTrace& trace, std::size_t count) {
  double sum = 0.0;
  for (std::size_t i = trace.samples.size() - count; i < trace.samples.size();
       ++i) {
    sum += trace.samples[i].delta_a;
  }
  return sum / static_cast<double>(count);
}

double rms_error(const ClockTrace& trace) {
  double sum = 0.0;
  for (const ClockSample& s : trace.samples) {
    sum += s.frequency_error * s.frequency_error;
  }
  return std::sqrt(sum / static_cast<double>(trace.samples.size()));
}

}  // namespace

TEST_SUITE("steering") {

TEST_CASE("resonance curve and aiming point") {
  const ResonanceModel res = ResonanceModel::cesium();
  CHECK(res.center == kCesiumDefinedHz);
  CHECK(res.imagined_0k == kCesiumDefinedHz);
  CHECK(resonance_rate(res, res.center) == rel(res.peak_rate));
  CHECK(resonance_rate(res, res.center + res.width / 2) ==
        rel(res.peak_rate / 2));

  const AimingPoint aim = half_maximum_aim(res, 0.3);
  CHECK(aim.target == rel(res.peak_rate / 2));
  const double nu_aim = aiming_frequency(res, aim);
  CHECK(nu_aim == rel(res.center - res.width / 2));
  CHECK(resonance_rate(res, nu_aim) == rel(aim.target));
  CHECK(aiming_slope(res, aim) == rel(res.peak_rate / res.width));

  const ResonanceModel shifted = ResonanceModel::cesium(40.0);
  CHECK(shifted.center == rel(kCesiumDefinedHz + 40.0));

  SUBCASE("zero-slope aiming points are refused") {
    AimingPoint bad = aim;
    bad.target = res.peak_rate;  // at the peak
    CHECK_THROWS_AS(aiming_frequency(res, bad), ConfigError);
    bad.target = 0.0;
    CHECK_THROWS_AS(aiming_frequency(res, bad), ConfigError);
  }
  SUBCASE("invalid configuration") {
    CHECK_THROWS_AS(resonance_rate(ResonanceModel{0.0, -1.0, 1.0}, 0.0),
                    DomainError);
    OscillatorModel osc;
    AimingPoint bad = aim;
    bad.gain = 0.0;
    CHECK_THROWS_AS(simulate_atomic_clock(osc, res, bad, 10), ConfigError);
    bad = aim;
    bad.tolerance = 1.0;
    CHECK_THROWS_AS(simulate_atomic_clock(osc, res, bad, 10), ConfigError);
    OscillatorModel dead;
    dead.true_frequency = 0.0;
    CHECK_THROWS_AS(simulate_atomic_clock(dead, res, aim, 10), ConfigError);
  }
}

TEST_CASE("clock started at the aiming point holds it") {
  const ResonanceModel res = ResonanceModel::cesium();
  const AimingPoint aim = half_maximum_aim(res, 0.3);
  OscillatorModel osc;
  osc.true_frequency = aiming_frequency(res, aim);

  SUBCASE("expectation-valued detections leave everything fixed") {
    const ClockTrace trace = simulate_atomic_clock(osc, res, aim, 64, true,
                                                   /*deterministic=*/true);
    REQUIRE(trace.samples.size() == 64);
    for (const ClockSample& s : trace.samples) {
      CHECK(s.frequency_error == 0.0);
      CHECK(s.detections == rel(aim.target));
      CHECK(s.knob == 0.0);
      // The synthesizer gears the output to the defined frequency.
      CHECK(s.synthesizer_output == rel(kCesiumDefinedHz, 1e-15));
    }
  }
  SUBCASE("counting statistics fluctuate without moving the frequency") {
    const ClockTrace trace =
        simulate_atomic_clock(osc, res, aim, 200, /*feedback=*/false);
    bool varied = false;
    for (const ClockSample& s : trace.samples) {
      CHECK(s.frequency_error == 0.0);
      if (s.detections != aim.target) varied = true;
    }
    CHECK(varied);
  }
  SUBCASE("identical seeds give identical traces") {
    osc.seed = 7;
    const ClockTrace a = simulate_atomic_clock(osc, res, aim, 100);
    const ClockTrace b = simulate_atomic_clock(osc, res, aim, 100);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      CHECK(a.samples[i].detections == b.samples[i].detections);
      CHECK(a.samples[i].knob == b.samples[i].knob);
    }
    osc.seed = 8;
    const ClockTrace c = simulate_atomic_clock(osc, res, aim, 100);
    bool differs = false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      if (a.samples[i].detections != c.samples[i].detections) differs = true;
    }
    CHECK(differs);
  }
}

TEST_CASE("free-running drift grows diffusively") {
  const ResonanceModel res = ResonanceModel::cesium();
  const AimingPoint aim = half_maximum_aim(res, 0.3);
  OscillatorModel osc;
  osc.true_frequency = aiming_frequency(res, aim);
  osc.drift_sigma = 1.0;

  const std::uint64_t cycles = 100;
  double sum_sq = 0.0;
  const int seeds = 300;
  for (int s = 0; s < seeds; ++s) {
    osc.seed = static_cast<std::uint64_t>(s);
    const ClockTrace trace = simulate_atomic_clock(osc, res, aim, cycles,
                                                   /*feedback=*/false,
                                                   /*deterministic=*/true);
    const double final_error = trace.samples.back().frequency_error;
    sum_sq += final_error * final_error;
  }
  // The last sample has accumulated cycles - 1 random-walk steps.
  const double expected = osc.drift_sigma * std::sqrt(cycles - 1.0);
  const double measured = std::sqrt(sum_sq / seeds);
  CHECK(measured / expected > 0.85);
  CHECK(measured / expected < 1.15);
}

TEST_CASE("feedback bounds a drifting oscillator") {
  const ResonanceModel res = ResonanceModel::cesium();
  const AimingPoint aim = half_maximum_aim(res, 0.3);
  OscillatorModel osc;
  osc.true_frequency = aiming_frequency(res, aim);
  osc.drift_sigma = 1.0;
  for (int s = 0; s < 10; ++s) {
    osc.seed = static_cast<std::uint64_t>(s);
    const ClockTrace on = simulate_atomic_clock(osc, res, aim, 1000, true);
    const ClockTrace off = simulate_atomic_clock(osc, res, aim, 1000, false);
    // The drift engine is split from the detection engine, so the paired
    // runs walk through identical drift paths.
    CHECK(rms_error(on) < rms_error(off));
  }
}

TEST_CASE("retrospective correction improves the reading series") {
  const ResonanceModel res = ResonanceModel::cesium();
  const AimingPoint aim = half_maximum_aim(res, 0.3);
  OscillatorModel osc;
  osc.true_frequency = aiming_frequency(res, aim);

  SUBCASE("a zero-deviation trace is left unchanged") {
    const ClockTrace trace =
        simulate_atomic_clock(osc, res, aim, 50, true, true);
    const std::vector<double> corrected = retro_correct(trace);
    REQUIRE(corrected.size() == 50);
    for (std::size_t i = 0; i < corrected.size(); ++i) {
      CHECK(corrected[i] == trace.samples[i].time_deviation);
      CHECK(corrected[i] == 0.0);
    }
  }
  SUBCASE("a constant offset is detrended") {
    osc.control_knob = 1.0;  // Hz, held (feedback off)
    const ClockTrace trace =
        simulate_atomic_clock(osc, res, aim, 400, false, true);
    std::vector<double> uncorrected;
    for (const ClockSample& s : trace.samples) {
      uncorrected.push_back(s.time_deviation);
    }
    const std::vector<double> corrected = retro_correct(trace);
    // The measured rate record captures the offset up to the curvature of
    // the flank, so the correction removes almost the whole ramp. (The
    // two-sample deviation cannot see this: it is blind to linear ramps.)
    CHECK(std::abs(uncorrected.back()) > 1e-8);
    CHECK(std::abs(corrected.back()) < 0.05 * std::abs(uncorrected.back()));
  }
  SUBCASE("random-walk traces improve seed by seed") {
    osc.drift_sigma = 1.0;
    for (int s = 0; s < 10; ++s) {
      osc.seed = static_cast<std::uint64_t>(s);
      const ClockTrace trace =
          simulate_atomic_clock(osc, res, aim, 400, false);
      std::vector<double> uncorrected;
      for (const ClockSample& smp : trace.samples) {
        uncorrected.push_back(smp.time_deviation);
      }
      const std::vector<double> corrected = retro_correct(trace);
      CHECK(allan_deviation(corrected, 100) <=
            allan_deviation(uncorrected, 100));
    }
  }
  SUBCASE("window validation") {
    const std::vector<double> series(10, 0.0);
    CHECK_THROWS_AS(allan_deviation(series, 0), DomainError);
    CHECK_THROWS_AS(allan_deviation(series, 5), DomainError);
    CHECK_NOTHROW(allan_deviation(series, 4));
  }
}

TEST_CASE("perfectly initialized network stays synchronized") {
  const OpenMachine a = station("A");
  const OpenMachine b = station("B");
  const AimingPoint aim;  // phase target 0, tolerance 0.1, gain 0.4
  const NetworkTrace trace = simulate_network_steering(
      a, b, Metric::flat(), 4, NetworkDrift{}, aim, Predictor::kNone, 500, 1);
  CHECK(trace.reference == "A");
  CHECK(trace.steered == "B");
  CHECK(trace.gate == rel(0.45));
  REQUIRE(trace.samples.size() == 500);
  for (const NetworkSample& s : trace.samples) {
    CHECK(s.delta_a == 0.0);
    CHECK(s.delta_b == 0.0);
    CHECK(s.correction == 0.0);
    CHECK_FALSE(s.violation_a);
    CHECK_FALSE(s.violation_b);
  }
  CHECK(trace.violation_count == 0);
  CHECK_FALSE(trace.first_violation_cycle.has_value());
  CHECK_FALSE(trace.lost_sync_cycle.has_value());
  CHECK(trace.rms_delta == 0.0);
  CHECK(trace.peak_delta == 0.0);
}

TEST_CASE("linear rate drift settles at the delay-squared steady state") {
  const OpenMachine a = station("A");
  const OpenMachine b = station("B");
  const AimingPoint aim;  // gain 0.4
  NetworkDrift drift;
  drift.rate_slope = 1e-6;

  for (const std::uint64_t delay : {std::uint64_t{2}, std::uint64_t{4}}) {
    const NetworkTrace trace =
        simulate_network_steering(a, b, Metric::flat(), delay, drift, aim,
                                  Predictor::kNone, 6000, 0);
    // Integral gain 3 g0 / (8 D^2) must ramp the correction at the drift
    // rate, so the standing deviation is 8 d D^2 / (3 g0).
    const double expected = 8.0 * drift.rate_slope *
                            static_cast<double>(delay * delay) / (3.0 * 0.4);
    CHECK(tail_mean(trace, 500) == rel(expected, 0.02));

    const NetworkTrace predicted =
        simulate_network_steering(a, b, Metric::flat(), delay, drift, aim,
                                  Predictor::kLinear, 6000, 0);
    double predicted_tail = 0.0;
    for (std::size_t i = predicted.samples.size() - 500;
         i < predicted.samples.size(); ++i) {
      predicted_tail += std::abs(predicted.samples[i].delta_a);
    }
    predicted_tail /= 500.0;
    CHECK(predicted_tail < 0.1 * std::abs(tail_mean(trace, 500)));
  }
}

TEST_CASE("feedback beats free running under rate noise") {
  const OpenMachine a = station("A");
  const OpenMachine b = station("B");
  const AimingPoint aim;
  NetworkDrift drift;
  drift.rate_sigma = 1e-3;

  std::vector<double> peaks_on, peaks_off;
  std::uint64_t off_violations = 0;
  for (int s = 0; s < 10; ++s) {
    const NetworkTrace on = simulate_network_steering(
        a, b, Metric::flat(), 4, drift, aim, Predictor::kNone, 2000,
        static_cast<std::uint64_t>(s));
    const NetworkTrace off = simulate_network_steering(
        a, b, Metric::flat(), 4, drift, aim, Predictor::kNone, 2000,
        static_cast<std::uint64_t>(s), /*feedback=*/false);
    peaks_on.push_back(on.peak_delta);
    peaks_off.push_back(off.peak_delta);
    off_violations += off.violation_count;
    CHECK(on.peak_delta < off.peak_delta);
    // At the documented drift threshold the steered loop never leaves the
    // reception gate.
    CHECK(on.violation_count == 0);
  }
  CHECK(off_violations > 0);
  std::sort(peaks_on.begin(), peaks_on.end());
  std::sort(peaks_off.begin(), peaks_off.end());
  CHECK(peaks_on[5] < peaks_off[5]);
}

TEST_CASE("loss of sync is recorded evidence, not failure") {
  const OpenMachine a = station("A");
  const OpenMachine b = station("B");
  const AimingPoint aim;
  NetworkDrift drift;
  drift.rate_slope = 1e-3;
  const NetworkTrace trace = simulate_network_steering(
      a, b, Metric::flat(), 4, drift, aim, Predictor::kNone, 200, 0,
      /*feedback=*/false);
  REQUIRE(trace.samples.size() == 200);
  // theta_t = d t (t-1) / 2 crosses the gate 0.45 at t = 31 and wraps past
  // one half cycle at t = 33.
  REQUIRE(trace.first_violation_cycle.has_value());
  CHECK(*trace.first_violation_cycle == 31);
  REQUIRE(trace.lost_sync_cycle.has_value());
  CHECK(*trace.lost_sync_cycle == 33);
  CHECK(trace.violation_count >= 4);
  CHECK(trace.samples[31].violation_a);
  CHECK(trace.samples[31].violation_b);
  CHECK(trace.samples[30].violation_a == false);
}

TEST_CASE("a curved chart imposes the radar-distance rate offset") {
  const OpenMachine a = station("A");
  const OpenMachine b = station("B");
  const AimingPoint aim;
  const double separation = 2.0 * kSpeedOfLight;  // delay 4 at period 1
  const double mu = 5e-4 / (separation * separation);
  const NetworkTrace trace = simulate_network_steering(
      a, b, Metric::weak_field(mu), 4, NetworkDrift{}, aim, Predictor::kNone,
      3000, 0);
  CHECK(trace.metric_rate_offset == rel(std::sqrt(1.0 + 5e-4) - 1.0));
  // A constant rate offset is rejected by the integral term: the deviation
  // dies out and the applied correction converges to the offset.
  CHECK(std::abs(trace.samples.back().delta_a) < 1e-12);
  CHECK(trace.samples.back().correction ==
        rel(trace.metric_rate_offset, 1e-6));
  CHECK(trace.violation_count == 0);

  SUBCASE("beyond the weak-field guard the chart is refused") {
    const double strong = 1.1e-3 / (separation * separation);
    CHECK_THROWS_AS(
        simulate_network_steering(a, b, Metric::weak_field(strong), 4,
                                  NetworkDrift{}, aim, Predictor::kNone, 10,
                                  0),
        WeakFieldDomainError);
  }
  SUBCASE("flat default carries no offset") {
    const NetworkTrace flat = simulate_network_steering(
        a, b, Metric::flat(), 4, NetworkDrift{}, aim, Predictor::kNone, 10,
        0);
    CHECK(flat.metric_rate_offset == 0.0);
  }
}

TEST_CASE("network configuration and determinism") {
  const OpenMachine a = station("A");
  const OpenMachine b = station("B");
  const AimingPoint aim;
  CHECK_THROWS_AS(
      simulate_network_steering(a, b, Metric::flat(), 0, NetworkDrift{}, aim,
                                Predictor::kNone, 10, 0),
      ConfigError);
  NetworkDrift bad;
  bad.rate_sigma = -1.0;
  CHECK_THROWS_AS(
      simulate_network_steering(a, b, Metric::flat(), 2, bad, aim,
                                Predictor::kNone, 10, 0),
      ConfigError);

  NetworkDrift drift;
  drift.rate_sigma = 1e-3;
  drift.position_sigma = 1e-4;
  const NetworkTrace first = simulate_network_steering(
      a, b, Metric::flat(), 4, drift, aim, Predictor::kNone, 500, 42);
  const NetworkTrace second = simulate_network_steering(
      a, b, Metric::flat(), 4, drift, aim, Predictor::kNone, 500, 42);
  REQUIRE(first.samples.size() == second.samples.size());
  for (std::size_t i = 0; i < first.samples.size(); ++i) {
    CHECK(first.samples[i].delta_a == second.samples[i].delta_a);
    CHECK(first.samples[i].correction == second.samples[i].correction);
  }
  const NetworkTrace third = simulate_network_steering(
      a, b, Metric::flat(), 4, drift, aim, Predictor::kNone, 500, 43);
  bool differs = false;
  for (std::size_t i = 0; i < first.samples.size(); ++i) {
    if (first.samples[i].delta_a != third.samples[i].delta_a) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("traces serialize to CSV and JSON summaries") {
  const ResonanceModel res = ResonanceModel::cesium();
  const AimingPoint aim = half_maximum_aim(res, 0.3);
  OscillatorModel osc;
  osc.true_frequency = aiming_frequency(res, aim);
  const ClockTrace clock = simulate_atomic_clock(osc, res, aim, 5, true, true);
  const std::string clock_csv = clock_trace_to_csv(clock);
  CHECK(clock_csv.rfind("cycle,delta,knob,detections,violation\n", 0) == 0);
  CHECK(std::count(clock_csv.begin(), clock_csv.end(), '\n') == 6);

  const nlohmann::json cj = clock_summary_to_json(clock);
  CHECK(cj.at("kind") == "clock");
  CHECK(cj.at("rms").get<double>() == 0.0);
  CHECK(cj.at("peak").get<double>() == 0.0);
  CHECK(cj.at("first_violation_cycle").is_null());
  CHECK(cj.at("final_synthesizer_output").get<double>() ==
        rel(kCesiumDefinedHz, 1e-15));

  const OpenMachine a = station("A");
  const OpenMachine b = station("B");
  NetworkDrift drift;
  drift.rate_slope = 1e-3;
  const NetworkTrace net = simulate_network_steering(
      a, b, Metric::flat(), 4, drift, AimingPoint{}, Predictor::kNone, 60, 0,
      false);
  const std::string net_csv = network_trace_to_csv(net);
  CHECK(net_csv.rfind("cycle,delta,knob,detections,violation\n", 0) == 0);
  CHECK(net_csv.find(",1\n") != std::string::npos);  // a violating cycle

  const nlohmann::json nj = network_summary_to_json(net);
  CHECK(nj.at("kind") == "network");
  CHECK(nj.at("first_violation_cycle").get<std::uint64_t>() == 31);
  CHECK(nj.at("lost_sync_cycle").get<std::uint64_t>() == 33);
  CHECK(nj.at("predictor") == "none");
  CHECK(nj.at("peak").get<double>() > 0.4);
  CHECK(std::string(to_string(Predictor::kLinear)) == "linear");
}

}  // TEST_SUITE
