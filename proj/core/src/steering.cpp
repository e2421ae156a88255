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
#include <iomanip>
#include <random>
#include <sstream>

#include "chronolace/constants.hpp"
#include "chronolace/reading.hpp"

namespace chronolace::steering {
namespace {

// Independent engine seeds per noise source, so paired runs that differ only
// in feedback or detection statistics still see identical disturbance paths.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void require_aim(const AimingPoint& aim) {
  if (!(aim.tolerance > 0.0) || !(aim.tolerance < 1.0)) {
    throw ConfigError("aiming tolerance must lie in (0, 1)");
  }
  if (!(aim.gain > 0.0)) {
    throw ConfigError("aiming gain must be positive");
  }
}

void require_resonance(const ResonanceModel& res) {
  if (!(res.width > 0.0)) {
    throw ConfigError("resonance width must be positive");
  }
  if (!(res.peak_rate > 0.0)) {
    throw ConfigError("resonance peak rate must be positive");
  }
  if (!(res.imagined_0k > 0.0)) {
    throw ConfigError("defined resonance frequency must be positive");
  }
}

double rms_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (const double v : values) sum += v * v;
  return std::sqrt(sum / static_cast<double>(values.size()));
}

}  // namespace

ResonanceModel ResonanceModel::cesium(double center_offset, double width,
                                      double peak_rate) {
  ResonanceModel res;
  res.center = kCesiumDefinedHz + center_offset;
  res.width = width;
  res.peak_rate = peak_rate;
  res.imagined_0k = kCesiumDefinedHz;
  return res;
}

AimingPoint half_maximum_aim(const ResonanceModel& res, double gain,
                             double tolerance) {
  AimingPoint aim;
  aim.target = res.peak_rate / 2.0;
  aim.tolerance = tolerance;
  aim.gain = gain;
  return aim;
}

double resonance_rate(const ResonanceModel& res, double frequency) {
  if (!(res.width > 0.0)) {
    throw DomainError("resonance width must be positive");
  }
  const double u = 2.0 * (frequency - res.center) / res.width;
  return res.peak_rate / (1.0 + u * u);
}

double aiming_frequency(const ResonanceModel& res, const AimingPoint& aim) {
  require_resonance(res);
  if (!(aim.target > 0.0) || !(aim.target < res.peak_rate)) {
    throw ConfigError(
        "aiming detection rate must lie strictly inside the resonance flank; "
        "at or beyond the peak the rate curve has zero slope");
  }
  const double u = std::sqrt(res.peak_rate / aim.target - 1.0);
  return res.center - 0.5 * res.width * u;
}

double aiming_slope(const ResonanceModel& res, const AimingPoint& aim) {
  const double u =
      std::sqrt(res.peak_rate / aim.target - 1.0);  // validated above
  aiming_frequency(res, aim);
  return 4.0 * u * aim.target * aim.target / (res.width * res.peak_rate);
}

ClockTrace simulate_atomic_clock(const OscillatorModel& osc,
                                 const ResonanceModel& res,
                                 const AimingPoint& aim,
                                 std::uint64_t n_cycles, bool feedback,
                                 bool deterministic_detections) {
  if (!(osc.true_frequency > 0.0)) {
    throw ConfigError("oscillator frequency must be positive");
  }
  if (osc.drift_sigma < 0.0) {
    throw ConfigError("oscillator drift sigma must be non-negative");
  }
  require_aim(aim);
  ClockTrace trace;
  trace.oscillator = osc;
  trace.resonance = res;
  trace.aim = aim;
  trace.feedback = feedback;
  trace.deterministic_detections = deterministic_detections;
  trace.aiming_frequency = aiming_frequency(res, aim);
  trace.slope = aiming_slope(res, aim);
  trace.samples.reserve(n_cycles);

  std::mt19937_64 drift_rng(mix_seed(osc.seed, 1));
  std::mt19937_64 detection_rng(mix_seed(osc.seed, 2));
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  double drift = 0.0;
  double knob = osc.control_knob;
  double time_deviation = 0.0;
  for (std::uint64_t t = 0; t < n_cycles; ++t) {
    const double nu = osc.true_frequency + drift + knob;
    const double error = nu - trace.aiming_frequency;
    const double mean_rate = resonance_rate(res, nu);
    double detections = mean_rate;
    if (!deterministic_detections) {
      std::poisson_distribution<long long> poisson(mean_rate);
      detections = static_cast<double>(poisson(detection_rng));
    }
    const double measured_hz = (detections - aim.target) / trace.slope;
    if (feedback) {
      knob -= aim.gain * measured_hz;
    }
    time_deviation += error / trace.aiming_frequency;
    ClockSample sample;
    sample.cycle = t;
    sample.frequency_error = error;
    sample.detections = detections;
    sample.knob = knob;
    sample.rate_deviation = measured_hz / trace.aiming_frequency;
    sample.time_deviation = time_deviation;
    sample.synthesizer_output = nu * res.imagined_0k / trace.aiming_frequency;
    trace.samples.push_back(sample);
    if (osc.drift_sigma > 0.0) {
      drift += osc.drift_sigma * unit_normal(drift_rng);
    }
  }
  return trace;
}

std::vector<double> retro_correct(const ClockTrace& trace) {
  std::vector<double> corrected;
  corrected.reserve(trace.samples.size());
  double accumulated = 0.0;
  for (const ClockSample& sample : trace.samples) {
    accumulated += sample.rate_deviation;
    corrected.push_back(sample.time_deviation - accumulated);
  }
  return corrected;
}

double allan_deviation(std::span<const double> series,
                       std::size_t tau_samples) {
  const std::size_t n = series.size();
  if (tau_samples == 0) {
    throw DomainError("averaging window must be at least one sample");
  }
  if (n < 2 * tau_samples + 1) {
    throw DomainError("series too short for the requested averaging window");
  }
  const std::size_t m = tau_samples;
  double sum = 0.0;
  for (std::size_t i = 0; i + 2 * m < n; ++i) {
    const double d = series[i + 2 * m] - 2.0 * series[i + m] + series[i];
    sum += d * d;
  }
  const double terms = static_cast<double>(n - 2 * m);
  return std::sqrt(sum / (2.0 * static_cast<double>(m) *
                          static_cast<double>(m) * terms));
}

NetworkTrace simulate_network_steering(
    const machine::OpenMachine& reference, const machine::OpenMachine& steered,
    const geometry::Metric& metric, std::uint64_t delta_bab,
    const NetworkDrift& drift, const AimingPoint& aim, Predictor predictor,
    std::uint64_t n_cycles, std::uint64_t seed, bool feedback) {
  if (delta_bab < 1) {
    throw ConfigError("transport delay must be at least one cycle");
  }
  require_aim(aim);
  if (drift.rate_sigma < 0.0 || drift.position_sigma < 0.0) {
    throw ConfigError("drift sigmas must be non-negative");
  }

  NetworkTrace trace;
  trace.reference = reference.id;
  trace.steered = steered.id;
  trace.gate = (1.0 - aim.tolerance) / 2.0;
  trace.phase_target = aim.target;
  trace.delay = delta_bab;
  trace.predictor = predictor;
  trace.feedback = feedback;

  // The stations sit at the radar distance the echo count implies; in a
  // curved chart the steered clock then runs at a different coordinate rate.
  const double separation = 0.5 * static_cast<double>(delta_bab) *
                            steered.clock.period * kSpeedOfLight;
  const geometry::Vec3 station{0.0, separation, 0.0};
  geometry::detail::require_weak_field(metric.mu, station);
  trace.metric_rate_offset =
      std::sqrt(geometry::detail::time_factor(metric.mu, station)) - 1.0;

  std::mt19937_64 rate_rng(mix_seed(seed, 1));
  std::mt19937_64 position_rng(mix_seed(seed, 2));
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  const double delay = static_cast<double>(delta_bab);
  const double gp = 1.5 * aim.gain / delay;
  const double gi = 0.375 * aim.gain / (delay * delay);
  const std::uint64_t window = delta_bab;

  double theta = fold_phase(steered.clock.phase);
  double transport = 0.0;
  double rate_error = trace.metric_rate_offset;
  double integral = 0.0;
  std::vector<double> reports(n_cycles, 0.0);
  std::vector<double> corrections(n_cycles, 0.0);
  std::vector<double> deltas;
  deltas.reserve(n_cycles);
  trace.samples.reserve(n_cycles);

  for (std::uint64_t t = 0; t < n_cycles; ++t) {
    const double phase_a = fold_phase(theta + transport);
    const double phase_b = fold_phase(transport - theta);
    NetworkSample sample;
    sample.cycle = t;
    sample.delta_a = fold_phase(phase_a - aim.target);
    sample.delta_b = fold_phase(phase_b + aim.target);
    sample.rate_error = rate_error;
    sample.offset = theta;
    sample.violation_a = std::abs(phase_a) >= trace.gate;
    sample.violation_b = std::abs(phase_b) >= trace.gate;
    reports[t] = sample.delta_a;
    deltas.push_back(sample.delta_a);

    if (sample.violation_a || sample.violation_b) {
      if (!trace.first_violation_cycle) trace.first_violation_cycle = t;
      trace.violation_count +=
          (sample.violation_a ? 1u : 0u) + (sample.violation_b ? 1u : 0u);
    }
    if (!trace.lost_sync_cycle &&
        std::abs(theta + transport - aim.target) > 0.5) {
      trace.lost_sync_cycle = t;
    }

    double correction = 0.0;
    if (feedback && t >= delta_bab) {
      const std::uint64_t newest = t - delta_bab;
      if (t - newest < delta_bab) {
        throw ProgramError("steering loop consulted a report younger than "
                           "the transport delay");
      }
      const bool warmed = predictor == Predictor::kLinear &&
                          newest >= 2 * window;
      if (!warmed) {
        integral += reports[newest];
        correction = gp * reports[newest] + gi * integral;
      } else {
        // Two-stage linear prediction: mean rate over a report window from
        // the phase change plus the corrections B itself applied, a drift
        // estimate from two successive windows, and extrapolation of both
        // the rate and the phase to the present cycle.
        const auto window_rate = [&](std::uint64_t end) {
          const double dphase = fold_phase(reports[end] -
                                           reports[end - window]);
          double applied = 0.0;
          for (std::uint64_t s = end - window; s < end; ++s) {
            applied += corrections[s];
          }
          return (dphase + applied) / static_cast<double>(window);
        };
        const double rate_now = window_rate(newest);
        const double rate_prev = window_rate(newest - window);
        const double drift_hat =
            (rate_now - rate_prev) / static_cast<double>(window);
        const double mid =
            static_cast<double>(newest) - 0.5 * (static_cast<double>(window) + 1.0);
        const double lead = static_cast<double>(t) + aim.predictor_horizon;
        const double rate_hat = rate_now + drift_hat * (lead - mid);
        const double slope = fold_phase(reports[newest] -
                                        reports[newest - window]) /
                             static_cast<double>(window);
        const double phase_hat =
            reports[newest] + slope * (lead - static_cast<double>(newest));
        correction = rate_hat + gp * phase_hat;
      }
    }
    corrections[t] = correction;
    sample.correction = correction;
    trace.samples.push_back(sample);

    theta += rate_error - correction;
    rate_error += drift.rate_slope;
    if (drift.rate_sigma > 0.0) {
      rate_error += drift.rate_sigma * unit_normal(rate_rng);
    }
    if (drift.position_sigma > 0.0) {
      transport += drift.position_sigma * unit_normal(position_rng);
    }
  }

  trace.rms_delta = rms_of(deltas);
  for (const double d : deltas) {
    trace.peak_delta = std::max(trace.peak_delta, std::abs(d));
  }
  return trace;
}

namespace {

void csv_row(std::ostringstream& out, std::uint64_t cycle, double delta,
             double knob, double detections, bool violation) {
  out << cycle << ',' << delta << ',' << knob << ',' << detections << ','
      << (violation ? 1 : 0) << '\n';
}

}  // namespace

std::string clock_trace_to_csv(const ClockTrace& trace) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "cycle,delta,knob,detections,violation\n";
  for (const ClockSample& s : trace.samples) {
    csv_row(out, s.cycle, s.frequency_error, s.knob, s.detections, false);
  }
  return out.str();
}

std::string network_trace_to_csv(const NetworkTrace& trace) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "cycle,delta,knob,detections,violation\n";
  for (const NetworkSample& s : trace.samples) {
    csv_row(out, s.cycle, s.delta_a, s.correction, 0.0,
            s.violation_a || s.violation_b);
  }
  return out.str();
}

nlohmann::json clock_summary_to_json(const ClockTrace& trace) {
  std::vector<double> errors;
  errors.reserve(trace.samples.size());
  double peak = 0.0;
  for (const ClockSample& s : trace.samples) {
    errors.push_back(s.frequency_error);
    peak = std::max(peak, std::abs(s.frequency_error));
  }
  nlohmann::json j{
      {"kind", "clock"},
      {"cycles", trace.samples.size()},
      {"rms", rms_of(errors)},
      {"peak", peak},
      {"first_violation_cycle", nullptr},
      {"aiming_frequency", trace.aiming_frequency},
      {"slope", trace.slope},
      {"feedback", trace.feedback},
  };
  if (!trace.samples.empty()) {
    j["final_knob"] = trace.samples.back().knob;
    j["final_synthesizer_output"] = trace.samples.back().synthesizer_output;
  }
  return j;
}

nlohmann::json network_summary_to_json(const NetworkTrace& trace) {
  nlohmann::json j{
      {"kind", "network"},
      {"reference", trace.reference},
      {"steered", trace.steered},
      {"cycles", trace.samples.size()},
      {"rms", trace.rms_delta},
      {"peak", trace.peak_delta},
      {"violation_count", trace.violation_count},
      {"gate", trace.gate},
      {"delay", trace.delay},
      {"predictor", to_string(trace.predictor)},
      {"feedback", trace.feedback},
      {"metric_rate_offset", trace.metric_rate_offset},
  };
  j["first_violation_cycle"] = trace.first_violation_cycle
                                   ? nlohmann::json(*trace.first_violation_cycle)
                                   : nlohmann::json(nullptr);
  j["lost_sync_cycle"] = trace.lost_sync_cycle
                             ? nlohmann::json(*trace.lost_sync_cycle)
                             : nlohmann::json(nullptr);
  return j;
}

const char* to_string(Predictor predictor) {
  return predictor == Predictor::kLinear ? "linear" : "none";
}

}  // namespace chronolace::steering
