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
//
// chronolace: scenario runner for the clock-lacing library. One subcommand
// per scenario family; reports go to standard output as JSON (DOT for the
// graph exporter), errors to standard error as JSON, artifacts to an output
// directory when one is configured. Exit codes: 0 success, 2 configuration
// error, 3 solver/numerical error, 4 audit or verification violations.

#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "chronolace/adjustments.hpp"
#include "chronolace/arrangements.hpp"
#include "chronolace/channels.hpp"
#include "chronolace/constants.hpp"
#include "chronolace/errors.hpp"
#include "chronolace/geometry.hpp"
#include "chronolace/lacing.hpp"
#include "chronolace/openmachine.hpp"
#include "chronolace/quantumevidence.hpp"
#include "chronolace/steering.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
using namespace chronolace;

// ---------------------------------------------------------------------------
// Error reporting and exit-code taxonomy.

int classify(const Error& error) {
  static const std::set<std::string> config_kinds{
      "ConfigError",         "DomainError",
      "InvalidChoiceError",  "UnsupportedError",
      "ModelValidationError", "InconsistentEvidenceError",
      "ProgramError",        "PhaseDisciplineError"};
  return config_kinds.count(error.kind()) != 0 ? 2 : 3;
}

void print_error(const std::string& kind, const std::string& message) {
  const json doc{{"schema_version", kSchemaVersion},
                 {"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << doc.dump() << "\n";
}

// ---------------------------------------------------------------------------
// Shared scenario state: config document, seed, output directory, sweep.

struct Shared {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_flag;
  int sweep = 1;

  CLI::Option* config_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* sweep_opt = nullptr;

  std::vector<std::string> argv;

  json config;                 // loaded --config document, object
  double tolerance_eta = -1.0; // tolerances.eta when configured
};

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open '" + path + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
}

std::string load_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Loads the shared header of a scenario config and rejects unknown keys.
/// `allowed` lists the subcommand's own keys; the header keys seed,
/// output_dir and tolerances are always accepted.
void begin_scenario(Shared& shared, const std::set<std::string>& allowed) {
  shared.config = json::object();
  if (!shared.config_path.empty()) {
    shared.config = load_json_file(shared.config_path);
    if (!shared.config.is_object()) {
      throw ConfigError("scenario config must be a JSON object");
    }
  }
  for (const auto& [key, value] : shared.config.items()) {
    if (key == "seed" || key == "output_dir" || key == "tolerances" ||
        allowed.count(key) != 0) {
      continue;
    }
    throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    if (shared.config.contains("seed") && shared.seed_opt->count() == 0) {
      shared.seed = shared.config.at("seed").get<std::uint64_t>();
    }
    if (shared.config.contains("output_dir") && shared.out_opt->count() == 0) {
      shared.out_flag = shared.config.at("output_dir").get<std::string>();
    }
    if (shared.config.contains("tolerances")) {
      const json& tol = shared.config.at("tolerances");
      if (!tol.is_object()) {
        throw ConfigError("tolerances must be a JSON object");
      }
      for (const auto& [key, value] : tol.items()) {
        if (key != "eta") {
          throw ConfigError("unknown tolerance key '" + key + "'");
        }
        shared.tolerance_eta = value.get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

/// Copies a config value into `var` unless the mirroring flag was given on
/// the command line (flags win over the config file).
template <typename T>
void take(const Shared& shared, const char* key, const CLI::Option* opt,
          T& var) {
  if (opt != nullptr && opt->count() > 0) return;
  if (!shared.config.contains(key)) return;
  try {
    var = shared.config.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad config value for '" + std::string(key) +
                      "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Artifact emission. Every emitted file declares the schema version;
// timestamps are confined to run_metadata.json.

class ArtifactSink {
 public:
  explicit ArtifactSink(const std::string& dir) {
    if (dir.empty()) return;
    dir_ = std::filesystem::path(dir);
    std::error_code ec;
    std::filesystem::create_directories(*dir_, ec);
    if (ec) {
      throw ConfigError("cannot create output directory '" + dir +
                        "': " + ec.message());
    }
  }

  bool enabled() const { return dir_.has_value(); }

  void json_file(const std::string& name, json doc) {
    if (!dir_) return;
    if (!doc.contains("schema_version")) {
      doc["schema_version"] = kSchemaVersion;
    }
    write(name, doc.dump(2) + "\n");
  }

  /// Text artifact with a schema-version comment line, e.g. "#" for CSV and
  /// "//" for DOT.
  void text_file(const std::string& name, const std::string& comment,
                 const std::string& body) {
    if (!dir_) return;
    write(name,
          comment + " chronolace-schema " + std::string(kSchemaVersion) +
              "\n" + body);
  }

  void metadata(const std::string& command, const Shared& shared) {
    if (!dir_) return;
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream stamp;
    stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    json doc{{"schema_version", kSchemaVersion},
             {"command", command},
             {"invocation", shared.argv},
             {"seed", shared.seed},
             {"generated_at_utc", stamp.str()},
             {"files", files_}};
    write("run_metadata.json", doc.dump(2) + "\n");
  }

 private:
  void write(const std::string& name, const std::string& content) {
    const std::filesystem::path path = *dir_ / name;
    std::ofstream out(path);
    if (!out) {
      throw ConfigError("cannot write '" + path.string() + "'");
    }
    out << content;
    files_.push_back(name);
  }

  std::optional<std::filesystem::path> dir_;
  std::vector<std::string> files_;
};

std::string resolve_out_dir(const Shared& shared) {
  if (!shared.out_flag.empty()) return shared.out_flag;
  if (const char* env = std::getenv("CHRONOLACE_OUT_DIR")) return env;
  return {};
}

void emit_report(const std::string& command, const Shared& shared,
                 json report, const std::string& artifact_name,
                 const std::vector<std::pair<std::string, std::string>>&
                     csv_artifacts = {}) {
  report["schema_version"] = kSchemaVersion;
  report["command"] = command;
  std::cout << report.dump(2) << "\n";
  ArtifactSink sink(resolve_out_dir(shared));
  if (sink.enabled()) {
    sink.json_file(artifact_name, report);
    for (const auto& [name, body] : csv_artifacts) {
      sink.text_file(name, "#", body);
    }
    sink.metadata(command, shared);
  }
}

// ---------------------------------------------------------------------------
// Metric selection shared by the solver-style subcommands.

struct MetricFlags {
  double mu = 0.0;
  double mass = 0.0;
  double radius = 0.0;
  CLI::Option* mu_opt = nullptr;
  CLI::Option* mass_opt = nullptr;
  CLI::Option* radius_opt = nullptr;

  void add_to(CLI::App* sub) {
    mu_opt = sub->add_option(
        "--mu", mu, "Curvature parameter G M / (c^2 r^3), 1/m^2 (default 0)");
    mass_opt =
        sub->add_option("--mass", mass, "Central mass, kg (with --radius)");
    radius_opt =
        sub->add_option("--radius", radius, "Chart distance from the mass, m");
    mass_opt->needs(radius_opt);
    radius_opt->needs(mass_opt);
    mu_opt->excludes(mass_opt);
  }

  geometry::Metric resolve(const Shared& shared) {
    take(shared, "mu", mu_opt, mu);
    take(shared, "mass", mass_opt, mass);
    take(shared, "radius", radius_opt, radius);
    const bool have_mass = mass_opt->count() > 0 || shared.config.contains("mass");
    if (have_mass) {
      return geometry::Metric::around_mass(mass, radius);
    }
    return geometry::Metric::weak_field(mu);
  }
};

json event_to_json(const lacing::Event1D& event) {
  return json{{"t", event.t}, {"x", event.x}};
}

std::vector<double> echo_counts_of(const arrangements::SolverReport& report) {
  std::vector<double> echoes;
  echoes.reserve(report.channels.size());
  for (const auto& channel : report.channels) {
    echoes.push_back(channel.echo_count);
  }
  return echoes;
}

// ---------------------------------------------------------------------------
// Subcommand runners.

void run_bitrate(Shared& shared, double mass, double radius, double leg,
                 double bits_per_cycle) {
  const double period = arrangements::min_proper_period(mass, radius, leg);
  json report{{"mass_kg", mass},
              {"distance_m", radius},
              {"leg_length_m", leg},
              {"bits_per_cycle", bits_per_cycle},
              {"min_proper_period_s", period}};
  if (period > 0.0) {
    report["max_bit_rate_hz"] =
        arrangements::max_bit_rate(period, bits_per_cycle);
  } else {
    report["max_bit_rate_hz"] = nullptr;  // flat chart: no curvature bound
  }
  emit_report("bitrate", shared, std::move(report), "bitrate_report.json");
}

void run_solve_tetra(Shared& shared, const geometry::Metric& metric,
                     double p_tau, double cycles_per_leg, bool fifth) {
  arrangements::SolverReport report =
      arrangements::solve_tetrahedron(metric, p_tau, cycles_per_leg);
  if (fifth) {
    report = arrangements::extend_fifth(report);
  }
  json doc{{"report", arrangements::report_to_json(report)},
           {"echo_counts", echo_counts_of(report)}};
  emit_report(fifth ? "solve-tetra-fifth" : "solve-tetra", shared,
              std::move(doc), "solve_tetra_report.json",
              {{"solve_tetra_channels.csv",
                arrangements::report_to_csv(report)}});
}

void run_solve_five(Shared& shared, const geometry::Metric& metric,
                    double p_tau, double cycles_per_leg, bool nine_null,
                    bool no_period_bound) {
  const arrangements::SolverReport report =
      nine_null ? arrangements::solve_five_nine_null(metric, p_tau,
                                                     cycles_per_leg)
                : arrangements::solve_five_complete(metric, p_tau,
                                                    cycles_per_leg,
                                                    !no_period_bound);
  json doc{{"report", arrangements::report_to_json(report)},
           {"echo_counts", echo_counts_of(report)},
           {"ring_phase_numeric", report.ring_phase_numeric},
           {"ring_phase_closed_form", report.ring_phase_closed_form}};
  emit_report(nine_null ? "solve-five-nine-null" : "solve-five", shared,
              std::move(doc), "solve_five_report.json",
              {{"solve_five_channels.csv",
                arrangements::report_to_csv(report)}});
}

void run_solve_two(Shared& shared, std::int64_t delta, std::int64_t ticks,
                   double tick_period) {
  if (ticks < delta + 1) {
    throw ConfigError("need at least delta + 1 tick events");
  }
  std::vector<lacing::Event1D> a_events;
  a_events.reserve(static_cast<std::size_t>(ticks));
  for (std::int64_t k = 0; k < ticks; ++k) {
    a_events.push_back({static_cast<double>(k) * tick_period, 0.0});
  }
  const lacing::TwoMachineSolutions solutions =
      lacing::solve_two_machine(a_events, delta);
  json right = json::array();
  json left = json::array();
  for (const auto& event : solutions.right) right.push_back(event_to_json(event));
  for (const auto& event : solutions.left) left.push_back(event_to_json(event));
  json doc{{"delta", solutions.delta},
           {"tick_period_s", tick_period},
           {"right", std::move(right)},
           {"left", std::move(left)}};
  emit_report("solve-two", shared, std::move(doc), "solve_two_report.json");
}

int run_audit(Shared& shared, const std::string& history_path, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw ConfigError("eta must lie in (0, 1)");
  }
  const std::vector<machine::HistoryRecord> history =
      machine::history_from_csv(load_text_file(history_path));
  const double gate = (1.0 - eta) / 2.0;

  json receptions = json::array();
  std::uint64_t violations = 0;
  for (const auto& record : history) {
    if (record.event != machine::EventKind::kReceived) continue;
    const bool accepted = std::abs(record.phase_or_rate) < gate;
    violations += accepted ? 0 : 1;
    receptions.push_back(json{{"cycle", record.own_cycle},
                              {"party", record.party},
                              {"phase", record.phase_or_rate},
                              {"accepted", accepted}});
  }

  json echoes = json::array();
  for (const auto& record : history) {
    if (record.event != machine::EventKind::kSend) continue;
    try {
      echoes.push_back(json{
          {"sent_cycle", record.own_cycle},
          {"party", record.party},
          {"echo_count", channels::echo_count(history, record.own_cycle)}});
    } catch (const NoEchoError&) {
      // An open history tail: the reply has not arrived yet. Not a violation.
    }
  }

  json doc{{"history", history_path},
           {"eta", eta},
           {"gate", gate},
           {"receptions", std::move(receptions)},
           {"echoes", std::move(echoes)},
           {"violation_count", violations},
           {"accepted", violations == 0}};
  emit_report("audit", shared, std::move(doc), "audit_report.json");
  return violations == 0 ? 0 : 4;
}

int run_kab(Shared& shared, std::int64_t n, double f0,
            std::vector<double> interior) {
  if (n < 1) {
    throw ConfigError("echo count n must be at least 1");
  }
  // Canonical laced pair: both machines static, 1.5 light-seconds apart, so
  // one bounce returns after 3 s and the echo-n lacing seeds interior events
  // at multiples of 3/n s.
  const double separation_s = 1.5;
  const double round_trip = 2.0 * separation_s;
  lacing::LacingSpec spec;
  spec.image_a = {{-40.0, 0.0}, {80.0, 0.0}};
  spec.image_b = {{-40.0, separation_s * kSpeedOfLight},
                  {80.0, separation_s * kSpeedOfLight}};
  spec.anchor = {0.0, 0.0};
  spec.n = n;
  for (std::int64_t k = 1; k < n; ++k) {
    spec.interior.push_back(
        {static_cast<double>(k) * round_trip / static_cast<double>(n), 0.0});
  }
  if (interior.empty()) {
    for (std::int64_t k = 1; k < n; ++k) {
      interior.push_back(f0 + static_cast<double>(k));
    }
  }

  const lacing::AdjustmentPair pair =
      lacing::construct_k_pair(spec, f0, interior);
  const bool invariant =
      lacing::verify_invariance(pair, lacing::lacing_channel_ab(n),
                                lacing::lacing_channel_ba(n), spec);

  json doc{{"n", n},
           {"choice_f0", f0},
           {"choice_interior", interior},
           {"f_a", adjustments::adjustment_to_json(pair.f_a)},
           {"f_b", adjustments::adjustment_to_json(pair.f_b)},
           {"window_a", {pair.window_a_lo, pair.window_a_hi}},
           {"window_b", {pair.window_b_lo, pair.window_b_hi}},
           {"invariant", invariant}};
  emit_report("kab", shared, std::move(doc), "kab_report.json");
  return invariant ? 0 : 4;
}

void run_cluster_phi(Shared& shared, const geometry::Metric& metric,
                     double p_tau, double cycles_per_leg) {
  const arrangements::SolverReport report =
      arrangements::solve_five_complete(metric, p_tau, cycles_per_leg);
  const double numeric = report.ring_phase_numeric;
  const double closed = report.ring_phase_closed_form;
  json doc{{"mu", metric.mu},
           {"p_tau_s", p_tau},
           {"cycles_per_leg", cycles_per_leg},
           {"coordinate_period_s", report.coordinate_period},
           {"ring_phase_numeric", numeric},
           {"ring_phase_closed_form", closed},
           {"difference", numeric - closed},
           {"echo_counts", echo_counts_of(report)}};
  emit_report("cluster-phi", shared, std::move(doc),
              "cluster_phi_report.json");
}

void run_models(Shared& shared, const std::string& ppm_path, bool coin,
                int knobs) {
  quantum::PPM ppm;
  if (coin) {
    if (knobs < 1) {
      throw ConfigError("need at least one knob setting");
    }
    ppm.outcomes = {"click", "silence"};
    for (int k = 1; k <= knobs; ++k) {
      ppm.knobs.push_back("setting-" + std::to_string(k));
      ppm.table.push_back({0.5, 0.5});
    }
  } else if (!ppm_path.empty()) {
    ppm = quantum::ppm_from_json(load_json_file(ppm_path));
  } else {
    throw ConfigError("give --ppm FILE or --coin");
  }

  const quantum::DistinctModels models =
      quantum::construct_distinct_models(ppm);
  const quantum::PPM check1 = quantum::evaluate_ppm(models.model1);
  const quantum::PPM check2 = quantum::evaluate_ppm(models.model2);
  double reproduction_error = 0.0;
  for (std::size_t k = 0; k < ppm.table.size(); ++k) {
    for (std::size_t w = 0; w < ppm.table[k].size(); ++w) {
      reproduction_error = std::max(
          reproduction_error, std::abs(check1.table[k][w] - ppm.table[k][w]));
      reproduction_error = std::max(
          reproduction_error, std::abs(check2.table[k][w] - ppm.table[k][w]));
    }
  }

  json doc{{"ppm", quantum::ppm_to_json(ppm)},
           {"model1", quantum::model_to_json(models.model1)},
           {"model2", quantum::model_to_json(models.model2)},
           {"extension_knob", models.extension_knob},
           {"extended_deviation", models.extended_deviation},
           {"reproduction_error", reproduction_error}};
  emit_report("models", shared, std::move(doc), "models_report.json");
}

void run_graph(Shared& shared, const std::vector<std::string>& entries) {
  std::map<std::string, std::vector<machine::HistoryRecord>> histories;
  for (const std::string& entry : entries) {
    const auto split = entry.find('=');
    std::string name;
    std::string path;
    if (split == std::string::npos) {
      path = entry;
      name = std::filesystem::path(entry).stem().string();
    } else {
      name = entry.substr(0, split);
      path = entry.substr(split + 1);
    }
    if (name.empty()) {
      throw ConfigError("history entry '" + entry + "' has an empty name");
    }
    histories[name] = machine::history_from_csv(load_text_file(path));
  }
  const channels::OccurrenceGraph graph = channels::occurrence_graph(histories);
  const std::string dot = channels::to_dot(graph);
  std::cout << dot;
  ArtifactSink sink(resolve_out_dir(shared));
  if (sink.enabled()) {
    sink.text_file("occurrence_graph.dot", "//", dot);
    sink.metadata("graph", shared);
  }
}

struct ClockScenario {
  std::uint64_t cycles = 10000;
  double drift_sigma = 0.0;
  double center_offset = 0.0;
  double width = 100.0;
  double peak_rate = 100.0;
  double target = -1.0;  // < 0: half maximum
  double tolerance = 0.1;
  double gain = 0.4;
  double free_running_offset = 0.0;
  bool no_feedback = false;
  bool deterministic = false;
};

std::pair<json, std::string> simulate_clock_once(const ClockScenario& s,
                                                 std::uint64_t seed) {
  const steering::ResonanceModel res =
      steering::ResonanceModel::cesium(s.center_offset, s.width, s.peak_rate);
  steering::AimingPoint aim =
      steering::half_maximum_aim(res, s.gain, s.tolerance);
  if (s.target >= 0.0) {
    aim.target = s.target;
  }
  steering::OscillatorModel osc;
  osc.true_frequency = steering::kCesiumDefinedHz + s.free_running_offset;
  osc.drift_sigma = s.drift_sigma;
  osc.seed = seed;
  const steering::ClockTrace trace = steering::simulate_atomic_clock(
      osc, res, aim, s.cycles, !s.no_feedback, s.deterministic);

  json summary = steering::clock_summary_to_json(trace);
  summary["seed"] = seed;
  const std::vector<double> corrected = steering::retro_correct(trace);
  std::vector<double> raw;
  raw.reserve(trace.samples.size());
  for (const auto& sample : trace.samples) {
    raw.push_back(sample.time_deviation);
  }
  json allan = json::object();
  for (const std::size_t tau : {std::size_t{1}, std::size_t{10},
                                std::size_t{100}}) {
    if (raw.size() < 2 * tau + 1) continue;
    allan[std::to_string(tau)] =
        json{{"raw", steering::allan_deviation(raw, tau)},
             {"retro_corrected", steering::allan_deviation(corrected, tau)}};
  }
  summary["allan_time_deviation"] = std::move(allan);
  return {std::move(summary), steering::clock_trace_to_csv(trace)};
}

struct SteerScenario {
  std::uint64_t cycles = 10000;
  std::uint64_t delay = 4;
  double rate_sigma = 1e-4;
  double position_sigma = 0.0;
  double rate_slope = 0.0;
  double target = 0.0;
  double tolerance = 0.1;
  double gain = 0.4;
  double horizon = 0.0;
  std::string predictor = "none";
  bool no_feedback = false;
  geometry::Metric metric = geometry::Metric::flat();
};

std::pair<json, std::string> simulate_steer_once(const SteerScenario& s,
                                                 std::uint64_t seed) {
  const machine::OpenMachine reference =
      machine::make_machine("A", machine::Program{}, "_", 0, s.tolerance);
  const machine::OpenMachine steered =
      machine::make_machine("B", machine::Program{}, "_", 0, s.tolerance);
  steering::AimingPoint aim;
  aim.target = s.target;
  aim.tolerance = s.tolerance;
  aim.gain = s.gain;
  aim.predictor_horizon = s.horizon;
  steering::NetworkDrift drift;
  drift.rate_sigma = s.rate_sigma;
  drift.position_sigma = s.position_sigma;
  drift.rate_slope = s.rate_slope;
  steering::Predictor predictor;
  if (s.predictor == "none") {
    predictor = steering::Predictor::kNone;
  } else if (s.predictor == "linear") {
    predictor = steering::Predictor::kLinear;
  } else {
    throw ConfigError("predictor must be 'none' or 'linear'");
  }
  const steering::NetworkTrace trace = steering::simulate_network_steering(
      reference, steered, s.metric, s.delay, drift, aim, predictor, s.cycles,
      seed, !s.no_feedback);
  json summary = steering::network_summary_to_json(trace);
  summary["seed"] = seed;
  return {std::move(summary), steering::network_trace_to_csv(trace)};
}

/// Runs a stochastic scenario for `sweep` consecutive seeds (concurrently
/// when sweeping), writes per-seed artifacts, and prints either the single
/// summary or the sweep aggregate.
template <typename Simulate>
void run_stochastic(const std::string& command, Shared& shared,
                    const std::string& stem, Simulate simulate) {
  ArtifactSink sink(resolve_out_dir(shared));
  if (shared.sweep < 1) {
    throw ConfigError("sweep must be at least 1");
  }
  if (shared.sweep == 1) {
    auto [summary, trace_csv] = simulate(shared.seed);
    summary["schema_version"] = kSchemaVersion;
    summary["command"] = command;
    std::cout << summary.dump(2) << "\n";
    if (sink.enabled()) {
      sink.json_file(stem + "_summary.json", summary);
      sink.text_file(stem + "_trace.csv", "#", trace_csv);
      sink.metadata(command, shared);
    }
    return;
  }

  if (!sink.enabled()) {
    throw ConfigError("--sweep needs an output directory");
  }
  std::vector<std::future<std::pair<json, std::string>>> futures;
  futures.reserve(static_cast<std::size_t>(shared.sweep));
  for (int k = 0; k < shared.sweep; ++k) {
    const std::uint64_t seed = shared.seed + static_cast<std::uint64_t>(k);
    futures.push_back(std::async(std::launch::async,
                                 [&simulate, seed] { return simulate(seed); }));
  }
  json aggregate{{"schema_version", kSchemaVersion},
                 {"command", command},
                 {"sweep", shared.sweep},
                 {"summaries", json::array()}};
  for (int k = 0; k < shared.sweep; ++k) {
    auto [summary, trace_csv] = futures[static_cast<std::size_t>(k)].get();
    const std::string tag =
        "_seed" + std::to_string(shared.seed + static_cast<std::uint64_t>(k));
    sink.json_file(stem + "_summary" + tag + ".json", summary);
    sink.text_file(stem + "_trace" + tag + ".csv", "#", trace_csv);
    aggregate["summaries"].push_back(std::move(summary));
  }
  std::cout << aggregate.dump(2) << "\n";
  sink.json_file(stem + "_sweep.json", aggregate);
  sink.metadata(command, shared);
}

}  // namespace

int main(int argc, char** argv) {
  Shared shared;
  shared.argv.assign(argv, argv + argc);

  CLI::App app{"chronolace: clock lacing, steering, and evidence tools"};
  app.require_subcommand(1);
  app.fallthrough();
  shared.config_opt = app.add_option("--config", shared.config_path,
                                     "Scenario config JSON (flags win)");
  shared.seed_opt = app.add_option("--seed", shared.seed,
                                   "Random seed for stochastic scenarios");
  shared.out_opt = app.add_option(
      "--out", shared.out_flag,
      "Output directory (default $CHRONOLACE_OUT_DIR; unset: no artifacts)");
  shared.sweep_opt = app.add_option(
      "--sweep", shared.sweep,
      "Run this many consecutive seeds concurrently (needs --out)");

  int exit_code = 0;

  // --- clock ---------------------------------------------------------------
  auto clock_scenario = std::make_shared<ClockScenario>();
  CLI::App* clock = app.add_subcommand(
      "clock", "Atomic-clock detection/steering loop at a resonance flank");
  auto* c_cycles = clock->add_option("--cycles", clock_scenario->cycles,
                                     "Feedback cycles to run");
  auto* c_drift = clock->add_option("--drift-sigma", clock_scenario->drift_sigma,
                                    "Oscillator random-walk step, Hz/cycle");
  auto* c_center = clock->add_option("--center-offset",
                                     clock_scenario->center_offset,
                                     "Operating resonance minus defined, Hz");
  auto* c_width = clock->add_option("--width", clock_scenario->width,
                                    "Lorentzian FWHM, Hz");
  auto* c_peak = clock->add_option("--peak-rate", clock_scenario->peak_rate,
                                   "Detections per cycle at the center");
  auto* c_target = clock->add_option("--target", clock_scenario->target,
                                     "Aim detections (default half maximum)");
  auto* c_tol = clock->add_option("--tolerance", clock_scenario->tolerance,
                                  "Guard band eta in (0, 1)");
  auto* c_gain = clock->add_option("--gain", clock_scenario->gain,
                                   "Loop gain");
  auto* c_free = clock->add_option("--free-running-offset",
                                   clock_scenario->free_running_offset,
                                   "Free-running frequency minus defined, Hz");
  auto* c_nofb = clock->add_flag("--no-feedback", clock_scenario->no_feedback,
                                 "Record detections without steering");
  auto* c_det = clock->add_flag("--deterministic",
                                clock_scenario->deterministic,
                                "Use expected detection counts, no shot noise");
  clock->callback([&shared, clock_scenario, c_cycles, c_drift, c_center,
                   c_width, c_peak, c_target, c_tol, c_gain, c_free, c_nofb,
                   c_det] {
    begin_scenario(shared,
                   {"cycles", "drift_sigma", "center_offset", "width",
                    "peak_rate", "target", "tolerance", "gain",
                    "free_running_offset", "no_feedback", "deterministic"});
    ClockScenario& s = *clock_scenario;
    take(shared, "cycles", c_cycles, s.cycles);
    take(shared, "drift_sigma", c_drift, s.drift_sigma);
    take(shared, "center_offset", c_center, s.center_offset);
    take(shared, "width", c_width, s.width);
    take(shared, "peak_rate", c_peak, s.peak_rate);
    take(shared, "target", c_target, s.target);
    take(shared, "tolerance", c_tol, s.tolerance);
    take(shared, "gain", c_gain, s.gain);
    take(shared, "free_running_offset", c_free, s.free_running_offset);
    take(shared, "no_feedback", c_nofb, s.no_feedback);
    take(shared, "deterministic", c_det, s.deterministic);
    if (shared.tolerance_eta > 0.0 && c_tol->count() == 0 &&
        !shared.config.contains("tolerance")) {
      s.tolerance = shared.tolerance_eta;
    }
    run_stochastic("clock", shared, "clock",
                   [&s](std::uint64_t seed) {
                     return simulate_clock_once(s, seed);
                   });
  });

  // --- steer ---------------------------------------------------------------
  auto steer_scenario = std::make_shared<SteerScenario>();
  auto steer_metric = std::make_shared<MetricFlags>();
  CLI::App* steer = app.add_subcommand(
      "steer", "Two-machine network steering over a delayed phase channel");
  auto* s_cycles = steer->add_option("--cycles", steer_scenario->cycles,
                                     "Feedback cycles to run");
  auto* s_delay = steer->add_option("--delay", steer_scenario->delay,
                                    "Report age floor Delta_BAB, cycles");
  auto* s_rate = steer->add_option("--rate-sigma", steer_scenario->rate_sigma,
                                   "Rate random-walk step, cycles/cycle");
  auto* s_pos = steer->add_option("--position-sigma",
                                  steer_scenario->position_sigma,
                                  "Transport-phase random walk, cycles/cycle");
  auto* s_slope = steer->add_option("--rate-slope", steer_scenario->rate_slope,
                                    "Deterministic rate drift, cycles/cycle^2");
  auto* s_target = steer->add_option("--target", steer_scenario->target,
                                     "Aiming phase");
  auto* s_tol = steer->add_option("--tolerance", steer_scenario->tolerance,
                                  "Guard band eta in (0, 1)");
  auto* s_gain = steer->add_option("--gain", steer_scenario->gain,
                                   "Loop gain");
  auto* s_horizon = steer->add_option("--horizon", steer_scenario->horizon,
                                      "Extra prediction lead, cycles");
  auto* s_pred = steer->add_option("--predictor", steer_scenario->predictor,
                                   "Report predictor: none | linear")
                     ->check(CLI::IsMember({"none", "linear"}));
  auto* s_nofb = steer->add_flag("--no-feedback", steer_scenario->no_feedback,
                                 "Record phases without steering");
  steer_metric->add_to(steer);
  steer->callback([&shared, steer_scenario, steer_metric, s_cycles, s_delay,
                   s_rate, s_pos, s_slope, s_target, s_tol, s_gain, s_horizon,
                   s_pred, s_nofb] {
    begin_scenario(shared,
                   {"cycles", "delay", "rate_sigma", "position_sigma",
                    "rate_slope", "target", "tolerance", "gain", "horizon",
                    "predictor", "no_feedback", "mu", "mass", "radius"});
    SteerScenario& s = *steer_scenario;
    take(shared, "cycles", s_cycles, s.cycles);
    take(shared, "delay", s_delay, s.delay);
    take(shared, "rate_sigma", s_rate, s.rate_sigma);
    take(shared, "position_sigma", s_pos, s.position_sigma);
    take(shared, "rate_slope", s_slope, s.rate_slope);
    take(shared, "target", s_target, s.target);
    take(shared, "tolerance", s_tol, s.tolerance);
    take(shared, "gain", s_gain, s.gain);
    take(shared, "horizon", s_horizon, s.horizon);
    take(shared, "predictor", s_pred, s.predictor);
    take(shared, "no_feedback", s_nofb, s.no_feedback);
    if (shared.tolerance_eta > 0.0 && s_tol->count() == 0 &&
        !shared.config.contains("tolerance")) {
      s.tolerance = shared.tolerance_eta;
    }
    s.metric = steer_metric->resolve(shared);
    run_stochastic("steer", shared, "steer",
                   [&s](std::uint64_t seed) {
                     return simulate_steer_once(s, seed);
                   });
  });

  // --- solve ---------------------------------------------------------------
  CLI::App* solve = app.add_subcommand(
      "solve", "Arrangement solvers: echo-count constellations");
  solve->require_subcommand(1);
  solve->fallthrough();

  struct SolveOpts {
    double p_tau = 1.0;
    double cycles_per_leg = 1.0;
    bool fifth = false;
    bool nine_null = false;
    bool no_period_bound = false;
    std::int64_t delta = 1;
    std::int64_t ticks = 0;
    double tick_period = 1.0;
  };
  auto solve_opts = std::make_shared<SolveOpts>();
  auto tetra_metric = std::make_shared<MetricFlags>();
  auto five_metric = std::make_shared<MetricFlags>();

  CLI::App* tetra = solve->add_subcommand(
      "tetra", "Regular four-machine arrangement, all six echoes 2N");
  auto* t_ptau = tetra->add_option("--p-tau", solve_opts->p_tau,
                                   "Anchored proper period, s");
  auto* t_n = tetra->add_option("--N", solve_opts->cycles_per_leg,
                                "Cycles per one-way leg");
  auto* t_fifth = tetra->add_flag("--fifth", solve_opts->fifth,
                                  "Extend to the five-machine bipyramid");
  tetra_metric->add_to(tetra);
  tetra->callback([&shared, solve_opts, tetra_metric, t_ptau, t_n, t_fifth] {
    begin_scenario(shared, {"p_tau", "N", "fifth", "mu", "mass", "radius"});
    take(shared, "p_tau", t_ptau, solve_opts->p_tau);
    take(shared, "N", t_n, solve_opts->cycles_per_leg);
    take(shared, "fifth", t_fifth, solve_opts->fifth);
    run_solve_tetra(shared, tetra_metric->resolve(shared), solve_opts->p_tau,
                    solve_opts->cycles_per_leg, solve_opts->fifth);
  });

  CLI::App* five = solve->add_subcommand(
      "five", "Symmetric five-machine cluster: B pair plus A ring");
  auto* f_ptau = five->add_option("--p-tau", solve_opts->p_tau,
                                  "Anchored proper period, s");
  auto* f_n = five->add_option("--N", solve_opts->cycles_per_leg,
                               "Cycles per one-way leg");
  auto* f_nine = five->add_flag("--nine-null", solve_opts->nine_null,
                                "Null nine channels; force the tenth");
  auto* f_nobound = five->add_flag("--no-period-bound",
                                   solve_opts->no_period_bound,
                                   "Skip the proper-period curvature bound");
  five_metric->add_to(five);
  five->callback([&shared, solve_opts, five_metric, f_ptau, f_n, f_nine,
                  f_nobound] {
    begin_scenario(shared, {"p_tau", "N", "nine_null", "no_period_bound",
                            "mu", "mass", "radius"});
    take(shared, "p_tau", f_ptau, solve_opts->p_tau);
    take(shared, "N", f_n, solve_opts->cycles_per_leg);
    take(shared, "nine_null", f_nine, solve_opts->nine_null);
    take(shared, "no_period_bound", f_nobound, solve_opts->no_period_bound);
    run_solve_five(shared, five_metric->resolve(shared), solve_opts->p_tau,
                   solve_opts->cycles_per_leg, solve_opts->nine_null,
                   solve_opts->no_period_bound);
  });

  CLI::App* two = solve->add_subcommand(
      "two", "Two-machine placement from echo count in a 1+1 chart");
  auto* w_delta = two->add_option("--delta", solve_opts->delta,
                                  "Echo count on both sides");
  auto* w_ticks = two->add_option("--ticks", solve_opts->ticks,
                                  "A tick events (default delta + 3)");
  auto* w_period = two->add_option("--tick-period", solve_opts->tick_period,
                                   "Seconds between A ticks");
  two->callback([&shared, solve_opts, w_delta, w_ticks, w_period] {
    begin_scenario(shared, {"delta", "ticks", "tick_period"});
    take(shared, "delta", w_delta, solve_opts->delta);
    take(shared, "ticks", w_ticks, solve_opts->ticks);
    take(shared, "tick_period", w_period, solve_opts->tick_period);
    const std::int64_t ticks =
        solve_opts->ticks > 0 ? solve_opts->ticks : solve_opts->delta + 3;
    run_solve_two(shared, solve_opts->delta, ticks, solve_opts->tick_period);
  });

  // --- audit ---------------------------------------------------------------
  auto audit_history = std::make_shared<std::string>();
  auto audit_eta = std::make_shared<double>(0.1);
  CLI::App* audit = app.add_subcommand(
      "audit", "Phase-gate audit of a machine history CSV");
  auto* a_hist = audit->add_option("--history", *audit_history,
                                   "History CSV file")->required();
  auto* a_eta = audit->add_option("--eta", *audit_eta,
                                  "Guard band eta in (0, 1)");
  audit->callback([&shared, &exit_code, audit_history, audit_eta, a_hist,
                   a_eta] {
    begin_scenario(shared, {"history", "eta"});
    take(shared, "history", a_hist, *audit_history);
    take(shared, "eta", a_eta, *audit_eta);
    if (shared.tolerance_eta > 0.0 && a_eta->count() == 0 &&
        !shared.config.contains("eta")) {
      *audit_eta = shared.tolerance_eta;
    }
    exit_code = run_audit(shared, *audit_history, *audit_eta);
  });

  // --- kab -----------------------------------------------------------------
  struct KabOpts {
    std::int64_t n = 2;
    double f0 = 0.25;
    std::vector<double> interior;
  };
  auto kab_opts = std::make_shared<KabOpts>();
  CLI::App* kab = app.add_subcommand(
      "kab", "Construct and verify an invariance-subgroup adjustment pair");
  auto* k_n = kab->add_option("--n", kab_opts->n, "Lacing echo count");
  auto* k_f0 = kab->add_option("--f0", kab_opts->f0,
                               "Old A-reading of the new tick 0");
  auto* k_int = kab->add_option("--interior", kab_opts->interior,
                                "Old A-readings of the new interior ticks");
  kab->callback([&shared, &exit_code, kab_opts, k_n, k_f0, k_int] {
    begin_scenario(shared, {"n", "f0", "interior"});
    take(shared, "n", k_n, kab_opts->n);
    take(shared, "f0", k_f0, kab_opts->f0);
    take(shared, "interior", k_int, kab_opts->interior);
    exit_code = run_kab(shared, kab_opts->n, kab_opts->f0, kab_opts->interior);
  });

  // --- cluster-phi ---------------------------------------------------------
  struct PhiOpts {
    double p_tau = 1e-13;
    double cycles_per_leg = 1e10;
  };
  auto phi_opts = std::make_shared<PhiOpts>();
  auto phi_metric = std::make_shared<MetricFlags>();
  CLI::App* phi = app.add_subcommand(
      "cluster-phi", "Ring-chord reception phase: numeric vs closed form");
  auto* p_ptau = phi->add_option("--p-tau", phi_opts->p_tau,
                                 "Anchored proper period, s");
  auto* p_n = phi->add_option("--N", phi_opts->cycles_per_leg,
                              "Cycles per one-way leg");
  phi_metric->add_to(phi);
  phi->callback([&shared, phi_opts, phi_metric, p_ptau, p_n] {
    begin_scenario(shared, {"p_tau", "N", "mu", "mass", "radius"});
    take(shared, "p_tau", p_ptau, phi_opts->p_tau);
    take(shared, "N", p_n, phi_opts->cycles_per_leg);
    run_cluster_phi(shared, phi_metric->resolve(shared), phi_opts->p_tau,
                    phi_opts->cycles_per_leg);
  });

  // --- bitrate -------------------------------------------------------------
  struct BitrateOpts {
    double mass = 0.0;
    double radius = 0.0;
    double leg = 0.0;
    double bits_per_cycle = 1.0;
  };
  auto bitrate_opts = std::make_shared<BitrateOpts>();
  CLI::App* bitrate = app.add_subcommand(
      "bitrate", "Curvature bound on proper period and signalling rate");
  auto* b_mass = bitrate->add_option("--mass", bitrate_opts->mass,
                                     "Central mass, kg")->required();
  auto* b_radius = bitrate->add_option("--radius", bitrate_opts->radius,
                                       "Chart distance from the mass, m")
                       ->required();
  auto* b_leg = bitrate->add_option("--L", bitrate_opts->leg,
                                    "Channel leg length, m")->required();
  auto* b_bits = bitrate->add_option("--bits-per-cycle",
                                     bitrate_opts->bits_per_cycle,
                                     "Payload bits per clock cycle");
  bitrate->callback([&shared, bitrate_opts, b_mass, b_radius, b_leg, b_bits] {
    begin_scenario(shared, {"mass", "radius", "L", "bits_per_cycle"});
    take(shared, "mass", b_mass, bitrate_opts->mass);
    take(shared, "radius", b_radius, bitrate_opts->radius);
    take(shared, "L", b_leg, bitrate_opts->leg);
    take(shared, "bits_per_cycle", b_bits, bitrate_opts->bits_per_cycle);
    run_bitrate(shared, bitrate_opts->mass, bitrate_opts->radius,
                bitrate_opts->leg, bitrate_opts->bits_per_cycle);
  });

  // --- models --------------------------------------------------------------
  struct ModelOpts {
    std::string ppm_path;
    bool coin = false;
    int knobs = 2;
  };
  auto model_opts = std::make_shared<ModelOpts>();
  CLI::App* models = app.add_subcommand(
      "models", "Two distinct quantum models behind one probability table");
  auto* m_ppm = models->add_option("--ppm", model_opts->ppm_path,
                                   "Probability-table JSON file");
  auto* m_coin = models->add_flag("--coin", model_opts->coin,
                                  "Use the built-in fair-coin table");
  auto* m_knobs = models->add_option("--knobs", model_opts->knobs,
                                     "Knob settings in the coin table");
  m_ppm->excludes(m_coin);
  models->callback([&shared, model_opts, m_ppm, m_coin, m_knobs] {
    begin_scenario(shared, {"ppm", "coin", "knobs"});
    take(shared, "ppm", m_ppm, model_opts->ppm_path);
    take(shared, "coin", m_coin, model_opts->coin);
    take(shared, "knobs", m_knobs, model_opts->knobs);
    run_models(shared, model_opts->ppm_path, model_opts->coin,
               model_opts->knobs);
  });

  // --- graph ---------------------------------------------------------------
  auto graph_entries = std::make_shared<std::vector<std::string>>();
  CLI::App* graph = app.add_subcommand(
      "graph", "Occurrence graph of machine histories as Graphviz DOT");
  auto* g_hist = graph->add_option("--history", *graph_entries,
                                   "History CSV as NAME=PATH (repeatable)")
                     ->required();
  graph->callback([&shared, graph_entries, g_hist] {
    begin_scenario(shared, {"history"});
    take(shared, "history", g_hist, *graph_entries);
    run_graph(shared, *graph_entries);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;  // --help and friends
    print_error("ConfigError", e.what());
    return 2;
  } catch (const Error& e) {
    print_error(e.kind(), e.what());
    return classify(e);
  } catch (const json::exception& e) {
    print_error("ConfigError", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("Error", e.what());
    return 3;
  }
  return exit_code;
}
