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
// Microbenchmarks for the numerically hot paths: null time of flight,
// arrangement solvers, the frozen-evidence audit, steering loops, and the
// quantum-evidence trace rule.

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "chronolace/arrangements.hpp"
#include "chronolace/geometry.hpp"
#include "chronolace/lacing.hpp"
#include "chronolace/openmachine.hpp"
#include "chronolace/quantumevidence.hpp"
#include "chronolace/steering.hpp"

namespace {

using namespace chronolace;

// Earth-mass cluster chart at 3e7 m. The tetrahedron runs at the
// second-scale reference arrangement; the five-machine cluster at the
// desk-scale clock (1e-13 s proper period, 1e11 cycles per leg).
const geometry::Metric kCurved =
    geometry::Metric::around_mass(5.98e24, 3.0e7);

void BM_NullTofFlat(benchmark::State& state) {
  const geometry::Vec3 a{0.0, 0.0, 0.0};
  const geometry::Vec3 b{2.9e6, 1.0e6, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        geometry::null_tof(geometry::Metric::flat(), a, b));
  }
}
BENCHMARK(BM_NullTofFlat);

void BM_NullTofCurved(benchmark::State& state) {
  const geometry::Vec3 a{0.0, 0.0, 0.0};
  const geometry::Vec3 b{2.9e6, 1.0e6, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry::null_tof(kCurved, a, b));
  }
}
BENCHMARK(BM_NullTofCurved);

void BM_MinProperPeriod(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        arrangements::min_proper_period(5.98e24, 3.0e7, 6.0e6));
  }
}
BENCHMARK(BM_MinProperPeriod);

void BM_SolveTetrahedron(benchmark::State& state) {
  const geometry::Metric metric =
      state.range(0) == 0 ? geometry::Metric::flat() : kCurved;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        arrangements::solve_tetrahedron(metric, 1.0, 1.0));
  }
}
BENCHMARK(BM_SolveTetrahedron)->Arg(0)->Arg(1);

void BM_SolveFiveComplete(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        arrangements::solve_five_complete(kCurved, 1e-13, 1e11));
  }
}
BENCHMARK(BM_SolveFiveComplete);

void BM_FreezeTest(benchmark::State& state) {
  const arrangements::SolverReport report = arrangements::extend_fifth(
      arrangements::solve_tetrahedron(kCurved, 1.0, 1.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(arrangements::freeze_test(report));
  }
}
BENCHMARK(BM_FreezeTest);

void BM_ConstructVerifyKPair(benchmark::State& state) {
  lacing::LacingSpec spec;
  spec.image_a = {{-40.0, 0.0}, {80.0, 0.0}};
  spec.image_b = {{-40.0, 1.5 * kSpeedOfLight}, {80.0, 1.5 * kSpeedOfLight}};
  spec.anchor = {0.0, 0.0};
  spec.n = 2;
  spec.interior = {{1.5, 0.0}};
  const auto ab = lacing::lacing_channel_ab(2);
  const auto ba = lacing::lacing_channel_ba(2);
  for (auto _ : state) {
    const lacing::AdjustmentPair pair =
        lacing::construct_k_pair(spec, 0.25, std::vector<double>{1.25});
    benchmark::DoNotOptimize(lacing::verify_invariance(pair, ab, ba, spec));
  }
}
BENCHMARK(BM_ConstructVerifyKPair);

void BM_ClockLoop(benchmark::State& state) {
  const steering::ResonanceModel res = steering::ResonanceModel::cesium();
  const steering::AimingPoint aim = steering::half_maximum_aim(res);
  steering::OscillatorModel osc;
  osc.drift_sigma = 1e-3;
  osc.seed = 7;
  const auto cycles = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        steering::simulate_atomic_clock(osc, res, aim, cycles));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(cycles));
}
BENCHMARK(BM_ClockLoop)->Arg(1000)->Arg(10000);

void BM_NetworkSteering(benchmark::State& state) {
  const machine::OpenMachine a =
      machine::make_machine("A", machine::Program{}, "_");
  const machine::OpenMachine b =
      machine::make_machine("B", machine::Program{}, "_");
  steering::NetworkDrift drift;
  drift.rate_sigma = 1e-4;
  const steering::AimingPoint aim;
  const auto cycles = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(steering::simulate_network_steering(
        a, b, geometry::Metric::flat(), 4, drift, aim,
        steering::Predictor::kNone, cycles, 3));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(cycles));
}
BENCHMARK(BM_NetworkSteering)->Arg(1000)->Arg(10000);

void BM_EvaluatePpm(benchmark::State& state) {
  quantum::PPM ppm;
  ppm.outcomes = {"click", "silence"};
  for (int k = 0; k < 4; ++k) {
    ppm.knobs.push_back("knob-" + std::to_string(k));
    ppm.table.push_back({0.2 + 0.1 * k, 0.8 - 0.1 * k});
  }
  const quantum::DistinctModels models =
      quantum::construct_distinct_models(ppm);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quantum::evaluate_ppm(models.model2));
  }
}
BENCHMARK(BM_EvaluatePpm);

void BM_ConstructDistinctModels(benchmark::State& state) {
  quantum::PPM ppm;
  ppm.outcomes = {"click", "silence"};
  for (int k = 0; k < 4; ++k) {
    ppm.knobs.push_back("knob-" + std::to_string(k));
    ppm.table.push_back({0.2 + 0.1 * k, 0.8 - 0.1 * k});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(quantum::construct_distinct_models(ppm));
  }
}
BENCHMARK(BM_ConstructDistinctModels);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
