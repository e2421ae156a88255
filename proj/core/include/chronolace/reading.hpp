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

#ifndef CHRONOLACE_READING_HPP_
#define CHRONOLACE_READING_HPP_

#include <cmath>
#include <compare>
#include <cstdint>

namespace chronolace {

/// Folds a real number into the phase interval (-1/2, 1/2]. The value -1/2 is
/// excluded by convention and maps to +1/2 (with the cycle below).
inline double fold_phase(double x) {
  double folded = x - std::ceil(x - 0.5);
  // Guard against ceil rounding artifacts at the interval edges.
  if (folded <= -0.5) folded += 1.0;
  if (folded > 0.5) folded -= 1.0;
  return folded;
}

/// A clock reading m.phi: an integer cycle count plus a fractional phase in
/// (-1/2, 1/2]. Readings are totally ordered by cycle + phase.
struct Reading {
  std::int64_t cycle = 0;
  double phase = 0.0;

  double value() const { return static_cast<double>(cycle) + phase; }
  bool is_tick() const { return phase == 0.0; }

  friend auto operator<=>(const Reading& a, const Reading& b) {
    return a.value() <=> b.value();
  }
  friend bool operator==(const Reading& a, const Reading& b) {
    return a.cycle == b.cycle && a.phase == b.phase;
  }
};

/// Splits a real reading value into the cycle/phase normal form.
inline Reading reading_from_value(double v) {
  double cycle_part = std::ceil(v - 0.5);
  double phase = v - cycle_part;
  if (phase <= -0.5) {
    cycle_part -= 1.0;
    phase = v - cycle_part;
  }
  if (phase > 0.5) {
    cycle_part += 1.0;
    phase = v - cycle_part;
  }
  return Reading{static_cast<std::int64_t>(cycle_part), phase};
}

}  // namespace chronolace

#endif  // CHRONOLACE_READING_HPP_
