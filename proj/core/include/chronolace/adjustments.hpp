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

#ifndef CHRONOLACE_ADJUSTMENTS_HPP_
#define CHRONOLACE_ADJUSTMENTS_HPP_

#include <span>
#include <vector>

#include "json.hpp"

namespace chronolace::adjustments {

/// An element of the group of clock adjustments: a strictly increasing
/// piecewise-linear map on clock readings, extended linearly beyond its
/// breakpoints with the end-segment slopes. Piecewise-linear monotone maps
/// are closed under composition and inversion, so group operations are exact
/// apart from floating-point rounding.
///
/// The same type doubles as a "clocking": a monotone map from a machine's
/// readings to coordinate time in a chart.
struct ClockAdjustment {
  std::vector<double> breakpoints;
  std::vector<double> values;

  friend bool operator==(const ClockAdjustment&, const ClockAdjustment&) =
      default;
};

/// Validates and builds an adjustment. Requires at least two knots, strictly
/// increasing finite breakpoints and values (hence positive slopes).
/// Violations raise ConfigError.
ClockAdjustment make_adjustment(std::vector<double> breakpoints,
                                std::vector<double> values);

/// The identity adjustment.
ClockAdjustment identity_adjustment();

/// The adjustment zeta -> factor * zeta. Requires factor > 0 (ConfigError).
ClockAdjustment scale_adjustment(double factor);

/// The adjustment zeta -> zeta + offset.
ClockAdjustment shift_adjustment(double offset);

/// Evaluates f at zeta (exact at knots, linear in between and beyond).
double apply(const ClockAdjustment& f, double zeta);

/// The inverse adjustment. Exact: swaps breakpoints and values.
ClockAdjustment invert(const ClockAdjustment& f);

/// The composition f after g: apply(compose(f, g), x) == apply(f, apply(g, x))
/// for every x. The result's knots are the union of g's breakpoints with the
/// g-preimages of f's breakpoints, so composition is exact up to rounding.
ClockAdjustment compose(const ClockAdjustment& f, const ClockAdjustment& g);

/// Remaps transmission readings under the adjustment f: each reading zeta
/// becomes f^-1(zeta). Monotone, hence order preserving.
std::vector<double> remap_transmissions(const ClockAdjustment& f,
                                        std::span<const double> readings);

/// Serialization as breakpoint/value arrays.
nlohmann::json adjustment_to_json(const ClockAdjustment& f);

/// Parses the JSON form; malformed documents raise ConfigError.
ClockAdjustment adjustment_from_json(const nlohmann::json& j);

}  // namespace chronolace::adjustments

#endif  // CHRONOLACE_ADJUSTMENTS_HPP_
