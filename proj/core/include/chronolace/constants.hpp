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

#ifndef CHRONOLACE_CONSTANTS_HPP_
#define CHRONOLACE_CONSTANTS_HPP_

namespace chronolace {

/// Speed of light in vacuum, m/s (exact by SI definition).
inline constexpr double kSpeedOfLight = 299792458.0;

/// Newtonian gravitational constant, m^3 kg^-1 s^-2.
inline constexpr double kGravitationalConstant = 6.674e-11;

/// Defined cesium-133 hyperfine transition frequency, Hz.
inline constexpr double kCesiumHyperfineHz = 9192631770.0;

/// Validity guard for the weak-field metric: mu * (x^2+y^2+z^2) must stay
/// below this bound at every evaluated point.
inline constexpr double kWeakFieldGuard = 1e-3;

/// Default relative tolerance for null time-of-flight quadrature.
inline constexpr double kDefaultTofRelTol = 1e-12;

/// Schema version stamped into every emitted artifact (JSON, CSV, DOT).
inline constexpr char kSchemaVersion[] = "1.0.0";

}  // namespace chronolace

#endif  // CHRONOLACE_CONSTANTS_HPP_
