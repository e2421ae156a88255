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

#include "chronolace/adjustments.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "chronolace/errors.hpp"

namespace chronolace::adjustments {
namespace {

void require_strictly_increasing(const std::vector<double>& xs,
                                 const std::string& what) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) {
      throw ConfigError("adjustment " + what + " must be finite");
    }
    if (i > 0 && !(xs[i] > xs[i - 1])) {
      throw ConfigError("adjustment " + what +
                        " must be strictly increasing");
    }
  }
}

}  // namespace

ClockAdjustment make_adjustment(std::vector<double> breakpoints,
                                std::vector<double> values) {
  if (breakpoints.size() < 2) {
    throw ConfigError("adjustment needs at least two knots");
  }
  if (breakpoints.size() != values.size()) {
    throw ConfigError("adjustment breakpoints and values differ in length");
  }
  require_strictly_increasing(breakpoints, "breakpoints");
  require_strictly_increasing(values, "values");
  return ClockAdjustment{std::move(breakpoints), std::move(values)};
}

ClockAdjustment identity_adjustment() {
  return ClockAdjustment{{0.0, 1.0}, {0.0, 1.0}};
}

ClockAdjustment scale_adjustment(double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ConfigError("scale adjustment needs a positive finite factor");
  }
  return ClockAdjustment{{0.0, 1.0}, {0.0, factor}};
}

ClockAdjustment shift_adjustment(double offset) {
  if (!std::isfinite(offset)) {
    throw ConfigError("shift adjustment needs a finite offset");
  }
  return ClockAdjustment{{0.0, 1.0}, {offset, offset + 1.0}};
}

double apply(const ClockAdjustment& f, double zeta) {
  const auto& b = f.breakpoints;
  const auto& v = f.values;
  const std::size_t n = b.size();
  const auto it = std::upper_bound(b.begin(), b.end(), zeta);
  const std::size_t idx = static_cast<std::size_t>(it - b.begin());
  if (idx == 0) {
    const double slope = (v[1] - v[0]) / (b[1] - b[0]);
    return v[0] + (zeta - b[0]) * slope;
  }
  if (b[idx - 1] == zeta) {
    return v[idx - 1];  // Exact at knots.
  }
  if (idx == n) {
    const double slope = (v[n - 1] - v[n - 2]) / (b[n - 1] - b[n - 2]);
    return v[n - 1] + (zeta - b[n - 1]) * slope;
  }
  const double slope = (v[idx] - v[idx - 1]) / (b[idx] - b[idx - 1]);
  return v[idx - 1] + (zeta - b[idx - 1]) * slope;
}

ClockAdjustment invert(const ClockAdjustment& f) {
  return ClockAdjustment{f.values, f.breakpoints};
}

ClockAdjustment compose(const ClockAdjustment& f, const ClockAdjustment& g) {
  const ClockAdjustment g_inverse = invert(g);
  std::vector<double> knots = g.breakpoints;
  knots.reserve(g.breakpoints.size() + f.breakpoints.size());
  for (double fb : f.breakpoints) {
    knots.push_back(apply(g_inverse, fb));
  }
  std::sort(knots.begin(), knots.end());

  std::vector<double> breakpoints;
  std::vector<double> values;
  breakpoints.reserve(knots.size());
  values.reserve(knots.size());
  for (double x : knots) {
    const double y = apply(f, apply(g, x));
    // Drop knots that collide at double precision; the retained knots carry
    // the exact composite values, so the interpolant is unchanged.
    if (!breakpoints.empty() &&
        (x <= breakpoints.back() || y <= values.back())) {
      continue;
    }
    breakpoints.push_back(x);
    values.push_back(y);
  }
  return make_adjustment(std::move(breakpoints), std::move(values));
}

std::vector<double> remap_transmissions(const ClockAdjustment& f,
                                        std::span<const double> readings) {
  const ClockAdjustment f_inverse = invert(f);
  std::vector<double> out;
  out.reserve(readings.size());
  for (double zeta : readings) {
    out.push_back(apply(f_inverse, zeta));
  }
  return out;
}

nlohmann::json adjustment_to_json(const ClockAdjustment& f) {
  return nlohmann::json{{"breakpoints", f.breakpoints},
                        {"values", f.values}};
}

ClockAdjustment adjustment_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("breakpoints") || !j.contains("values")) {
    throw ConfigError(
        "adjustment JSON needs 'breakpoints' and 'values' arrays");
  }
  for (const char* key : {"breakpoints", "values"}) {
    if (!j.at(key).is_array()) {
      throw ConfigError(std::string("adjustment JSON field '") + key +
                        "' must be an array");
    }
    for (const auto& entry : j.at(key)) {
      if (!entry.is_number()) {
        throw ConfigError(std::string("adjustment JSON field '") + key +
                          "' must contain numbers only");
      }
    }
  }
  return make_adjustment(j.at("breakpoints").get<std::vector<double>>(),
                         j.at("values").get<std::vector<double>>());
}

}  // namespace chronolace::adjustments
