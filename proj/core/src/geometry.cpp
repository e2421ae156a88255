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

#include "chronolace/geometry.hpp"

#include <cmath>

#include "chronolace/reading.hpp"

namespace chronolace::geometry {

Metric Metric::weak_field(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw DomainError("curvature parameter mu must be finite and nonnegative");
  }
  return Metric{mu};
}

Metric Metric::around_mass(double mass_kg, double distance_m) {
  return Metric{curvature_parameter(mass_kg, distance_m)};
}

double curvature_parameter(double mass_kg, double distance_m) {
  if (!(mass_kg > 0.0) || !(distance_m > 0.0)) {
    throw DomainError("mass and distance must be positive");
  }
  const double c = kSpeedOfLight;
  return kGravitationalConstant * mass_kg /
         (c * c * distance_m * distance_m * distance_m);
}

Mat4 metric_components(const Metric& metric, const Position& position) {
  const double mu = metric.mu;
  const Vec3 p{position.x, position.y, position.z};
  detail::require_weak_field(mu, p);
  const double c2 = kSpeedOfLight * kSpeedOfLight;
  const double third = mu / 3.0;
  Mat4 g{};
  g[0][0] = -c2 * detail::time_factor(mu, p);
  g[1][1] = 1.0 + third * (p.y * p.y + p.z * p.z);
  g[2][2] = 1.0 + third * (p.x * p.x - 2.0 * p.z * p.z);
  g[3][3] = 1.0 + third * (p.x * p.x - 2.0 * p.y * p.y);
  g[1][2] = g[2][1] = -third * p.x * p.y;
  g[1][3] = g[3][1] = -third * p.x * p.z;
  g[2][3] = g[3][2] = 2.0 * third * p.y * p.z;
  return g;
}

double null_tof(const Metric& metric, const Vec3& a, const Vec3& b,
                double rel_tol) {
  return detail::null_tof_t(metric.mu, a, b, rel_tol);
}

double radar_distance(const Metric& metric, const Vec3& a, const Vec3& b,
                      double rel_tol) {
  const double h = detail::time_factor(metric.mu, a);
  return kSpeedOfLight * std::sqrt(h) * detail::null_tof_t(metric.mu, a, b, rel_tol);
}

ClusterGeometry first_order_cluster_geometry(double mass_kg, double distance_m,
                                             double cycles_per_leg,
                                             double p_tau) {
  if (!(cycles_per_leg > 0.0) || !(p_tau > 0.0)) {
    throw DomainError("cycle count and clock period must be positive");
  }
  const double m_over_r3 =
      kGravitationalConstant * mass_kg /
      (distance_m * distance_m * distance_m);
  const double strength = 27.0 * m_over_r3 * cycles_per_leg * cycles_per_leg *
                          cycles_per_leg * p_tau * p_tau / 4.0;
  if (strength >= 1.0) {
    throw CurvatureTooStrongError(
        "first-order cluster geometry invalid: 27 G M N^3 p^2 / (4 r^3) >= 1");
  }
  const double mu = curvature_parameter(mass_kg, distance_m);
  ClusterGeometry g = cluster_closed_form(mu, cycles_per_leg, p_tau);
  if (!(mu * g.y_a0 * g.y_a0 < kWeakFieldGuard)) {
    throw WeakFieldDomainError(
        "cluster ring radius leaves the weak-field chart");
  }
  g.phi = fold_phase(g.phi);
  return g;
}

}  // namespace chronolace::geometry
