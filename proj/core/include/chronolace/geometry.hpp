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

#ifndef CHRONOLACE_GEOMETRY_HPP_
#define CHRONOLACE_GEOMETRY_HPP_

#include <array>
#include <cmath>

#include "chronolace/constants.hpp"
#include "chronolace/errors.hpp"
#include "chronolace/quadrature.hpp"

namespace chronolace::geometry {

/// Spatial point in the Fermi normal chart, metres.
template <typename Real>
struct Vec3T {
  Real x{};
  Real y{};
  Real z{};
};

using Vec3 = Vec3T<double>;

/// Weak-field metric of a cluster chart centred a distance r from a mass M.
/// mu = G M / (c^2 r^3) in 1/m^2; mu == 0 is exactly Minkowski.
struct Metric {
  double mu = 0.0;

  static Metric flat() { return Metric{0.0}; }
  static Metric weak_field(double mu);
  static Metric around_mass(double mass_kg, double distance_m);
};

/// Chart event, coordinate order (t, x, y, z).
struct Position {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

using Mat4 = std::array<std::array<double, 4>, 4>;

/// Covariant metric components g_ab at a chart position, order (t, x, y, z).
/// g_tt carries the c^2 factor, so all entries are in SI units.
Mat4 metric_components(const Metric& metric, const Position& position);

namespace detail {

/// -g_tt / c^2 = 1 + mu (y^2 + z^2 - 2 x^2).
template <typename Real>
Real time_factor(Real mu, const Vec3T<Real>& p) {
  return Real(1) + mu * (p.y * p.y + p.z * p.z - 2 * p.x * p.x);
}

/// Spatial quadratic form g_ij d^i d^j for a coordinate displacement d at p.
template <typename Real>
Real segment_form(Real mu, const Vec3T<Real>& p, const Vec3T<Real>& d) {
  const Real third = mu / 3;
  const Real gxx = Real(1) + third * (p.y * p.y + p.z * p.z);
  const Real gyy = Real(1) + third * (p.x * p.x - 2 * p.z * p.z);
  const Real gzz = Real(1) + third * (p.x * p.x - 2 * p.y * p.y);
  const Real gxy = -third * p.x * p.y;
  const Real gxz = -third * p.x * p.z;
  const Real gyz = 2 * third * p.y * p.z;
  return gxx * d.x * d.x + gyy * d.y * d.y + gzz * d.z * d.z +
         2 * (gxy * d.x * d.y + gxz * d.x * d.z + gyz * d.y * d.z);
}

template <typename Real>
void require_weak_field(Real mu, const Vec3T<Real>& p) {
  const Real r2 = p.x * p.x + p.y * p.y + p.z * p.z;
  if (!(mu * r2 < Real(kWeakFieldGuard))) {
    throw WeakFieldDomainError(
        "position outside the weak-field chart: mu * |x|^2 exceeds 1e-3");
  }
}

/// Coordinate time of flight of a null signal along the straight coordinate
/// segment a -> b: (1/c) * integral_0^1 sqrt(S(u) / h(u)) du, with S the
/// spatial form along the segment and h = -g_tt / c^2. mu r^2 is convex along
/// a straight segment, so the weak-field guard only needs the endpoints.
template <typename Real>
Real null_tof_t(Real mu, const Vec3T<Real>& a, const Vec3T<Real>& b,
                Real rel_tol) {
  require_weak_field(mu, a);
  require_weak_field(mu, b);
  const Vec3T<Real> d{b.x - a.x, b.y - a.y, b.z - a.z};
  const auto integrand = [&](Real u) {
    const Vec3T<Real> p{a.x + u * d.x, a.y + u * d.y, a.z + u * d.z};
    return std::sqrt(segment_form(mu, p, d) / time_factor(mu, p));
  };
  const Real path = quadrature::integrate_adaptive(integrand, Real(0), Real(1),
                                                   rel_tol);
  return path / Real(kSpeedOfLight);
}

}  // namespace detail

/// Coordinate time of flight (seconds) of a null signal between two spatial
/// chart points, travelling along the straight coordinate segment.
double null_tof(const Metric& metric, const Vec3& a, const Vec3& b,
                double rel_tol = kDefaultTofRelTol);

/// Radar distance from a: the emitter's proper-time lapse over the one-way
/// flight, scaled by c, i.e. sqrt(-g_tt(a)) * null_tof(a, b).
double radar_distance(const Metric& metric, const Vec3& a, const Vec3& b,
                      double rel_tol = kDefaultTofRelTol);

/// First-order description of the symmetric five-machine cluster: a pair of
/// B machines at +-x_b1 on the x axis and a ring of three A machines of
/// radius y_a0 in the x = 0 plane. The B clocks step coordinate period p_t.
template <typename Real>
struct ClusterGeometryT {
  Real p_t{};    ///< coordinate period of the B clocks, s
  Real x_b1{};   ///< half separation of the B pair, m
  Real y_a0{};   ///< A-ring radius, m
  Real t_aa{};   ///< coordinate time of flight along one A-ring chord, s
  Real phi{};    ///< folded reception phase of the chord signal, cycles
};

using ClusterGeometry = ClusterGeometryT<double>;

/// First-order closed forms for the cluster, in terms of the dimensionless
/// curvature scale eps = mu (N p c)^2:
///   p_t  = p_tau (1 + eps_tau)
///   x_b1 = N p_t c (1 - eps/3)
///   y_a0 = sqrt(3) N p_t c (1 + eps/6)
///   t_aa = 3 N p_t (1 - (5/6) eps)
///   phi  = -(5/2) N eps
/// with eps evaluated at p_t after the clock-rate correction. phi is returned
/// unfolded; callers that need a reading phase fold it afterwards.
template <typename Real>
ClusterGeometryT<Real> cluster_closed_form(Real mu, Real n_cycles, Real p_tau) {
  const Real c = Real(kSpeedOfLight);
  const Real eps_tau = mu * n_cycles * n_cycles * p_tau * p_tau * c * c;
  const Real p_t = p_tau * (Real(1) + eps_tau);
  const Real s = n_cycles * p_t * c;
  const Real eps = mu * s * s;
  ClusterGeometryT<Real> g;
  g.p_t = p_t;
  g.x_b1 = s * (Real(1) - eps / 3);
  g.y_a0 = std::sqrt(Real(3)) * s * (Real(1) + eps / 6);
  g.t_aa = 3 * n_cycles * p_t * (Real(1) - Real(5) / 6 * eps);
  g.phi = -Real(5) / 2 * n_cycles * eps;
  return g;
}

/// First-order cluster geometry around a mass, with the chord reception phase
/// folded into (-1/2, 1/2]. cycles_per_leg is the nominal cycle count N of
/// half the B-B separation; a B-A leg spans 2N cycles and an A-ring chord 3N.
///
/// Throws CurvatureTooStrongError when 27 G M N^3 p_tau^2 / (4 r^3) >= 1,
/// the point where the first-order phase treatment loses meaning, and
/// WeakFieldDomainError when the ring radius leaves the weak-field chart.
ClusterGeometry first_order_cluster_geometry(double mass_kg, double distance_m,
                                             double cycles_per_leg,
                                             double p_tau);

/// Curvature parameter mu = G M / (c^2 r^3) in 1/m^2.
double curvature_parameter(double mass_kg, double distance_m);

}  // namespace chronolace::geometry

#endif  // CHRONOLACE_GEOMETRY_HPP_
