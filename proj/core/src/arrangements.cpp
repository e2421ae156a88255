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

#include "chronolace/arrangements.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "chronolace/reading.hpp"
#include "chronolace/rootfind.hpp"

namespace chronolace::arrangements {
namespace {

using geometry::Vec3;
using geometry::Vec3T;

constexpr double kFrozenRatioThreshold = 1e-6;
constexpr double kSolveTofRelTol = 1e-13;

double tof(double mu, const Vec3& a, const Vec3& b,
           double rel_tol = kSolveTofRelTol) {
  return geometry::detail::null_tof_t<double>(mu, a, b, rel_tol);
}

/// Metric-derived proper period of a clock at rest at p whose coordinate
/// period is p_t: dtau = sqrt(-g_tt)/c dt.
double proper_period_at(double mu, const Vec3& p, double p_t) {
  return p_t * std::sqrt(geometry::detail::time_factor(mu, p));
}

std::size_t machine_index(const std::vector<Machine>& machines,
                          const std::string& name) {
  for (std::size_t i = 0; i < machines.size(); ++i) {
    if (machines[i].name == name) return i;
  }
  throw ConfigError("channel references unknown machine: " + name);
}

/// Damped Newton iteration with a forward-difference Jacobian for the small
/// square systems of the arrangement solvers. Residuals are in cycles;
/// unknowns carry an overall length scale used for the difference step.
template <typename F>
Eigen::VectorXd newton_solve(const F& residual, Eigen::VectorXd x,
                             double scale, const char* what,
                             double tol = 1e-12, int max_iterations = 40) {
  const double h = 1e-7 * scale;
  Eigen::VectorXd r = residual(x);
  for (int iteration = 0; iteration < max_iterations; ++iteration) {
    if (r.cwiseAbs().maxCoeff() < tol) return x;
    Eigen::MatrixXd jacobian(r.size(), x.size());
    for (Eigen::Index col = 0; col < x.size(); ++col) {
      Eigen::VectorXd xp = x;
      xp[col] += h;
      jacobian.col(col) = (residual(xp) - r) / h;
    }
    const Eigen::VectorXd step = jacobian.fullPivLu().solve(r);
    double damping = 1.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      const Eigen::VectorXd candidate = x - damping * step;
      const Eigen::VectorXd rc = residual(candidate);
      if (rc.cwiseAbs().maxCoeff() < r.cwiseAbs().maxCoeff() ||
          rc.cwiseAbs().maxCoeff() < tol) {
        x = candidate;
        r = rc;
        break;
      }
      damping /= 2;
      if (attempt == 7) throw SolverError(std::string(what) +
                                          ": Newton step failed to descend");
    }
  }
  if (r.cwiseAbs().maxCoeff() < tol) return x;
  throw SolverError(std::string(what) + ": failed to converge");
}

ChannelReport make_channel(const std::string& from, const std::string& to,
                           double one_way_cycles, double target_echo,
                           bool constrained) {
  ChannelReport ch;
  ch.from = from;
  ch.to = to;
  ch.echo_count = 2 * one_way_cycles;
  ch.target_echo_count = target_echo;
  ch.residual = ch.echo_count - target_echo;
  ch.phase = constrained || target_echo > 0
                 ? fold_phase(one_way_cycles - target_echo / 2)
                 : fold_phase(one_way_cycles);
  ch.constrained = constrained;
  return ch;
}

void fill_proper_periods(SolverReport& report) {
  report.proper_periods.clear();
  for (const Machine& m : report.arrangement.machines) {
    report.proper_periods.push_back(proper_period_at(
        report.arrangement.metric.mu, m.position, report.coordinate_period));
  }
}

void mirror_targets_from_channels(SolverReport& report) {
  report.arrangement.targets.clear();
  for (const ChannelReport& ch : report.channels) {
    if (!ch.constrained) continue;
    report.arrangement.targets.push_back(
        ChannelTarget{ch.from, ch.to, ch.target_echo_count, 0.0});
  }
}

// ---------------------------------------------------------------------------
// Symmetric five-machine cluster, numeric time-of-flight pipeline.
//
// The extraction of the ring phase subtracts two nearly equal multiples of
// the coordinate period, so at metre-scale periods with 1e11 cycles per leg
// a double loses the phase entirely; the pipeline therefore runs in extended
// precision throughout and only the assembled report is narrowed.
// ---------------------------------------------------------------------------

template <typename Real>
struct ClusterNumeric {
  Real x1{};
  Real p_t{};
  Real y0{};
  Real t_aa{};
  Real phi{};
};

template <typename Real>
ClusterNumeric<Real> cluster_pipeline(Real mu, Real n, Real p_tau) {
  const Real c = Real(kSpeedOfLight);
  const Real rel_tol = 100 * std::numeric_limits<Real>::epsilon();
  const auto tofr = [&](const Vec3T<Real>& a, const Vec3T<Real>& b) {
    return geometry::detail::null_tof_t<Real>(mu, a, b, rel_tol);
  };
  const Real s0 = n * p_tau * c;
  const Real tol = 100 * std::numeric_limits<Real>::epsilon() * s0;
  // B1 anchors the proper period, so its coordinate period depends on the
  // solved half separation; fold that dependence into the root equation.
  const auto period_of = [&](Real x1) {
    return p_tau / std::sqrt(Real(1) - 2 * mu * x1 * x1);
  };
  const Real x1 = rootfind::find_root_bracketed<Real>(
      [&](Real x) {
        return tofr({-x, 0, 0}, {x, 0, 0}) - 2 * n * period_of(x);
      },
      Real(0.9) * s0, Real(1.1) * s0, tol);
  const Real p_t = period_of(x1);
  const Real y_seed = std::sqrt(Real(3)) * s0;
  const Real y0 = rootfind::find_root_bracketed<Real>(
      [&](Real y) { return tofr({x1, 0, 0}, {0, y, 0}) - 2 * n * p_t; },
      Real(0.9) * y_seed, Real(1.1) * y_seed, tol);
  ClusterNumeric<Real> out;
  out.x1 = x1;
  out.p_t = p_t;
  out.y0 = y0;
  out.t_aa = tofr({0, y0, 0}, {0, -y0 / 2, std::sqrt(Real(3)) / 2 * y0});
  out.phi = out.t_aa / p_t - 3 * n;
  return out;
}

/// Positions of the five-cluster for a solved (x1, y0).
std::vector<Machine> cluster_machines(double x1, double y0) {
  const double z = std::sqrt(3.0) / 2 * y0;
  return {Machine{"B1", {x1, 0, 0}},  Machine{"B2", {-x1, 0, 0}},
          Machine{"A0", {0, y0, 0}},  Machine{"A1", {0, -y0 / 2, z}},
          Machine{"A2", {0, -y0 / 2, -z}}};
}

/// Canonical five-cluster channel order; `legs` is the one-way target in
/// cycles per leg units.
struct ClusterChannel {
  int from;
  int to;
  int legs;
};

constexpr std::array<ClusterChannel, 10> kClusterChannels{{
    {0, 1, 2}, {0, 2, 2}, {0, 3, 2}, {0, 4, 2}, {1, 2, 2},
    {1, 3, 2}, {1, 4, 2}, {2, 3, 3}, {2, 4, 3}, {3, 4, 3},
}};

void require_cluster_inputs(double p_tau, double cycles_per_leg) {
  if (!(p_tau > 0.0) || !(cycles_per_leg > 0.0)) {
    throw DomainError("cycle count and clock period must be positive");
  }
}

}  // namespace

SolverReport solve_tetrahedron(const geometry::Metric& metric, double p_tau,
                               double cycles_per_leg) {
  require_cluster_inputs(p_tau, cycles_per_leg);
  const double mu = metric.mu;
  const double n = cycles_per_leg;
  // The origin clock is the anchor and the chart is normal there, so the
  // coordinate period equals the anchored proper period exactly.
  const double p_t = p_tau;
  const double d0 = n * kSpeedOfLight * p_t;
  const double x2 = rootfind::find_root_bracketed<double>(
      [&](double x) { return tof(mu, {0, 0, 0}, {x, 0, 0}) - n * p_t; },
      0.5 * d0, 1.5 * d0, 1e-13 * d0);

  const Vec3 v1{0, 0, 0};
  const Vec3 v2{x2, 0, 0};
  const auto v3_residual = [&](const Eigen::VectorXd& q) {
    const Vec3 p{q[0], q[1], 0};
    Eigen::VectorXd r(2);
    r[0] = tof(mu, v1, p) / p_t - n;
    r[1] = tof(mu, v2, p) / p_t - n;
    return r;
  };
  Eigen::VectorXd q3(2);
  q3 << d0 / 2, d0 * std::sqrt(3.0) / 2;
  q3 = newton_solve(v3_residual, q3, d0, "tetrahedron third vertex");
  const Vec3 v3{q3[0], q3[1], 0};

  const auto v4_residual = [&](const Eigen::VectorXd& q) {
    const Vec3 p{q[0], q[1], q[2]};
    Eigen::VectorXd r(3);
    r[0] = tof(mu, v1, p) / p_t - n;
    r[1] = tof(mu, v2, p) / p_t - n;
    r[2] = tof(mu, v3, p) / p_t - n;
    return r;
  };
  Eigen::VectorXd q4(3);
  q4 << d0 / 2, d0 / (2 * std::sqrt(3.0)), d0 * std::sqrt(2.0 / 3.0);
  q4 = newton_solve(v4_residual, q4, d0, "tetrahedron fourth vertex");
  const Vec3 v4{q4[0], q4[1], q4[2]};

  SolverReport report;
  report.arrangement.metric = metric;
  report.arrangement.machines = {Machine{"V1", v1}, Machine{"V2", v2},
                                 Machine{"V3", v3}, Machine{"V4", v4}};
  report.arrangement.anchor = "V1";
  report.arrangement.anchor_proper_period = p_tau;
  report.coordinate_period = p_t;
  report.cycles_per_leg = n;
  const auto& ms = report.arrangement.machines;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      const double one_way = tof(mu, ms[i].position, ms[j].position) / p_t;
      report.channels.push_back(
          make_channel(ms[i].name, ms[j].name, one_way, 2 * n, true));
    }
  }
  fill_proper_periods(report);
  mirror_targets_from_channels(report);
  return report;
}

SolverReport extend_fifth(const SolverReport& tetra) {
  if (tetra.arrangement.machines.size() != 4) {
    throw ConfigError("extend_fifth expects a solved four-machine report");
  }
  const double mu = tetra.arrangement.metric.mu;
  const double p_t = tetra.coordinate_period;
  const double n = tetra.cycles_per_leg;
  require_cluster_inputs(p_t, n);
  const double d0 = n * kSpeedOfLight * p_t;
  const Vec3 v1 = tetra.arrangement.machines[0].position;
  const Vec3 v2 = tetra.arrangement.machines[1].position;
  const Vec3 v3 = tetra.arrangement.machines[2].position;
  const Vec3 v4 = tetra.arrangement.machines[3].position;

  const auto v5_residual = [&](const Eigen::VectorXd& q) {
    const Vec3 p{q[0], q[1], q[2]};
    Eigen::VectorXd r(3);
    r[0] = tof(mu, v1, p) / p_t - n;
    r[1] = tof(mu, v2, p) / p_t - n;
    r[2] = tof(mu, v3, p) / p_t - n;
    return r;
  };
  Eigen::VectorXd q5(3);
  q5 << v4.x, v4.y, -v4.z;
  q5 = newton_solve(v5_residual, q5, d0, "bipyramid fifth vertex");
  const Vec3 v5{q5[0], q5[1], q5[2]};

  SolverReport report = tetra;
  report.arrangement.machines.push_back(Machine{"V5", v5});
  const std::array<std::pair<const char*, Vec3>, 3> bases{
      {{"V1", v1}, {"V2", v2}, {"V3", v3}}};
  for (const auto& [name, base] : bases) {
    const double one_way = tof(mu, base, v5) / p_t;
    report.channels.push_back(make_channel(name, "V5", one_way, 2 * n, true));
  }
  // The apex-to-apex channel is measured, not enforced. Its naive flat
  // expectation is the regular-bipyramid apex separation, 2 sqrt(2/3) legs;
  // in a curved chart the achieved echo deviates from it.
  const double apex_one_way = tof(mu, v4, v5) / p_t;
  ChannelReport apex;
  apex.from = "V4";
  apex.to = "V5";
  apex.echo_count = 2 * apex_one_way;
  apex.target_echo_count = 4 * std::sqrt(2.0 / 3.0) * n;
  apex.residual = apex.echo_count - apex.target_echo_count;
  apex.phase = fold_phase(apex_one_way);
  apex.constrained = false;
  report.channels.push_back(apex);
  fill_proper_periods(report);
  mirror_targets_from_channels(report);
  return report;
}

SolverReport solve_five_complete(const geometry::Metric& metric, double p_tau,
                                 double cycles_per_leg,
                                 bool enforce_period_bound) {
  require_cluster_inputs(p_tau, cycles_per_leg);
  const double n = cycles_per_leg;
  const double c = kSpeedOfLight;
  if (enforce_period_bound) {
    const double strength =
        27.0 * metric.mu * c * c * n * n * n * p_tau * p_tau / 4.0;
    if (strength >= 1.0) {
      throw CurvatureTooStrongError(
          "cluster phases exceed the logical synchronization bound: "
          "27 G M N^3 p^2 / (4 r^3) >= 1");
    }
  }
  using Real = long double;
  const ClusterNumeric<Real> sol = cluster_pipeline<Real>(
      Real(metric.mu), Real(n), Real(p_tau));
  const double x1 = static_cast<double>(sol.x1);
  const double y0 = static_cast<double>(sol.y0);
  const double p_t = static_cast<double>(sol.p_t);

  SolverReport report;
  report.arrangement.metric = metric;
  report.arrangement.machines = cluster_machines(x1, y0);
  report.arrangement.anchor = "B1";
  report.arrangement.anchor_proper_period = p_tau;
  report.coordinate_period = p_t;
  report.cycles_per_leg = n;
  report.ring_phase_numeric = static_cast<double>(sol.phi);
  report.ring_phase_closed_form = static_cast<double>(
      geometry::cluster_closed_form<Real>(Real(metric.mu), Real(n),
                                          Real(p_tau)).phi);

  // Under the rotation symmetry about the x axis and the x mirror only three
  // flight times are distinct: B-B, B-A and the ring chord.
  const Real mu_r = Real(metric.mu);
  const Real rel = 100 * std::numeric_limits<Real>::epsilon();
  const Real x1r = sol.x1;
  const Real y0r = sol.y0;
  const Real t_bb = geometry::detail::null_tof_t<Real>(
      mu_r, {-x1r, 0, 0}, {x1r, 0, 0}, rel);
  const Real t_ba = geometry::detail::null_tof_t<Real>(
      mu_r, {x1r, 0, 0}, {0, y0r, 0}, rel);
  // Phases are extracted in extended precision: at large cycle counts the
  // round-trip reading is too coarse in a double to subtract the target.
  const auto leg_phase = [&](const ClusterChannel& ch) {
    if (ch.legs == 3) return static_cast<double>(sol.phi);
    if (ch.from == 0 && ch.to == 1) {
      return static_cast<double>(t_bb / sol.p_t - 2 * Real(n));
    }
    return static_cast<double>(t_ba / sol.p_t - 2 * Real(n));
  };
  const auto& ms = report.arrangement.machines;
  for (const ClusterChannel& ch : kClusterChannels) {
    ChannelReport row;
    row.from = ms[ch.from].name;
    row.to = ms[ch.to].name;
    row.target_echo_count = 2.0 * ch.legs * n;
    const double phi_ch = leg_phase(ch);
    row.echo_count = row.target_echo_count + 2 * phi_ch;
    row.residual = 2 * phi_ch;
    row.phase = fold_phase(phi_ch);
    row.constrained = ch.legs == 2;
    report.channels.push_back(row);
  }
  fill_proper_periods(report);
  mirror_targets_from_channels(report);
  return report;
}

SolverReport solve_five_complete(double mass_kg, double distance_m,
                                 double cycles_per_leg, double p_tau,
                                 bool enforce_period_bound) {
  return solve_five_complete(geometry::Metric::around_mass(mass_kg, distance_m),
                             p_tau, cycles_per_leg, enforce_period_bound);
}

SolverReport solve_five_nine_null(const geometry::Metric& metric, double p_tau,
                                  double cycles_per_leg) {
  require_cluster_inputs(p_tau, cycles_per_leg);
  const double mu = metric.mu;
  const double n = cycles_per_leg;
  const auto g = geometry::cluster_closed_form<double>(mu, n, p_tau);
  const double s0 = n * kSpeedOfLight * p_tau;

  // Symmetric-reduced unknowns (x1, x2, xa, ya, yc, zc):
  //   B1 = (x1,0,0), B2 = (-x2,0,0), A0 = (xa,ya,0), A1/A2 = (xa,yc,+-zc),
  // with the coordinate period anchored to B1's proper period. The z mirror
  // keeps the A1/A2 equations identical, leaving six distinct null-phase
  // conditions; the common A-plane offset xa supplies the sixth freedom.
  const auto period_of = [&](double x1) {
    return p_tau / std::sqrt(1.0 - 2 * mu * x1 * x1);
  };
  const auto residual = [&](const Eigen::VectorXd& q) {
    const double p_t = period_of(q[0]);
    const Vec3 b1{q[0], 0, 0};
    const Vec3 b2{-q[1], 0, 0};
    const Vec3 a0{q[2], q[3], 0};
    const Vec3 a1{q[2], q[4], q[5]};
    Eigen::VectorXd r(6);
    r[0] = tof(mu, b1, b2) / p_t - 2 * n;
    r[1] = tof(mu, b1, a0) / p_t - 2 * n;
    r[2] = tof(mu, b2, a0) / p_t - 2 * n;
    r[3] = tof(mu, b1, a1) / p_t - 2 * n;
    r[4] = tof(mu, b2, a1) / p_t - 2 * n;
    r[5] = tof(mu, a0, a1) / p_t - 3 * n;
    return r;
  };
  Eigen::VectorXd q(6);
  q << g.x_b1, g.x_b1, 0.0, g.y_a0, -g.y_a0 / 2, std::sqrt(3.0) / 2 * g.y_a0;
  q = newton_solve(residual, q, s0, "nine-null cluster");

  const double p_t = period_of(q[0]);
  SolverReport report;
  report.arrangement.metric = metric;
  report.arrangement.machines = {
      Machine{"B1", {q[0], 0, 0}},        Machine{"B2", {-q[1], 0, 0}},
      Machine{"A0", {q[2], q[3], 0}},     Machine{"A1", {q[2], q[4], q[5]}},
      Machine{"A2", {q[2], q[4], -q[5]}}};
  report.arrangement.anchor = "B1";
  report.arrangement.anchor_proper_period = p_tau;
  report.coordinate_period = p_t;
  report.cycles_per_leg = n;
  const auto& ms = report.arrangement.machines;
  for (const ClusterChannel& ch : kClusterChannels) {
    const double one_way =
        tof(mu, ms[ch.from].position, ms[ch.to].position) / p_t;
    const bool forced = ch.from == 3 && ch.to == 4;
    report.channels.push_back(make_channel(ms[ch.from].name, ms[ch.to].name,
                                           one_way, 2.0 * ch.legs * n,
                                           !forced));
  }
  fill_proper_periods(report);
  mirror_targets_from_channels(report);
  return report;
}

// ---------------------------------------------------------------------------
// Phase-distribution optimizer.
// ---------------------------------------------------------------------------

namespace {

/// Five-cluster state in scaled coordinates: fifteen machine coordinates in
/// units of the leg scale and the coordinate period in units of its base
/// value. Phases are evaluated with a relaxed quadrature tolerance; the
/// optimizer compares phases of order the closed-form ring phase, far above
/// the integration noise.
struct DistributionContext {
  double mu = 0.0;
  double n = 0.0;
  double d0 = 0.0;
  double p_t0 = 0.0;
  static constexpr double kRelTol = 1e-10;

  Vec3 position(const Eigen::VectorXd& v, int machine) const {
    return Vec3{v[3 * machine] * d0, v[3 * machine + 1] * d0,
                v[3 * machine + 2] * d0};
  }
  double period(const Eigen::VectorXd& v) const { return v[15] * p_t0; }

  double phase(const Eigen::VectorXd& v, const ClusterChannel& ch) const {
    const double t = geometry::detail::null_tof_t<double>(
        mu, position(v, ch.from), position(v, ch.to), kRelTol);
    return t / period(v) - ch.legs * n;
  }
  Eigen::VectorXd phases(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(10);
    for (int i = 0; i < 10; ++i) out[i] = phase(v, kClusterChannels[i]);
    return out;
  }
};

/// Projects the state onto the manifold where the first `constrained`
/// canonical channels carry null phase and machine 0 keeps the anchored
/// proper period, with min-norm Gauss-Newton steps. Without the anchor row
/// the optimizer could shrink the whole cluster (and the curvature mismatch
/// with it) by rescaling positions and period together. The Jacobian is
/// cached and refreshed only when the state drifts, which keeps the
/// contraction intact for the small residuals involved here.
class NullProjector {
 public:
  NullProjector(const DistributionContext& ctx, double p_tau, int constrained)
      : ctx_(ctx), p_tau_(p_tau), constrained_(constrained) {}

  bool project(Eigen::VectorXd& v) {
    for (int iteration = 0; iteration < 30; ++iteration) {
      const Eigen::VectorXd r = residuals(v);
      if (r.cwiseAbs().maxCoeff() < 1e-10) return true;
      refresh_if_stale(v);
      const Eigen::MatrixXd jt = jacobian_.transpose();
      Eigen::MatrixXd gram = jacobian_ * jt;
      gram.diagonal().array() += 1e-14 * gram.trace();
      v -= jt * gram.ldlt().solve(r);
    }
    return false;
  }

 private:
  Eigen::VectorXd residuals(const Eigen::VectorXd& v) const {
    Eigen::VectorXd r(constrained_ + 1);
    r[0] = ctx_.period(v) *
               std::sqrt(geometry::detail::time_factor(ctx_.mu,
                                                       ctx_.position(v, 0))) /
               p_tau_ -
           1.0;
    for (int i = 0; i < constrained_; ++i) {
      r[i + 1] = ctx_.phase(v, kClusterChannels[i]);
    }
    return r;
  }

  void refresh_if_stale(const Eigen::VectorXd& v) {
    if (jacobian_.rows() == constrained_ + 1 &&
        (v - built_at_).cwiseAbs().maxCoeff() < 5e-3) {
      return;
    }
    const double h = 1e-7;
    jacobian_.resize(constrained_ + 1, 16);
    const Eigen::VectorXd r0 = residuals(v);
    for (int col = 0; col < 15; ++col) {
      Eigen::VectorXd vp = v;
      vp[col] += h;
      jacobian_.col(col) = (residuals(vp) - r0) / h;
    }
    // The period column is analytic: the anchor row is proportional to the
    // scaled period, and phase = T / (p_t0 w) - legs N.
    jacobian_(0, 15) = (r0[0] + 1.0) / v[15];
    for (int i = 0; i < constrained_; ++i) {
      jacobian_(i + 1, 15) =
          -(r0[i + 1] + kClusterChannels[i].legs * ctx_.n) / v[15];
    }
    built_at_ = v;
  }

  const DistributionContext& ctx_;
  double p_tau_;
  int constrained_;
  Eigen::MatrixXd jacobian_;
  Eigen::VectorXd built_at_;
};

double distribution_objective(const DistributionContext& ctx,
                              const Eigen::VectorXd& v, int constrained) {
  double worst = 0.0;
  for (int i = constrained; i < 10; ++i) {
    worst = std::max(worst, std::abs(ctx.phase(v, kClusterChannels[i])));
  }
  return worst;
}

}  // namespace

std::vector<double> distribute_phases(const geometry::Metric& metric,
                                      double p_tau, double cycles_per_leg) {
  require_cluster_inputs(p_tau, cycles_per_leg);
  const ClusterNumeric<double> base =
      cluster_pipeline<double>(metric.mu, cycles_per_leg, p_tau);
  DistributionContext ctx;
  ctx.mu = metric.mu;
  ctx.n = cycles_per_leg;
  ctx.d0 = cycles_per_leg * kSpeedOfLight * base.p_t;
  ctx.p_t0 = base.p_t;

  Eigen::VectorXd symmetric(16);
  {
    const std::vector<Machine> ms = cluster_machines(base.x1, base.y0);
    for (int i = 0; i < 5; ++i) {
      symmetric[3 * i] = ms[i].position.x / ctx.d0;
      symmetric[3 * i + 1] = ms[i].position.y / ctx.d0;
      symmetric[3 * i + 2] = ms[i].position.z / ctx.d0;
    }
    symmetric[15] = 1.0;
  }

  std::vector<double> achieved;
  Eigen::VectorXd warm = symmetric;
  for (int m = 1; m <= 10; ++m) {
    const int constrained = 10 - m;
    NullProjector projector(ctx, p_tau, constrained);
    // The warm start carries the previous optimum: the newly released
    // channel enters with null phase, so this start already matches the
    // previous objective and the achieved sequence is non-increasing.
    Eigen::VectorXd best = warm;
    if (!projector.project(best)) {
      throw SolverError("phase distribution: projection lost the manifold");
    }
    Eigen::VectorXd candidate = symmetric;
    if (projector.project(candidate) &&
        distribution_objective(ctx, candidate, constrained) <
            distribution_objective(ctx, best, constrained)) {
      best = candidate;
    }
    double objective = distribution_objective(ctx, best, constrained);
    double step = 1e-3;
    int passes = 0;
    while (step > 1e-8 && passes < 120) {
      ++passes;
      bool improved = false;
      for (int dir = 0; dir < 16; ++dir) {
        for (const double sign : {1.0, -1.0}) {
          Eigen::VectorXd trial = best;
          trial[dir] += sign * step;
          if (!projector.project(trial)) continue;
          // Stay in a trust region around the symmetric cluster: the curve
          // compares distributions over one configuration class, and far
          // excursions could instead re-engineer the cluster shape.
          if ((trial - symmetric).cwiseAbs().maxCoeff() > 0.02) continue;
          const double value = distribution_objective(ctx, trial, constrained);
          if (value < objective - 1e-13 * (1 + objective)) {
            best = trial;
            objective = value;
            improved = true;
          }
        }
      }
      if (!improved) step /= 2;
    }
    achieved.push_back(objective);
    warm = best;
  }
  return achieved;
}

double min_proper_period(double mass_kg, double distance_m,
                         double leg_length_m) {
  if (!(mass_kg >= 0.0) || !(distance_m > 0.0) || !(leg_length_m > 0.0)) {
    throw DomainError(
        "mass must be nonnegative and distances positive for the period bound");
  }
  const double c = kSpeedOfLight;
  const double l3 = leg_length_m * leg_length_m * leg_length_m;
  const double r3 = distance_m * distance_m * distance_m;
  return 27.0 * kGravitationalConstant * mass_kg * l3 / (32.0 * r3 * c * c * c);
}

double max_bit_rate(double proper_period, double bits_per_cycle) {
  if (!(proper_period > 0.0) || !(bits_per_cycle > 0.0)) {
    throw DomainError("bit rate needs a positive period and bits per cycle");
  }
  return bits_per_cycle / proper_period;
}

namespace {

FreezeReport freeze_rows(const SolverReport& report, bool include_measured) {
  const auto& machines = report.arrangement.machines;
  if (machines.size() < 2) {
    throw SolverError("freeze test needs at least two machines");
  }
  if (!(report.coordinate_period > 0.0) || !(report.cycles_per_leg > 0.0)) {
    throw SolverError("freeze test needs a solved report");
  }
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  for (const ChannelReport& ch : report.channels) {
    if (!include_measured && !ch.constrained) continue;
    rows.emplace_back(machine_index(machines, ch.from),
                      machine_index(machines, ch.to));
  }
  if (rows.empty()) {
    throw SolverError("freeze test needs at least one recorded channel");
  }
  const double mu = report.arrangement.metric.mu;
  const double p_t = report.coordinate_period;
  const double d0 = report.cycles_per_leg * kSpeedOfLight * p_t;
  // Step choice balances quadrature noise against the cubic terms of the
  // flight-time function; both land the ratio floor near 1e-9, well below
  // the frozen threshold.
  const double h = 1e-5 * d0;
  const auto echo = [&](const std::vector<Vec3>& pos, std::size_t a,
                        std::size_t b) {
    return 2 * tof(mu, pos[a], pos[b]) / p_t;
  };
  std::vector<Vec3> positions;
  for (const Machine& m : machines) positions.push_back(m.position);

  Eigen::MatrixXd jacobian(static_cast<Eigen::Index>(rows.size()),
                           static_cast<Eigen::Index>(3 * machines.size()));
  for (std::size_t mi = 0; mi < machines.size(); ++mi) {
    for (int axis = 0; axis < 3; ++axis) {
      std::vector<Vec3> plus = positions;
      std::vector<Vec3> minus = positions;
      double* pp = axis == 0 ? &plus[mi].x : axis == 1 ? &plus[mi].y
                                                       : &plus[mi].z;
      double* pm = axis == 0 ? &minus[mi].x : axis == 1 ? &minus[mi].y
                                                        : &minus[mi].z;
      *pp += h;
      *pm -= h;
      for (std::size_t row = 0; row < rows.size(); ++row) {
        jacobian(static_cast<Eigen::Index>(row),
                 static_cast<Eigen::Index>(3 * mi + axis)) =
            (echo(plus, rows[row].first, rows[row].second) -
             echo(minus, rows[row].first, rows[row].second)) /
            (2 * h);
      }
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian);
  const auto& sigma = svd.singularValues();
  if (!(sigma[0] > 0.0)) {
    throw SolverError("freeze test: degenerate arrangement, zero sensitivity");
  }
  FreezeReport out;
  out.singular_value_ratio = sigma[sigma.size() - 1] / sigma[0];
  out.frozen = out.singular_value_ratio < kFrozenRatioThreshold;
  out.sensitivity.resize(rows.size());
  for (std::size_t row = 0; row < rows.size(); ++row) {
    for (Eigen::Index col = 0; col < jacobian.cols(); ++col) {
      out.sensitivity[row].push_back(
          jacobian(static_cast<Eigen::Index>(row), col));
    }
  }
  return out;
}

}  // namespace

FreezeReport freeze_test(const SolverReport& report) {
  return freeze_rows(report, false);
}

FreezeReport freeze_test_complete(const SolverReport& report) {
  return freeze_rows(report, true);
}

nlohmann::json arrangement_to_json(const Arrangement& arrangement) {
  nlohmann::json machines = nlohmann::json::array();
  for (const Machine& m : arrangement.machines) {
    machines.push_back({{"name", m.name},
                        {"position", {m.position.x, m.position.y,
                                      m.position.z}}});
  }
  nlohmann::json targets = nlohmann::json::array();
  for (const ChannelTarget& t : arrangement.targets) {
    targets.push_back({{"from", t.from},
                       {"to", t.to},
                       {"echo_count", t.echo_count},
                       {"phase", t.phase}});
  }
  return nlohmann::json{{"metric", {{"mu", arrangement.metric.mu}}},
                        {"machines", machines},
                        {"anchor", arrangement.anchor},
                        {"anchor_proper_period",
                         arrangement.anchor_proper_period},
                        {"targets", targets}};
}

Arrangement arrangement_from_json(const nlohmann::json& j) {
  try {
    Arrangement arrangement;
    arrangement.metric =
        geometry::Metric::weak_field(j.at("metric").at("mu").get<double>());
    for (const auto& m : j.at("machines")) {
      const auto& p = m.at("position");
      arrangement.machines.push_back(
          Machine{m.at("name").get<std::string>(),
                  Vec3{p.at(0).get<double>(), p.at(1).get<double>(),
                       p.at(2).get<double>()}});
    }
    arrangement.anchor = j.at("anchor").get<std::string>();
    arrangement.anchor_proper_period =
        j.at("anchor_proper_period").get<double>();
    for (const auto& t : j.value("targets", nlohmann::json::array())) {
      arrangement.targets.push_back(
          ChannelTarget{t.at("from").get<std::string>(),
                        t.at("to").get<std::string>(),
                        t.at("echo_count").get<double>(),
                        t.value("phase", 0.0)});
    }
    if (!arrangement.anchor.empty()) {
      machine_index(arrangement.machines, arrangement.anchor);
    }
    return arrangement;
  } catch (const nlohmann::json::exception& error) {
    throw ConfigError(std::string("malformed arrangement: ") + error.what());
  }
}

nlohmann::json report_to_json(const SolverReport& report) {
  nlohmann::json channels = nlohmann::json::array();
  for (const ChannelReport& ch : report.channels) {
    channels.push_back({{"from", ch.from},
                        {"to", ch.to},
                        {"echo_count", ch.echo_count},
                        {"phase", ch.phase},
                        {"target_echo_count", ch.target_echo_count},
                        {"residual", ch.residual},
                        {"constrained", ch.constrained}});
  }
  return nlohmann::json{
      {"arrangement", arrangement_to_json(report.arrangement)},
      {"coordinate_period", report.coordinate_period},
      {"cycles_per_leg", report.cycles_per_leg},
      {"channels", channels},
      {"proper_periods", report.proper_periods},
      {"ring_phase_numeric", report.ring_phase_numeric},
      {"ring_phase_closed_form", report.ring_phase_closed_form}};
}

nlohmann::json freeze_report_to_json(const FreezeReport& report) {
  return nlohmann::json{{"frozen", report.frozen},
                        {"singular_value_ratio", report.singular_value_ratio},
                        {"sensitivity", report.sensitivity}};
}

std::string report_to_csv(const SolverReport& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "from,to,target_echo_count,echo_count,residual,phase,constrained\n";
  for (const ChannelReport& ch : report.channels) {
    out << ch.from << ',' << ch.to << ',' << ch.target_echo_count << ','
        << ch.echo_count << ',' << ch.residual << ',' << ch.phase << ','
        << (ch.constrained ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace chronolace::arrangements
