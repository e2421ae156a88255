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

#ifndef CHRONOLACE_QUADRATURE_HPP_
#define CHRONOLACE_QUADRATURE_HPP_

#include <cmath>
#include <limits>
#include <utility>

#include "chronolace/errors.hpp"

namespace chronolace::quadrature {

namespace detail {

// Gauss-Kronrod 15(7) abscissae/weights on [-1, 1], positive half. The
// literals carry 33 significant digits so the rule is exact for long double
// instantiations as well.
template <typename Real>
struct Gk15 {
  static constexpr int kGaussPoints = 4;
  static constexpr Real kNodes[8] = {
      Real(0.991455371120812639206854697526329L),
      Real(0.949107912342758524526189684047851L),
      Real(0.864864423359769072789712788640926L),
      Real(0.741531185599394439863864773280788L),
      Real(0.586087235467691130294144838258730L),
      Real(0.405845151377397166906606412076961L),
      Real(0.207784955007898467600689403773245L),
      Real(0.0L)};
  static constexpr Real kKronrodWeights[8] = {
      Real(0.022935322010529224963732008058970L),
      Real(0.063092092629978553290700663189204L),
      Real(0.104790010322250183839876322541518L),
      Real(0.140653259715525918745189590510238L),
      Real(0.169004726639267902826583426598550L),
      Real(0.190350578064785409913256402421014L),
      Real(0.204432940075298892414161999234649L),
      Real(0.209482141084727828012999174891714L)};
  // Gauss-7 weights, matched to kNodes[1], kNodes[3], kNodes[5], kNodes[7].
  static constexpr Real kGaussWeights[4] = {
      Real(0.129484966168869693270611432679082L),
      Real(0.279705391489276667901467771423780L),
      Real(0.381830050505118944950369775488975L),
      Real(0.417959183673469387755102040816327L)};
};

template <typename Real, typename F>
void gk15_panel(F& f, Real a, Real b, Real& kronrod, Real& error) {
  using Rule = Gk15<Real>;
  const Real half = (b - a) / 2;
  const Real mid = (a + b) / 2;
  Real gauss = 0;
  kronrod = 0;
  for (int i = 0; i < 8; ++i) {
    const Real offset = half * Rule::kNodes[i];
    const Real fs = (i == 7) ? f(mid) : f(mid - offset) + f(mid + offset);
    kronrod += Rule::kKronrodWeights[i] * fs;
    if (i % 2 == 1) gauss += Rule::kGaussWeights[i / 2] * fs;
  }
  kronrod *= half;
  gauss *= half;
  error = std::abs(kronrod - gauss);
}

template <typename Real, typename F>
Real integrate_recursive(F& f, Real a, Real b, Real tol, int depth) {
  Real value, error;
  gk15_panel(f, a, b, value, error);
  if (error <= tol || error <= std::abs(value) * std::numeric_limits<Real>::epsilon() * 8) {
    return value;
  }
  if (depth <= 0) {
    throw NumericalError("adaptive quadrature failed to converge to the requested tolerance");
  }
  const Real mid = (a + b) / 2;
  return integrate_recursive(f, a, mid, tol / 2, depth - 1) +
         integrate_recursive(f, mid, b, tol / 2, depth - 1);
}

}  // namespace detail

/// Integrates f over [a, b] with an adaptive Gauss-Kronrod 15(7) rule.
///
/// The tolerance is relative to a first whole-interval estimate (plus a tiny
/// absolute floor so that zero-valued integrals terminate). Throws
/// NumericalError if the recursion depth is exhausted before the local error
/// estimates drop below the budget.
template <typename Real, typename F>
Real integrate_adaptive(F&& f, Real a, Real b, Real rel_tol, int max_depth = 48) {
  Real estimate, error;
  detail::gk15_panel(f, a, b, estimate, error);
  const Real scale = std::max(std::abs(estimate), std::numeric_limits<Real>::min());
  const Real tol = scale * rel_tol;
  if (error <= tol) return estimate;
  const Real mid = (a + b) / 2;
  return detail::integrate_recursive(f, a, mid, tol / 2, max_depth) +
         detail::integrate_recursive(f, mid, b, tol / 2, max_depth);
}

}  // namespace chronolace::quadrature

#endif  // CHRONOLACE_QUADRATURE_HPP_
