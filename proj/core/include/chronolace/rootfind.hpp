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

#ifndef CHRONOLACE_ROOTFIND_HPP_
#define CHRONOLACE_ROOTFIND_HPP_

#include <cmath>
#include <limits>
#include <utility>

#include "chronolace/errors.hpp"

namespace chronolace::rootfind {

/// Finds a root of f inside [lo, hi] given that f(lo) and f(hi) bracket zero.
///
/// Uses a safeguarded secant step that falls back to bisection whenever the
/// secant iterate would leave the bracket or fails to shrink it, so
/// convergence is guaranteed for continuous f. Throws SolverError when the
/// endpoints do not bracket a sign change.
template <typename Real, typename F>
Real find_root_bracketed(F&& f, Real lo, Real hi, Real tol,
                         int max_iterations = 200) {
  Real flo = f(lo);
  Real fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw SolverError("root bracket endpoints have the same sign");
  }
  for (int i = 0; i < max_iterations; ++i) {
    Real mid = (lo + hi) / 2;
    // Prefer the secant estimate when it lands strictly inside the bracket;
    // every other iteration bisects regardless so the bracket provably halves
    // and false-position stagnation cannot occur.
    const Real denominator = fhi - flo;
    if (i % 2 == 0 && denominator != 0) {
      const Real secant = lo - flo * (hi - lo) / denominator;
      if (secant > lo && secant < hi) mid = secant;
    }
    const Real fmid = f(mid);
    if (fmid == 0 || hi - lo <= tol) return mid;
    if ((fmid > 0) == (flo > 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
  }
  // A stalled secant can pin one endpoint; the bisection fallback keeps the
  // bracket shrinking, so reaching here means tol was below resolution.
  if (hi - lo <= tol * 4 + std::numeric_limits<Real>::epsilon() * std::abs(hi) * 8) {
    return (lo + hi) / 2;
  }
  throw SolverError("bracketed root search failed to converge");
}

}  // namespace chronolace::rootfind

#endif  // CHRONOLACE_ROOTFIND_HPP_
