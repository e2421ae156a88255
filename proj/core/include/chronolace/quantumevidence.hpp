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

#ifndef CHRONOLACE_QUANTUMEVIDENCE_HPP_
#define CHRONOLACE_QUANTUMEVIDENCE_HPP_

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "chronolace/errors.hpp"

namespace chronolace::quantum {

using Complex = std::complex<double>;

/// A square complex matrix in row-major nested-vector form. The public API
/// stays free of linear-algebra library types; validation and evaluation use
/// one internally.
using Matrix = std::vector<std::vector<Complex>>;

/// Row-sum tolerance for probability tables.
inline constexpr double kRowSumTolerance = 1e-12;

/// Tolerance for Hermiticity, positivity, unit trace, and POVM completeness.
inline constexpr double kModelTolerance = 1e-10;

/// A parametrized probability measure: for each knob setting, a probability
/// row over the outcome domain.
struct PPM {
  std::vector<std::string> knobs;
  std::vector<std::string> outcomes;
  std::vector<std::vector<double>> table;  ///< knobs x outcomes
};

/// Checks table shape, entry ranges, and row sums; throws
/// ModelValidationError on violation.
void validate(const PPM& ppm);

/// A finite-dimensional model: per knob, a density matrix and a POVM over
/// the outcome domain. The same knob selects both the preparation and the
/// measurement.
struct QuantumModel {
  std::size_t dim = 0;
  std::vector<std::string> knobs;
  std::vector<std::string> outcomes;
  std::vector<Matrix> rho;                ///< per knob
  std::vector<std::vector<Matrix>> povm;  ///< per knob, per outcome
};

/// Checks dimensions, Hermiticity, positive semidefiniteness, unit traces,
/// and POVM completeness; throws ModelValidationError on violation.
void validate(const QuantumModel& model);

/// Evaluates the model through the trace rule: row(k)[w] = tr(rho(k) M(k,w)).
/// The model is validated first; row sums inherit POVM completeness.
PPM evaluate_ppm(const QuantumModel& model);

/// Largest total-variation distance between corresponding rows, maximized
/// over the shared knob domain. Outcome domains may differ; missing outcomes
/// count as probability zero. Mismatched knob domains throw DomainError.
double metric_deviation(const PPM& p, const PPM& q);

struct DistinctModels {
  QuantumModel model1;
  QuantumModel model2;
  std::string extension_knob;
  double extended_deviation = 0.0;
};

/// Builds two valid models that reproduce the given two-outcome PPM exactly
/// on its knob domain yet disagree on one added measurement knob. A PPM of
/// fair-coin rows gets the pure-versus-mixed pair (deviation exactly 1/2);
/// general two-outcome rows get a dimension-2 pure model against a
/// dimension-4 ancilla model separated by a rotated product measurement.
/// PPMs with other outcome counts throw UnsupportedError.
DistinctModels construct_distinct_models(const PPM& ppm);

/// JSON round trips; complex entries serialize as [re, im] pairs.
/// Malformed documents throw ConfigError.
nlohmann::json ppm_to_json(const PPM& ppm);
PPM ppm_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const QuantumModel& model);
QuantumModel model_from_json(const nlohmann::json& j);

}  // namespace chronolace::quantum

#endif  // CHRONOLACE_QUANTUMEVIDENCE_HPP_
