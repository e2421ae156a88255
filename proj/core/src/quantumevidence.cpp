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

#include "chronolace/quantumevidence.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <utility>

#include <Eigen/Dense>

namespace chronolace::quantum {
namespace {

Eigen::MatrixXcd to_eigen(const Matrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

void require_square(const Matrix& m, std::size_t dim, const std::string& what) {
  if (m.size() != dim) {
    throw ModelValidationError(what + " is not " + std::to_string(dim) + "x" +
                               std::to_string(dim));
  }
  for (const auto& row : m) {
    if (row.size() != dim) {
      throw ModelValidationError(what + " is not square");
    }
  }
}

void require_hermitian_psd(const Eigen::MatrixXcd& m, const std::string& what,
                           bool unit_trace) {
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kModelTolerance) {
    throw ModelValidationError(what + " is not Hermitian (deviation " +
                               std::to_string(herm) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.eigenvalues().minCoeff() < -kModelTolerance) {
    throw ModelValidationError(what + " is not positive semidefinite");
  }
  if (unit_trace && std::abs(m.trace().real() - 1.0) > kModelTolerance) {
    throw ModelValidationError(what + " does not have unit trace");
  }
}

Matrix outer(const std::vector<Complex>& v) {
  const std::size_t n = v.size();
  Matrix m(n, std::vector<Complex>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m[i][j] = v[i] * std::conj(v[j]);
    }
  }
  return m;
}

Matrix identity(std::size_t n) {
  Matrix m(n, std::vector<Complex>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  Matrix m = a;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) m[i][j] -= b[i][j];
  }
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  Matrix m(na * nb, std::vector<Complex>(na * nb));
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < na; ++j) {
      for (std::size_t k = 0; k < nb; ++k) {
        for (std::size_t l = 0; l < nb; ++l) {
          m[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
        }
      }
    }
  }
  return m;
}

bool is_fair_coin(const PPM& ppm) {
  for (const auto& row : ppm.table) {
    if (row[0] != 0.5 || row[1] != 0.5) return false;
  }
  return true;
}

std::string unique_knob_label(const PPM& ppm, std::string base) {
  while (std::find(ppm.knobs.begin(), ppm.knobs.end(), base) !=
         ppm.knobs.end()) {
    base += "'";
  }
  return base;
}

}  // namespace

void validate(const PPM& ppm) {
  if (ppm.knobs.empty()) {
    throw ModelValidationError("probability table has no knobs");
  }
  if (ppm.outcomes.empty()) {
    throw ModelValidationError("probability table has no outcomes");
  }
  if (ppm.table.size() != ppm.knobs.size()) {
    throw ModelValidationError("probability table has one row per knob");
  }
  for (std::size_t k = 0; k < ppm.table.size(); ++k) {
    const auto& row = ppm.table[k];
    if (row.size() != ppm.outcomes.size()) {
      throw ModelValidationError("row for knob '" + ppm.knobs[k] +
                                 "' does not span the outcome domain");
    }
    double sum = 0.0;
    for (const double p : row) {
      if (p < -kRowSumTolerance || p > 1.0 + kRowSumTolerance) {
        throw ModelValidationError("probability outside [0, 1] for knob '" +
                                   ppm.knobs[k] + "'");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ModelValidationError("row for knob '" + ppm.knobs[k] +
                                 "' does not sum to one");
    }
  }
}

void validate(const QuantumModel& model) {
  if (model.dim == 0) {
    throw ModelValidationError("model dimension must be positive");
  }
  if (model.knobs.empty()) {
    throw ModelValidationError("model has no knobs");
  }
  if (model.rho.size() != model.knobs.size() ||
      model.povm.size() != model.knobs.size()) {
    throw ModelValidationError(
        "model needs one state and one measurement per knob");
  }
  if (model.outcomes.empty()) {
    throw ModelValidationError("model has no outcomes");
  }
  for (std::size_t k = 0; k < model.knobs.size(); ++k) {
    const std::string state = "state for knob '" + model.knobs[k] + "'";
    require_square(model.rho[k], model.dim, state);
    require_hermitian_psd(to_eigen(model.rho[k]), state, /*unit_trace=*/true);

    if (model.povm[k].size() != model.outcomes.size()) {
      throw ModelValidationError("measurement for knob '" + model.knobs[k] +
                                 "' does not span the outcome domain");
    }
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(model.dim),
        static_cast<Eigen::Index>(model.dim));
    for (std::size_t w = 0; w < model.povm[k].size(); ++w) {
      const std::string effect = "effect '" + model.outcomes[w] +
                                 "' for knob '" + model.knobs[k] + "'";
      require_square(model.povm[k][w], model.dim, effect);
      const Eigen::MatrixXcd e = to_eigen(model.povm[k][w]);
      require_hermitian_psd(e, effect, /*unit_trace=*/false);
      sum += e;
    }
    const double completeness =
        (sum - Eigen::MatrixXcd::Identity(sum.rows(), sum.cols()))
            .cwiseAbs()
            .maxCoeff();
    if (completeness > kModelTolerance) {
      throw ModelValidationError("measurement for knob '" + model.knobs[k] +
                                 "' does not sum to the identity");
    }
  }
}

PPM evaluate_ppm(const QuantumModel& model) {
  validate(model);
  PPM ppm;
  ppm.knobs = model.knobs;
  ppm.outcomes = model.outcomes;
  ppm.table.reserve(model.knobs.size());
  for (std::size_t k = 0; k < model.knobs.size(); ++k) {
    const Eigen::MatrixXcd rho = to_eigen(model.rho[k]);
    std::vector<double> row;
    row.reserve(model.outcomes.size());
    for (std::size_t w = 0; w < model.outcomes.size(); ++w) {
      const Complex value = (rho * to_eigen(model.povm[k][w])).trace();
      if (std::abs(value.imag()) > kModelTolerance) {
        throw ModelValidationError("trace rule produced a complex probability");
      }
      row.push_back(value.real());
    }
    ppm.table.push_back(std::move(row));
  }
  return ppm;
}

double metric_deviation(const PPM& p, const PPM& q) {
  validate(p);
  validate(q);
  if (std::set<std::string>(p.knobs.begin(), p.knobs.end()) !=
      std::set<std::string>(q.knobs.begin(), q.knobs.end())) {
    throw DomainError("probability tables cover different knob domains");
  }
  std::map<std::string, std::size_t> q_index;
  for (std::size_t i = 0; i < q.knobs.size(); ++i) q_index[q.knobs[i]] = i;

  // Lift both rows to the union of the outcome domains, missing entries 0.
  std::vector<std::string> domain = p.outcomes;
  for (const auto& w : q.outcomes) {
    if (std::find(domain.begin(), domain.end(), w) == domain.end()) {
      domain.push_back(w);
    }
  }
  const auto lifted = [&domain](const std::vector<double>& row,
                                const std::vector<std::string>& outcomes) {
    std::vector<double> out(domain.size(), 0.0);
    for (std::size_t w = 0; w < outcomes.size(); ++w) {
      out[static_cast<std::size_t>(
          std::find(domain.begin(), domain.end(), outcomes[w]) -
          domain.begin())] = row[w];
    }
    return out;
  };

  double worst = 0.0;
  for (std::size_t k = 0; k < p.knobs.size(); ++k) {
    const auto pr = lifted(p.table[k], p.outcomes);
    const auto qr = lifted(q.table[q_index[p.knobs[k]]], q.outcomes);
    double l1 = 0.0;
    for (std::size_t w = 0; w < domain.size(); ++w) {
      l1 += std::abs(pr[w] - qr[w]);
    }
    worst = std::max(worst, l1 / 2.0);
  }
  return worst;
}

DistinctModels construct_distinct_models(const PPM& ppm) {
  validate(ppm);
  if (ppm.outcomes.size() != 2) {
    throw UnsupportedError(
        "distinct-model construction covers two-outcome tables only");
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const std::vector<Complex> plus{inv_sqrt2, inv_sqrt2};
  const std::vector<Complex> minus{inv_sqrt2, -inv_sqrt2};
  const std::vector<Complex> zero{1.0, 0.0};
  const std::vector<Complex> one{0.0, 1.0};

  DistinctModels result;
  QuantumModel& m1 = result.model1;
  QuantumModel& m2 = result.model2;
  m1.outcomes = ppm.outcomes;
  m2.outcomes = ppm.outcomes;

  if (is_fair_coin(ppm)) {
    // Pure state read in a conjugate basis versus the maximally mixed state:
    // indistinguishable on every coin row, separated by measuring the pure
    // state's own basis.
    m1.dim = 2;
    m2.dim = 2;
    const std::vector<Matrix> x_basis{outer(plus), outer(minus)};
    const std::vector<Matrix> z_basis{outer(zero), outer(one)};
    Matrix mixed = identity(2);
    for (auto& row : mixed) {
      for (auto& v : row) v *= 0.5;
    }
    for (std::size_t k = 0; k < ppm.knobs.size(); ++k) {
      m1.knobs.push_back(ppm.knobs[k]);
      m1.rho.push_back(outer(zero));
      m1.povm.push_back(x_basis);
      m2.knobs.push_back(ppm.knobs[k]);
      m2.rho.push_back(mixed);
      m2.povm.push_back(z_basis);
    }
    result.extension_knob = unique_knob_label(ppm, "measure-Z");
    m1.knobs.push_back(result.extension_knob);
    m1.rho.push_back(m1.rho.front());
    m1.povm.push_back(z_basis);
    m2.knobs.push_back(result.extension_knob);
    m2.rho.push_back(m2.rho.front());
    m2.povm.push_back(z_basis);
  } else {
    // General two-outcome rows: a rank-one superposition against a
    // dimension-4 classical mixture with an ancilla. Both reproduce every
    // row through their own computational measurement; a rotated product
    // measurement tells them apart.
    m1.dim = 2;
    m2.dim = 4;
    const std::vector<Matrix> z_basis{outer(zero), outer(one)};
    const Matrix eye2 = identity(2);
    const std::vector<Matrix> z_times_identity{kron(outer(zero), eye2),
                                               kron(outer(one), eye2)};
    for (std::size_t k = 0; k < ppm.knobs.size(); ++k) {
      const double p = std::clamp(ppm.table[k][0], 0.0, 1.0);
      const std::vector<Complex> psi{std::sqrt(p), std::sqrt(1.0 - p)};
      m1.knobs.push_back(ppm.knobs[k]);
      m1.rho.push_back(outer(psi));
      m1.povm.push_back(z_basis);

      Matrix classical(2, std::vector<Complex>(2, 0.0));
      classical[0][0] = p;
      classical[1][1] = 1.0 - p;
      m2.knobs.push_back(ppm.knobs[k]);
      m2.rho.push_back(kron(classical, outer(zero)));
      m2.povm.push_back(z_times_identity);
    }
    result.extension_knob = unique_knob_label(ppm, "rotated-product");
    const Matrix plus2 = outer(plus);
    m1.knobs.push_back(result.extension_knob);
    m1.rho.push_back(m1.rho.front());
    m1.povm.push_back({plus2, subtract(identity(2), plus2)});
    const Matrix plus4 = kron(plus2, plus2);
    m2.knobs.push_back(result.extension_knob);
    m2.rho.push_back(m2.rho.front());
    m2.povm.push_back({plus4, subtract(identity(4), plus4)});
  }

  result.extended_deviation =
      metric_deviation(evaluate_ppm(m1), evaluate_ppm(m2));
  return result;
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : m) {
    nlohmann::json r = nlohmann::json::array();
    for (const Complex& v : row) {
      r.push_back(nlohmann::json::array({v.real(), v.imag()}));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  Matrix m;
  for (const auto& row : j) {
    std::vector<Complex> r;
    for (const auto& v : row) {
      if (!v.is_array() || v.size() != 2) {
        throw ConfigError("complex entries must be [re, im] pairs");
      }
      r.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    }
    m.push_back(std::move(r));
  }
  return m;
}

}  // namespace

nlohmann::json ppm_to_json(const PPM& ppm) {
  return nlohmann::json{{"knobs", ppm.knobs},
                        {"outcomes", ppm.outcomes},
                        {"table", ppm.table}};
}

PPM ppm_from_json(const nlohmann::json& j) {
  try {
    PPM ppm;
    ppm.knobs = j.at("knobs").get<std::vector<std::string>>();
    ppm.outcomes = j.at("outcomes").get<std::vector<std::string>>();
    ppm.table = j.at("table").get<std::vector<std::vector<double>>>();
    return ppm;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed probability table: ") + e.what());
  }
}

nlohmann::json model_to_json(const QuantumModel& model) {
  nlohmann::json rho = nlohmann::json::array();
  for (const auto& m : model.rho) rho.push_back(matrix_to_json(m));
  nlohmann::json povm = nlohmann::json::array();
  for (const auto& effects : model.povm) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : effects) list.push_back(matrix_to_json(e));
    povm.push_back(std::move(list));
  }
  return nlohmann::json{{"dim", model.dim},
                        {"knobs", model.knobs},
                        {"outcomes", model.outcomes},
                        {"rho", std::move(rho)},
                        {"povm", std::move(povm)}};
}

QuantumModel model_from_json(const nlohmann::json& j) {
  try {
    QuantumModel model;
    model.dim = j.at("dim").get<std::size_t>();
    model.knobs = j.at("knobs").get<std::vector<std::string>>();
    model.outcomes = j.at("outcomes").get<std::vector<std::string>>();
    for (const auto& m : j.at("rho")) {
      model.rho.push_back(matrix_from_json(m));
    }
    for (const auto& effects : j.at("povm")) {
      std::vector<Matrix> list;
      for (const auto& e : effects) list.push_back(matrix_from_json(e));
      model.povm.push_back(std::move(list));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model document: ") + e.what());
  }
}

}  // namespace chronolace::quantum
