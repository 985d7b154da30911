// SPDX-License-Identifier: Apache-2.0
//
// blindcal - blind gain/phase calibration of uniform linear arrays
// Copyright (C) 2026 The blindcal authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <string>
#include <vector>

#include "blindcal/array_model.hpp"
#include "blindcal/covariance.hpp"
#include "blindcal/types.hpp"

namespace blindcal {

enum class NoiseVariant { GaussianMl, Qml };

// Mean and covariance of the transformed measurement noise xi = y - H theta.
struct NoiseStatistics {
  Vector eta;
  Matrix lambda;
  NoiseVariant variant = NoiseVariant::GaussianMl;
  bool reduced = false;
  int sample_size = 1;
};

// Fourth-order joint cumulants kappa[i,j,k,l] = cum(r_i, r_j^*, r_k, r_l^*).
class CumulantTable {
public:
  CumulantTable() = default;
  explicit CumulantTable(int m) : m_(m), values_(static_cast<std::size_t>(m) * m * m * m) {}

  int dim() const { return m_; }
  cdouble &operator()(int i, int j, int k, int l) { return values_[index(i, j, k, l)]; }
  const cdouble &operator()(int i, int j, int k, int l) const { return values_[index(i, j, k, l)]; }
  double max_abs() const;
  // Set when the snapshots look improper; the estimator drops E[r_i r_k].
  bool improper = false;

private:
  std::size_t index(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * m_ + j) * m_ + k) * m_ + l;
  }
  int m_ = 0;
  std::vector<cdouble> values_;
};

// -1/(2T) on Mu rows, 0 on Nu rows.
Vector noise_mean(int m, int sample_size, bool reduced);

NoiseStatistics noise_covariance_gaussian(const HermitianCovariance &r, int sample_size, bool reduced);

// General form. `log_matrix` is the matrix whose entries are logged (R_ij in
// the denominators); `error_matrix` is the covariance of the averaged
// samples, which sets the second moments of the estimation errors. Both are
// the same matrix unless a diagonal shift was applied. `kappa` may be null.
NoiseStatistics noise_statistics(const CMatrix &log_matrix, const CMatrix &error_matrix,
                                 const CumulantTable *kappa, int sample_size, bool reduced);

CumulantTable estimate_cumulants(const SnapshotMatrix &snapshots);

NoiseStatistics noise_covariance_qml(const HermitianCovariance &r, const CumulantTable &kappa,
                                     int sample_size, bool reduced);

enum class Method { MlOwls, QmlOwls, ReducedMlOwls, Ls, SeparatedWls, Oracle };

std::string method_name(Method method);
Method parse_method(const std::string &name);

struct CalibrationEstimate {
  Vector theta_hat;
  Vector psi_hat; // psi_hat(0) = 1
  Vector phi_hat; // phi_hat(0) = phi_hat(1) = 0, radians
  Matrix est_covariance;
  Method method = Method::MlOwls;
  int num_sensors = 0;
  int sample_size = 0;

  bool jitter_applied = false;
  bool few_samples = false; // T <= M^2: weight matrix may be singular
  bool near_wrap = false;
  bool improper_cumulants = false;
};

// Gains/phases with the reference entries reinserted.
CalibrationEstimate estimate_from_theta(const Vector &theta, const ThetaLayout &layout, Method method,
                                        int sample_size);

// Ground truth packaged as an estimate (oracle calibration).
CalibrationEstimate oracle_estimate(const OffsetVector &offsets);

// theta = (H^T L^-1 H)^-1 H^T L^-1 (y - eta), via Cholesky of Lambda.
CalibrationEstimate owls_solve(const CorrelationSystem &system, const NoiseStatistics &stats,
                               Method method = Method::MlOwls);

// Lambda with the Mu/Nu cross block zeroed.
CalibrationEstimate separated_wls(const CorrelationSystem &system, const NoiseStatistics &stats);

CalibrationEstimate reduced_owls(const CorrelationSystem &system_reduced, const NoiseStatistics &stats_reduced);

// Unweighted LS on same-diagonal differences (gains and phases separately),
// no bias correction. theta_hat = G y with G from ls_operator.
CalibrationEstimate ls_baseline(const HermitianCovariance &r_hat);
// K x M^2 linear map of the LS baseline (nuisance rho/iota as diagonal means).
const Matrix &ls_operator(int m);

// CSV line: method, M, T, psi_hat..., phi_hat (degrees)..., est_covariance (row-major).
std::string estimate_to_csv(const CalibrationEstimate &estimate);

} // namespace blindcal
