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
#include <utility>
#include <vector>

#include "blindcal/array_model.hpp"
#include "blindcal/types.hpp"

namespace blindcal {

enum class CovarianceKind { RawSigma, DiagonalShift, MlDiagonalShift };

struct HermitianCovariance {
  CMatrix matrix;
  CovarianceKind kind = CovarianceKind::RawSigma;
  int sample_size = 1;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

// (A + A^H) / 2
CMatrix hermitian_part(const CMatrix &a);

HermitianCovariance sample_covariance(const SnapshotMatrix &snapshots);

// R_DS = Sigma_hat - sigma_w2 I
HermitianCovariance ds_shift(const HermitianCovariance &sigma_hat, double sigma_w2);

struct MlDsResult {
  HermitianCovariance covariance;
  double sigma_w2_hat = 0.0;
};

// sigma_w2_hat = mean of the M - N smallest eigenvalues; R_ML-DS = Sigma_hat - sigma_w2_hat I.
MlDsResult ml_ds_shift(const HermitianCovariance &sigma_hat, int num_sources);

// Zero-based (row, col) pairs in lvec order (lower triangle incl. diagonal,
// column by column) and uvec order (strict upper triangle, column by column).
std::vector<std::pair<int, int>> lvec_indices(int m);
std::vector<std::pair<int, int>> uvec_indices(int m);

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> lvec(const Eigen::MatrixBase<Derived> &a) {
  if (a.rows() != a.cols()) throw DomainError("lvec: matrix is not square");
  const auto idx = lvec_indices(static_cast<int>(a.rows()));
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t n = 0; n < idx.size(); ++n) out(static_cast<Eigen::Index>(n)) = a(idx[n].first, idx[n].second);
  return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> uvec(const Eigen::MatrixBase<Derived> &a) {
  if (a.rows() != a.cols()) throw DomainError("uvec: matrix is not square");
  const auto idx = uvec_indices(static_cast<int>(a.rows()));
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t n = 0; n < idx.size(); ++n) out(static_cast<Eigen::Index>(n)) = a(idx[n].first, idx[n].second);
  return out;
}

enum class Part { Mu, Nu };

// One row of the correlation-measurement system: Re log R_ij (Mu, i >= j)
// or Im log R_ij (Nu, i < j). Zero-based indices.
struct RowIndex {
  int i = 0;
  int j = 0;
  Part part = Part::Mu;
  friend bool operator==(const RowIndex &, const RowIndex &) = default;
};

// Mu rows in lvec order then Nu rows in uvec order; the reduced layout drops
// the M diagonal Mu rows.
std::vector<RowIndex> row_layout(int m, bool reduced);

// Column positions of theta = [log psi_2..M, phi_3..M, rho_1..M, iota_2..M].
// Sensor and lag arguments are zero-based.
struct ThetaLayout {
  int m = 0;

  int size() const { return 4 * m - 4; }
  int gain(int sensor) const { return sensor - 1; }             // sensor >= 1
  int phase(int sensor) const { return (m - 1) + (sensor - 2); } // sensor >= 2
  int rho(int lag) const { return (2 * m - 3) + lag; }           // lag >= 0
  int iota(int lag) const { return (3 * m - 3) + (lag - 1); }    // lag >= 1
  int num_gains() const { return m - 1; }
  int num_phases() const { return m - 2; }
  std::vector<std::string> names() const;
};

struct DesignMatrix {
  Matrix h;
  std::vector<RowIndex> index_map;
  ThetaLayout layout;
  bool reduced = false;
};

// H depends only on (M, reduced); the returned reference points into a
// process-wide read-only cache.
const DesignMatrix &design_matrix(int m, bool reduced);

struct CorrelationSystem {
  Vector y;
  Matrix h;
  std::vector<RowIndex> index_map;
  ThetaLayout layout;
  bool reduced = false;
  // Some |nu_ij| lies within 0.1 rad of pi; principal-log wrap is possible.
  bool near_wrap = false;

  int rows() const { return static_cast<int>(y.size()); }
};

CorrelationSystem build_design_matrix(int m, bool reduced);

// y = [lvec(Re log R)^T uvec(Im log R)^T]^T. Throws MeasurementError on a
// zero entry or a nonpositive diagonal.
Vector build_measurements(const HermitianCovariance &r_hat);
// Off-diagonal rows only.
Vector build_reduced_measurements(const HermitianCovariance &sigma_hat);

// Measurements and design matrix together.
CorrelationSystem make_system(const HermitianCovariance &r_hat, bool reduced);

// theta for a noiseless covariance built from `scenario` (offsets and the
// Toeplitz C). Requires no phase wrap.
Vector true_theta(const ScenarioConfig &scenario);

// Debug CSV: one line, 2 M^2 reals, row-major, (re, im) per entry.
void write_covariance_csv(const CMatrix &matrix, const std::string &path);
CMatrix read_covariance_csv(const std::string &path);

} // namespace blindcal
