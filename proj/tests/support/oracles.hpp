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

// Reference implementations used only by tests. They are written from the
// model definitions directly (explicit loops, 1-based formulas) and share no
// code with the library beyond the basic types.

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double deg = pi / 180.0;

struct Model {
  int m = 0;
  double spacing = 0.5; // gamma / lambda
  std::vector<double> gains, phases, azimuths, powers;
  double sigma_v2 = 0.0, sigma_w2 = 0.0;
};

// Sigma_ij = psi_i psi_j e^{j(phi_i - phi_j)} (sum_n p_n e^{j 2 pi g (i-j) cos a_n} + sigma_v2 d_ij) + sigma_w2 d_ij
CMat covariance(const Model &model);

// Sample covariance of T i.i.d. CN(0, sigma) snapshots, drawn through the
// Bartlett factorization of the complex Wishart law.
class WishartSampler {
public:
  WishartSampler(const CMat &sigma, int sample_size, std::uint64_t seed);
  CMat draw();

private:
  CMat chol_;
  int t_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<std::gamma_distribution<double>> chi_;
};

// Theta for the model: [log psi_2..M, phi_3..M, log|c_1..M|, arg c_2..M].
Vec theta(const Model &model);

// Full (or diagonal-free) design matrix, built from the 1-based formulas.
Mat design(int m, bool reduced);

// Measurements y = [Re log R_ij (i >= j, column-wise), Im log R_ij (i < j, column-wise)].
Vec measurements(const CMat &r, bool reduced);

// Unweighted LS on all same-diagonal pair differences; gains then phases.
void ls_gains_phases(const CMat &r, Vec &psi, Vec &phi);

// Ordinary least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

} // namespace oracle
