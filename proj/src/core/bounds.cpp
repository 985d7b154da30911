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

#include "blindcal/bounds.hpp"

namespace blindcal {

namespace {

std::pair<int, int> group_range(const ThetaLayout &lay, ParamGroup g) {
  switch (g) {
  case ParamGroup::LogGain: return {lay.gain(1), lay.num_gains()};
  case ParamGroup::Phase: return {lay.phase(2), lay.num_phases()};
  case ParamGroup::Rho: return {lay.rho(0), lay.m};
  case ParamGroup::Iota: return {lay.iota(1), lay.m - 1};
  }
  return {0, 0};
}

} // namespace

Matrix CrlbReport::block(ParamGroup row, ParamGroup col) const {
  const auto [r0, rn] = group_range(layout, row);
  const auto [c0, cn] = group_range(layout, col);
  return full_matrix.block(r0, c0, rn, cn);
}

CrlbReport crlb_blocks(const Matrix &h, const NoiseStatistics &stats) {
  if (h.rows() != stats.lambda.rows()) throw DomainError("crlb_blocks: H and Lambda sizes differ");
  const auto k = h.cols();
  if (k % 4 != 0) throw DomainError("crlb_blocks: H does not have 4M - 4 columns");
  Eigen::LLT<Matrix> llt(stats.lambda);
  if (llt.info() != Eigen::Success) throw SingularWeightError("crlb_blocks: Lambda is not positive definite");
  const Matrix w = llt.matrixL().solve(h);
  const Matrix normal = w.transpose() * w;
  Eigen::LLT<Matrix> nllt(normal);
  if (nllt.info() != Eigen::Success) throw DomainError("crlb_blocks: normal matrix is singular (not identifiable)");
  CrlbReport rep;
  rep.layout = ThetaLayout{static_cast<int>(k / 4 + 1)};
  const Matrix inv = nllt.solve(Matrix::Identity(k, k));
  rep.full_matrix = 0.5 * (inv + inv.transpose());
  return rep;
}

Vector crlb_gains(const CrlbReport &report, const Vector &psi) {
  const ThetaLayout &lay = report.layout;
  if (psi.size() != lay.m) throw DomainError("crlb_gains: psi has the wrong length");
  Vector out(lay.num_gains());
  for (int s = 1; s < lay.m; ++s) out(s - 1) = psi(s) * psi(s) * report.full_matrix(lay.gain(s), lay.gain(s));
  return out;
}

Vector crlb_phases(const CrlbReport &report) {
  const ThetaLayout &lay = report.layout;
  Vector out(lay.num_phases());
  for (int s = 2; s < lay.m; ++s) out(s - 2) = report.full_matrix(lay.phase(s), lay.phase(s));
  return out;
}

CrlbReport analytic_crlb(const ScenarioConfig &scenario, int sample_size) {
  ScenarioConfig no_floor = scenario;
  no_floor.sigma_w2 = 0.0;
  const CMatrix r = analytic_covariance(no_floor);
  const CMatrix sigma = analytic_covariance(scenario);
  const NoiseStatistics stats = noise_statistics(r, sigma, nullptr, sample_size, false);
  CrlbReport rep = crlb_blocks(design_matrix(scenario.num_sensors(), false).h, stats);
  rep.gain_bounds = crlb_gains(rep, scenario.offsets.gains);
  rep.phase_bounds = crlb_phases(rep);
  return rep;
}

} // namespace blindcal
