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

#include "blindcal/covariance.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "format.hpp"

namespace blindcal {

CMatrix hermitian_part(const CMatrix &a) { return 0.5 * (a + a.adjoint()); }

HermitianCovariance sample_covariance(const SnapshotMatrix &snapshots) {
  const int t_len = snapshots.sample_size();
  if (t_len < 1) throw DomainError("sample_covariance: no snapshots");
  CMatrix s = CMatrix::Zero(snapshots.num_sensors(), snapshots.num_sensors());
  s.selfadjointView<Eigen::Lower>().rankUpdate(snapshots.data, 1.0 / t_len);
  s = s.selfadjointView<Eigen::Lower>();
  return {hermitian_part(s), CovarianceKind::RawSigma, t_len};
}

HermitianCovariance ds_shift(const HermitianCovariance &sigma_hat, double sigma_w2) {
  if (!(sigma_w2 >= 0.0)) throw DomainError("ds_shift: sigma_w2 must be nonnegative");
  HermitianCovariance out = sigma_hat;
  out.matrix.diagonal().array() -= sigma_w2;
  out.kind = CovarianceKind::DiagonalShift;
  return out;
}

MlDsResult ml_ds_shift(const HermitianCovariance &sigma_hat, int num_sources) {
  const int m = sigma_hat.dim();
  if (num_sources < 1 || num_sources >= m) throw DomainError("ml_ds_shift: need 1 <= N < M");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(sigma_hat.matrix, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw DomainError("ml_ds_shift: eigendecomposition failed");
  const Vector &ev = eig.eigenvalues(); // ascending
  const double floor_hat = std::max(0.0, ev.head(m - num_sources).mean());
  MlDsResult out{ds_shift(sigma_hat, floor_hat), floor_hat};
  out.covariance.kind = CovarianceKind::MlDiagonalShift;
  return out;
}

std::vector<std::pair<int, int>> lvec_indices(int m) {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(m * (m + 1) / 2));
  for (int j = 0; j < m; ++j)
    for (int i = j; i < m; ++i) out.emplace_back(i, j);
  return out;
}

std::vector<std::pair<int, int>> uvec_indices(int m) {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (int j = 1; j < m; ++j)
    for (int i = 0; i < j; ++i) out.emplace_back(i, j);
  return out;
}

std::vector<RowIndex> row_layout(int m, bool reduced) {
  std::vector<RowIndex> rows;
  for (auto [i, j] : lvec_indices(m))
    if (!(reduced && i == j)) rows.push_back({i, j, Part::Mu});
  for (auto [i, j] : uvec_indices(m)) rows.push_back({i, j, Part::Nu});
  return rows;
}

std::vector<std::string> ThetaLayout::names() const {
  std::vector<std::string> out;
  for (int s = 2; s <= m; ++s) out.push_back("logpsi" + std::to_string(s));
  for (int s = 3; s <= m; ++s) out.push_back("phi" + std::to_string(s));
  for (int d = 1; d <= m; ++d) out.push_back("rho" + std::to_string(d));
  for (int d = 2; d <= m; ++d) out.push_back("iota" + std::to_string(d));
  return out;
}

namespace {

DesignMatrix make_design(int m, bool reduced) {
  DesignMatrix dm;
  dm.layout = ThetaLayout{m};
  dm.reduced = reduced;
  dm.index_map = row_layout(m, reduced);
  dm.h = Matrix::Zero(static_cast<Eigen::Index>(dm.index_map.size()), dm.layout.size());
  const ThetaLayout &lay = dm.layout;
  for (std::size_t a = 0; a < dm.index_map.size(); ++a) {
    const auto [i, j, part] = dm.index_map[a];
    auto row = dm.h.row(static_cast<Eigen::Index>(a));
    if (part == Part::Mu) {
      if (i >= 1) row(lay.gain(i)) += 1.0;
      if (j >= 1) row(lay.gain(j)) += 1.0;
      row(lay.rho(i - j)) += 1.0;
    } else {
      if (i >= 2) row(lay.phase(i)) += 1.0;
      if (j >= 2) row(lay.phase(j)) -= 1.0;
      row(lay.iota(j - i)) += 1.0;
    }
  }
  return dm;
}

} // namespace

const DesignMatrix &design_matrix(int m, bool reduced) {
  if (m < 2) throw DomainError("design matrix needs M >= 2");
  if (reduced && m < 4) throw DomainError("reduced design matrix needs M >= 4");
  static std::mutex mutex;
  static std::map<std::pair<int, bool>, std::unique_ptr<const DesignMatrix>> cache;
  std::lock_guard lock(mutex);
  auto &slot = cache[{m, reduced}];
  if (!slot) slot = std::make_unique<const DesignMatrix>(make_design(m, reduced));
  return *slot;
}

CorrelationSystem build_design_matrix(int m, bool reduced) {
  const DesignMatrix &dm = design_matrix(m, reduced);
  CorrelationSystem sys;
  sys.h = dm.h;
  sys.index_map = dm.index_map;
  sys.layout = dm.layout;
  sys.reduced = reduced;
  return sys;
}

namespace {

Vector measurements(const CMatrix &r, const std::vector<RowIndex> &rows) {
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const auto [i, j, part] = rows[a];
    const cdouble z = r(i, j);
    if (i == j && !(z.real() > 0.0))
      throw MeasurementError("nonpositive diagonal entry R(" + std::to_string(i + 1) + "," + std::to_string(i + 1) + ")");
    if (z == cdouble(0.0))
      throw MeasurementError("zero entry R(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    const cdouble lz = std::log(z);
    y(static_cast<Eigen::Index>(a)) = part == Part::Mu ? lz.real() : lz.imag();
  }
  return y;
}

} // namespace

Vector build_measurements(const HermitianCovariance &r_hat) {
  return measurements(r_hat.matrix, design_matrix(r_hat.dim(), false).index_map);
}

Vector build_reduced_measurements(const HermitianCovariance &sigma_hat) {
  return measurements(sigma_hat.matrix, design_matrix(sigma_hat.dim(), true).index_map);
}

CorrelationSystem make_system(const HermitianCovariance &r_hat, bool reduced) {
  CorrelationSystem sys = build_design_matrix(r_hat.dim(), reduced);
  sys.y = measurements(r_hat.matrix, sys.index_map);
  for (std::size_t a = 0; a < sys.index_map.size(); ++a)
    if (sys.index_map[a].part == Part::Nu && std::abs(sys.y(static_cast<Eigen::Index>(a))) > kPi - 0.1)
      sys.near_wrap = true;
  return sys;
}

Vector true_theta(const ScenarioConfig &scenario) {
  const int m = scenario.num_sensors();
  const ThetaLayout lay{m};
  const CMatrix c = nominal_covariance(scenario);
  Vector theta(lay.size());
  for (int s = 1; s < m; ++s) theta(lay.gain(s)) = std::log(scenario.offsets.gains(s));
  for (int s = 2; s < m; ++s) theta(lay.phase(s)) = scenario.offsets.phases(s);
  for (int d = 0; d < m; ++d) theta(lay.rho(d)) = std::log(std::abs(c(0, d)));
  for (int d = 1; d < m; ++d) theta(lay.iota(d)) = std::arg(c(0, d));
  return theta;
}

void write_covariance_csv(const CMatrix &matrix, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (Eigen::Index i = 0; i < matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (i || j) out << ',';
      out << detail::format_double(matrix(i, j).real()) << ',' << detail::format_double(matrix(i, j).imag());
    }
  out << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

CMatrix read_covariance_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<double> vals;
  std::string field;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::stringstream ss(content);
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\n') field.pop_back();
    if (field.empty()) continue;
    vals.push_back(detail::parse_double(field));
  }
  const auto m = static_cast<Eigen::Index>(std::lround(std::sqrt(vals.size() / 2.0)));
  if (static_cast<std::size_t>(2 * m * m) != vals.size() || m == 0)
    throw IoError("'" + path + "' does not hold 2 M^2 values");
  CMatrix out(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto k = static_cast<std::size_t>(2 * (i * m + j));
      out(i, j) = {vals[k], vals[k + 1]};
    }
  return out;
}

} // namespace blindcal
