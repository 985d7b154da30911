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

#include "blindcal/owls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "format.hpp"

namespace blindcal {

double CumulantTable::max_abs() const {
  double mx = 0.0;
  for (const auto &v : values_) mx = std::max(mx, std::abs(v));
  return mx;
}

Vector noise_mean(int m, int sample_size, bool reduced) {
  if (sample_size < 1) throw DomainError("noise_mean: T must be >= 1");
  const auto rows = row_layout(m, reduced);
  Vector eta(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    eta(static_cast<Eigen::Index>(a)) = rows[a].part == Part::Mu ? -0.5 / sample_size : 0.0;
  return eta;
}

NoiseStatistics noise_statistics(const CMatrix &log_matrix, const CMatrix &error_matrix, const CumulantTable *kappa,
                                 int sample_size, bool reduced) {
  const int m = static_cast<int>(log_matrix.rows());
  if (error_matrix.rows() != m || error_matrix.cols() != m || log_matrix.cols() != m)
    throw DomainError("noise statistics: matrix sizes differ");
  if (kappa && kappa->dim() != m) throw DomainError("noise statistics: cumulant table size differs");
  const auto &rows = design_matrix(m, reduced).index_map;
  for (const auto &row : rows)
    if (log_matrix(row.i, row.j) == cdouble(0.0))
      throw DomainError("noise statistics: zero entry R(" + std::to_string(row.i + 1) + "," +
                        std::to_string(row.j + 1) + ")");

  const auto n = static_cast<Eigen::Index>(rows.size());
  NoiseStatistics out;
  out.eta = noise_mean(m, sample_size, reduced);
  out.lambda.resize(n, n);
  out.variant = kappa ? NoiseVariant::Qml : NoiseVariant::GaussianMl;
  out.reduced = reduced;
  out.sample_size = sample_size;

  const CMatrix &r = log_matrix;
  const CMatrix &e = error_matrix;
  const double inv_t = 1.0 / sample_size;
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto [i, j, pa] = rows[static_cast<std::size_t>(a)];
    for (Eigen::Index b = 0; b <= a; ++b) {
      const auto [k, l, pb] = rows[static_cast<std::size_t>(b)];
      // T E[e_ij e_kl^*] and T E[e_ij e_kl]
      cdouble cov = e(i, k) * std::conj(e(j, l));
      cdouble pcov = e(i, l) * std::conj(e(j, k));
      if (kappa) {
        cov += (*kappa)(i, j, l, k);
        pcov += (*kappa)(i, j, k, l);
      }
      const cdouble p = cov / (r(i, j) * std::conj(r(k, l)));
      const cdouble q = pcov / (r(i, j) * r(k, l));
      double v;
      if (pa == Part::Mu && pb == Part::Mu)
        v = 0.5 * (p + q).real();
      else if (pa == Part::Nu && pb == Part::Nu)
        v = 0.5 * (p - q).real();
      else if (pa == Part::Mu)
        v = 0.5 * (q - p).imag(); // E[Re z_a Im z_b]
      else
        v = 0.5 * (q - std::conj(p)).imag(); // E[Im z_a Re z_b]
      const double lam = v * inv_t - out.eta(a) * out.eta(b);
      out.lambda(a, b) = lam;
      out.lambda(b, a) = lam;
    }
  }
  return out;
}

NoiseStatistics noise_covariance_gaussian(const HermitianCovariance &r, int sample_size, bool reduced) {
  return noise_statistics(r.matrix, r.matrix, nullptr, sample_size, reduced);
}

NoiseStatistics noise_covariance_qml(const HermitianCovariance &r, const CumulantTable &kappa, int sample_size,
                                     bool reduced) {
  return noise_statistics(r.matrix, r.matrix, &kappa, sample_size, reduced);
}

CumulantTable estimate_cumulants(const SnapshotMatrix &snapshots) {
  const int m = snapshots.num_sensors();
  const int t_len = snapshots.sample_size();
  if (t_len < 2) throw DomainError("estimate_cumulants: need T >= 2");
  const CMatrix &x = snapshots.data;

  // z_(i,j)[t] = r_i[t] r_j[t]^*, row index i * M + j
  CMatrix z(m * m, t_len);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) z.row(i * m + j) = x.row(i).cwiseProduct(x.row(j).conjugate());
  CMatrix fourth = (z * z.transpose()) / static_cast<double>(t_len);
  fourth = (0.5 * (fourth + fourth.transpose())).eval();
  const CMatrix r = z.rowwise().mean().reshaped(m, m).transpose(); // r(i, j) = mean r_i r_j^*

  CumulantTable kappa(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          kappa(i, j, k, l) = fourth(i * m + j, k * m + l) - (r(i, j) * r(k, l) + r(i, l) * r(k, j));

  // Pseudo-covariance well above its sampling spread means the data is improper.
  const CMatrix pseudo = (x * x.transpose()) / static_cast<double>(t_len);
  const double limit = 5.0 / std::sqrt(static_cast<double>(t_len));
  for (int i = 0; i < m && !kappa.improper; ++i)
    for (int k = 0; k < m; ++k)
      if (std::abs(pseudo(i, k)) > limit * std::sqrt(r(i, i).real() * r(k, k).real())) {
        kappa.improper = true;
        break;
      }
  return kappa;
}

std::string method_name(Method method) {
  switch (method) {
  case Method::MlOwls: return "ML-OWLS";
  case Method::QmlOwls: return "QML-OWLS";
  case Method::ReducedMlOwls: return "R-ML-OWLS";
  case Method::Ls: return "LS";
  case Method::SeparatedWls: return "SEP-WLS";
  case Method::Oracle: return "ORACLE";
  }
  return "?";
}

Method parse_method(const std::string &name) {
  for (Method m : {Method::MlOwls, Method::QmlOwls, Method::ReducedMlOwls, Method::Ls, Method::SeparatedWls,
                   Method::Oracle})
    if (method_name(m) == name) return m;
  throw ConfigError("unknown method '" + name + "'");
}

CalibrationEstimate estimate_from_theta(const Vector &theta, const ThetaLayout &layout, Method method,
                                        int sample_size) {
  const int m = layout.m;
  CalibrationEstimate est;
  est.theta_hat = theta;
  est.method = method;
  est.num_sensors = m;
  est.sample_size = sample_size;
  est.psi_hat = Vector::Ones(m);
  est.phi_hat = Vector::Zero(m);
  for (int s = 1; s < m; ++s) est.psi_hat(s) = std::exp(theta(layout.gain(s)));
  for (int s = 2; s < m; ++s) est.phi_hat(s) = theta(layout.phase(s));
  return est;
}

CalibrationEstimate oracle_estimate(const OffsetVector &offsets) {
  CalibrationEstimate est;
  est.method = Method::Oracle;
  est.num_sensors = static_cast<int>(offsets.gains.size());
  est.psi_hat = offsets.gains;
  est.phi_hat = offsets.phases;
  return est;
}

namespace {

CalibrationEstimate weighted_solve(const CorrelationSystem &system, const Vector &eta, Matrix lambda, Method method,
                                   int sample_size) {
  const auto n = static_cast<Eigen::Index>(system.y.size());
  if (system.h.rows() != n || lambda.rows() != n || lambda.cols() != n || eta.size() != n)
    throw DomainError("weighted solve: system and noise statistics have different sizes");

  bool jitter = false;
  Eigen::LLT<Matrix> llt(lambda);
  if (llt.info() != Eigen::Success) {
    lambda.diagonal().array() += 1e-12 * lambda.diagonal().mean();
    llt.compute(lambda);
    jitter = true;
  }
  if (llt.info() != Eigen::Success || !(llt.rcond() >= 1e-12))
    throw SingularWeightError("weight matrix is numerically singular");

  // Columns that no row touches (rho_1 in the reduced system, which absorbs
  // the unknown noise floor) are not identifiable: solve without them and
  // report them as NaN.
  std::vector<Eigen::Index> active;
  for (Eigen::Index c = 0; c < system.h.cols(); ++c)
    if (system.h.col(c).cwiseAbs().maxCoeff() > 0.0) active.push_back(c);
  const Matrix h = system.h(Eigen::all, active);

  const Matrix w = llt.matrixL().solve(h);
  const Vector z = llt.matrixL().solve(system.y - eta);
  const Matrix normal = w.transpose() * w;
  Eigen::LLT<Matrix> nllt(normal);
  if (nllt.info() != Eigen::Success) throw SingularWeightError("normal matrix is singular");

  const auto k = system.h.cols();
  const auto ka = normal.rows();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const Vector theta_a = nllt.solve(w.transpose() * z);
  const Matrix cov_a = nllt.solve(Matrix::Identity(ka, ka));
  Vector theta = Vector::Constant(k, nan);
  Matrix cov = Matrix::Constant(k, k, nan);
  for (Eigen::Index a = 0; a < ka; ++a) {
    theta(active[static_cast<std::size_t>(a)]) = theta_a(a);
    for (Eigen::Index b = 0; b < ka; ++b)
      cov(active[static_cast<std::size_t>(a)], active[static_cast<std::size_t>(b)]) = 0.5 * (cov_a(a, b) + cov_a(b, a));
  }
  CalibrationEstimate est = estimate_from_theta(theta, system.layout, method, sample_size);
  est.est_covariance = cov;
  est.jitter_applied = jitter;
  est.near_wrap = system.near_wrap;
  const int m = system.layout.m;
  est.few_samples = sample_size <= m * m;
  return est;
}

} // namespace

CalibrationEstimate owls_solve(const CorrelationSystem &system, const NoiseStatistics &stats, Method method) {
  if (system.reduced != stats.reduced) throw DomainError("owls_solve: full/reduced mismatch");
  CalibrationEstimate est = weighted_solve(system, stats.eta, stats.lambda, method, stats.sample_size);
  return est;
}

CalibrationEstimate separated_wls(const CorrelationSystem &system, const NoiseStatistics &stats) {
  Matrix lambda = stats.lambda;
  const auto n = static_cast<Eigen::Index>(system.index_map.size());
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      if (system.index_map[static_cast<std::size_t>(a)].part != system.index_map[static_cast<std::size_t>(b)].part)
        lambda(a, b) = 0.0;
  return weighted_solve(system, stats.eta, std::move(lambda), Method::SeparatedWls, stats.sample_size);
}

CalibrationEstimate reduced_owls(const CorrelationSystem &system_reduced, const NoiseStatistics &stats_reduced) {
  if (!system_reduced.reduced || !stats_reduced.reduced) throw DomainError("reduced_owls: needs the reduced system");
  return owls_solve(system_reduced, stats_reduced, Method::ReducedMlOwls);
}

namespace {

// Rows of `sel` pick differences y_a - y_b for every unordered pair of rows
// lying on the same diagonal.
void same_diagonal_pairs(const std::vector<RowIndex> &rows, Part part, int m, Matrix &sel) {
  std::vector<std::pair<int, int>> pairs;
  for (int d = 0; d < m; ++d) {
    std::vector<int> idx;
    for (std::size_t a = 0; a < rows.size(); ++a) {
      const auto &r = rows[a];
      if (r.part == part && std::abs(r.i - r.j) == d) idx.push_back(static_cast<int>(a));
    }
    for (std::size_t x = 0; x < idx.size(); ++x)
      for (std::size_t y = x + 1; y < idx.size(); ++y) pairs.emplace_back(idx[x], idx[y]);
  }
  sel = Matrix::Zero(static_cast<Eigen::Index>(pairs.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    sel(static_cast<Eigen::Index>(p), pairs[p].first) = 1.0;
    sel(static_cast<Eigen::Index>(p), pairs[p].second) = -1.0;
  }
}

Matrix make_ls_operator(int m) {
  const DesignMatrix &dm = design_matrix(m, false);
  const ThetaLayout &lay = dm.layout;
  const auto l = dm.h.rows();
  Matrix g = Matrix::Zero(lay.size(), l);

  Matrix sel_g;
  same_diagonal_pairs(dm.index_map, Part::Mu, m, sel_g);
  const Matrix d_g = sel_g * dm.h.middleCols(lay.gain(1), lay.num_gains());
  g.middleRows(lay.gain(1), lay.num_gains()) = (d_g.transpose() * d_g).ldlt().solve(d_g.transpose() * sel_g);

  if (lay.num_phases() > 0) {
    Matrix sel_p;
    same_diagonal_pairs(dm.index_map, Part::Nu, m, sel_p);
    const Matrix d_p = sel_p * dm.h.middleCols(lay.phase(2), lay.num_phases());
    g.middleRows(lay.phase(2), lay.num_phases()) = (d_p.transpose() * d_p).ldlt().solve(d_p.transpose() * sel_p);
  }

  // rho_d / iota_d: mean over the diagonal of y minus the fitted offset part.
  const Matrix offsets_part = dm.h.leftCols(lay.num_gains() + lay.num_phases()) *
                              g.topRows(lay.num_gains() + lay.num_phases());
  for (int d = 0; d < m; ++d) {
    for (Part part : {Part::Mu, Part::Nu}) {
      if (part == Part::Nu && d == 0) continue;
      std::vector<Eigen::Index> idx;
      for (std::size_t a = 0; a < dm.index_map.size(); ++a) {
        const auto &r = dm.index_map[a];
        if (r.part == part && std::abs(r.i - r.j) == d) idx.push_back(static_cast<Eigen::Index>(a));
      }
      const int col = part == Part::Mu ? lay.rho(d) : lay.iota(d);
      for (auto a : idx) {
        Vector e = -offsets_part.row(a).transpose();
        e(a) += 1.0;
        g.row(col) += e.transpose() / static_cast<double>(idx.size());
      }
    }
  }
  return g;
}

} // namespace

const Matrix &ls_operator(int m) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const Matrix>> cache;
  std::lock_guard lock(mutex);
  auto &slot = cache[m];
  if (!slot) slot = std::make_unique<const Matrix>(make_ls_operator(m));
  return *slot;
}

CalibrationEstimate ls_baseline(const HermitianCovariance &r_hat) {
  const int m = r_hat.dim();
  CorrelationSystem sys = make_system(r_hat, false);
  const Matrix &g = ls_operator(m);
  CalibrationEstimate est = estimate_from_theta(g * sys.y, sys.layout, Method::Ls, r_hat.sample_size);
  // Sandwich covariance G Lambda G^T with the plug-in Gaussian Lambda.
  const NoiseStatistics stats = noise_covariance_gaussian(r_hat, r_hat.sample_size, false);
  Matrix cov = g * stats.lambda * g.transpose();
  est.est_covariance = 0.5 * (cov + cov.transpose());
  est.near_wrap = sys.near_wrap;
  est.few_samples = r_hat.sample_size <= m * m;
  return est;
}

std::string estimate_to_csv(const CalibrationEstimate &estimate) {
  std::ostringstream os;
  os << method_name(estimate.method) << ',' << estimate.num_sensors << ',' << estimate.sample_size;
  for (Eigen::Index s = 0; s < estimate.psi_hat.size(); ++s) os << ',' << detail::format_double(estimate.psi_hat(s));
  for (Eigen::Index s = 0; s < estimate.phi_hat.size(); ++s)
    os << ',' << detail::format_double(estimate.phi_hat(s) / kDeg);
  for (Eigen::Index i = 0; i < estimate.est_covariance.rows(); ++i)
    for (Eigen::Index j = 0; j < estimate.est_covariance.cols(); ++j)
      os << ',' << detail::format_double(estimate.est_covariance(i, j));
  os << '\n';
  return os.str();
}

} // namespace blindcal
