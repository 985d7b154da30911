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

#include "blindcal/doa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace blindcal {

std::vector<double> default_grid() {
  std::vector<double> grid;
  const double step = 0.02;
  // Integer stepping keeps the grid points exact multiples of the step.
  for (int n = 1; n < 8950; ++n) grid.push_back((0.5 + n * step) * kDeg);
  return grid;
}

MusicSpectrum music_spectrum(const CMatrix &r, int num_sources, std::span<const double> grid,
                             const ArrayGeometry &geometry) {
  const int m = static_cast<int>(r.rows());
  if (m != geometry.num_sensors) throw DomainError("music_spectrum: covariance does not match the array");
  if (num_sources < 1 || num_sources >= m) throw DomainError("music_spectrum: need 1 <= N < M");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(r));
  if (eig.info() != Eigen::Success) throw DomainError("music_spectrum: eigendecomposition failed");

  const int noise_dim = m - num_sources;
  const Vector &ev = eig.eigenvalues(); // ascending
  const CMatrix en = eig.eigenvectors().leftCols(noise_dim);

  MusicSpectrum out;
  const double scale = std::max(1.0, std::abs(ev(m - 1)));
  out.ambiguous = std::abs(ev(noise_dim) - ev(noise_dim - 1)) <= 1e-12 * scale;
  out.grid.assign(grid.begin(), grid.end());
  out.values.resize(grid.size());
  const CMatrix en_h = en.adjoint();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double denom = (en_h * steering_vector(grid[g], geometry)).squaredNorm();
    out.values[g] = 1.0 / std::max(denom, std::numeric_limits<double>::min());
  }
  return out;
}

DoaEstimate peaks_from_spectrum(MusicSpectrum spectrum, int num_sources) {
  DoaEstimate est;
  const auto &v = spectrum.values;
  const auto &g = spectrum.grid;
  std::vector<std::size_t> peaks;
  for (std::size_t n = 1; n + 1 < v.size(); ++n)
    if (v[n] > v[n - 1] && v[n] >= v[n + 1]) peaks.push_back(n);
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });

  if (static_cast<int>(peaks.size()) < num_sources) {
    est.detection_failed = true;
    peaks.resize(std::min(peaks.size(), static_cast<std::size_t>(num_sources)));
  } else {
    peaks.resize(static_cast<std::size_t>(num_sources));
  }
  for (std::size_t n : peaks) {
    const double y0 = v[n - 1], y1 = v[n], y2 = v[n + 1];
    const double curv = y0 - 2.0 * y1 + y2;
    double delta = curv < 0.0 ? 0.5 * (y0 - y2) / curv : 0.0;
    delta = std::clamp(delta, -0.5, 0.5);
    const double half_step = 0.5 * (g[n + 1] - g[n - 1]);
    est.angles.push_back(g[n] + delta * half_step);
  }
  std::sort(est.angles.begin(), est.angles.end());
  est.spectrum = std::move(spectrum);
  return est;
}

DoaEstimate estimate_doas(const SnapshotMatrix &snapshots, const CalibrationEstimate &estimate, int num_sources,
                          std::span<const double> grid, const ArrayGeometry &geometry) {
  const SnapshotMatrix calibrated = apply_calibration(snapshots, estimate);
  const HermitianCovariance r = sample_covariance(calibrated);
  return peaks_from_spectrum(music_spectrum(r.matrix, num_sources, grid, geometry), num_sources);
}

std::vector<double> doa_errors_deg(const DoaEstimate &estimate, const Vector &true_azimuths) {
  const auto n = static_cast<std::size_t>(true_azimuths.size());
  std::vector<double> err(n, std::numeric_limits<double>::quiet_NaN());
  if (estimate.detection_failed || estimate.angles.size() != n) return err;

  std::vector<double> truth(n);
  for (std::size_t k = 0; k < n; ++k) truth[k] = std::acos(std::cos(true_azimuths(static_cast<Eigen::Index>(k))));
  std::vector<std::size_t> perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = estimate.angles[perm[k]] - truth[k];
      cost += d * d;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (std::size_t k = 0; k < n; ++k) err[k] = (estimate.angles[best[k]] - truth[k]) / kDeg;
  return err;
}

} // namespace blindcal
