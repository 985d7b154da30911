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

#include <span>
#include <string>
#include <vector>

#include "blindcal/array_model.hpp"
#include "blindcal/covariance.hpp"
#include "blindcal/owls.hpp"
#include "blindcal/types.hpp"

namespace blindcal {

struct MusicSpectrum {
  std::vector<double> grid;   // radians
  std::vector<double> values; // 1 / (a^H E_n E_n^H a)
  bool ambiguous = false;     // eigen-gap lambda_N ~ lambda_N+1
};

struct DoaEstimate {
  std::vector<double> angles; // radians, ascending
  MusicSpectrum spectrum;
  bool detection_failed = false;
};

// 0.02 deg steps over (0.5 deg, 179.5 deg).
std::vector<double> default_grid();

MusicSpectrum music_spectrum(const CMatrix &r, int num_sources, std::span<const double> grid,
                             const ArrayGeometry &geometry);

// Calibrates, forms the sample covariance, and picks the N largest local
// maxima with quadratic refinement.
DoaEstimate estimate_doas(const SnapshotMatrix &snapshots, const CalibrationEstimate &estimate, int num_sources,
                          std::span<const double> grid, const ArrayGeometry &geometry);

DoaEstimate peaks_from_spectrum(MusicSpectrum spectrum, int num_sources);

// Error in degrees per true source, after folding truths into (0, pi) through
// cos and matching estimates by the assignment with least total squared error.
std::vector<double> doa_errors_deg(const DoaEstimate &estimate, const Vector &true_azimuths);

} // namespace blindcal
