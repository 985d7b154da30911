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

#include "blindcal/covariance.hpp"
#include "blindcal/owls.hpp"
#include "blindcal/types.hpp"

namespace blindcal {

enum class ParamGroup { LogGain, Phase, Rho, Iota };

struct CrlbReport {
  Matrix full_matrix; // (H^T Lambda^-1 H)^-1
  ThetaLayout layout;
  Vector gain_bounds;  // n = 2..M
  Vector phase_bounds; // m = 3..M

  Matrix block(ParamGroup row, ParamGroup col) const;
};

CrlbReport crlb_blocks(const Matrix &h, const NoiseStatistics &stats);

// psi_n^2 (CR_logpsi)_nn for n = 2..M
Vector crlb_gains(const CrlbReport &report, const Vector &psi);
// (CR_phi)_mm for m = 3..M
Vector crlb_phases(const CrlbReport &report);

// Bound at the true parameters of `scenario` for T samples; fills
// gain_bounds and phase_bounds. The error covariance is Sigma (w included),
// the logged matrix is R.
CrlbReport analytic_crlb(const ScenarioConfig &scenario, int sample_size);

} // namespace blindcal
