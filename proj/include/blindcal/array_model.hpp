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

#include <cstdint>
#include <string>
#include <vector>

#include "blindcal/rng.hpp"
#include "blindcal/types.hpp"

namespace blindcal {

struct ArrayGeometry {
  int num_sensors = 0;
  double spacing_over_wavelength = 0.5;

  // k * gamma = 2 pi gamma / lambda, radians per sensor per unit cos(alpha).
  double wavenumber_spacing() const { return 2.0 * kPi * spacing_over_wavelength; }
  void validate() const;
};

struct OffsetVector {
  Vector gains;  // psi, all > 0
  Vector phases; // phi, radians

  static OffsetVector identity(int num_sensors);
  void validate(int num_sensors) const;
  // psi_1 = 1, phi_1 = phi_2 = 0, as required of ground truth.
  bool has_reference_convention() const;
};

enum class SourceDistribution { CircularGaussian, Bernoulli, Laplace, FramedComm };
enum class NoiseDistribution { CircularGaussian, Uniform };
enum class Constellation { Psk8Ofdm, Pam4 };

struct FramedSource {
  Constellation constellation = Constellation::Psk8Ofdm;
  // Output sample t (1-based) is base sample floor((t - offset) / stretch) (1-based);
  // indices before the first base sample give 0. The usual offset is stretch - 1.
  int stretch = 1;
  int offset = 0;
};

struct FrameSpec {
  int frame_length = 40;
  int sync_length = 8;
  std::vector<FramedSource> sources;

  int packet_length() const { return frame_length - sync_length; }
  void validate(int num_sources) const;
};

struct SourceEnsemble {
  Vector azimuths; // radians
  Vector powers;   // diagonal of R_s
  SourceDistribution distribution = SourceDistribution::CircularGaussian;
  FrameSpec frame;

  int count() const { return static_cast<int>(azimuths.size()); }
};

struct ScenarioConfig {
  ArrayGeometry geometry;
  SourceEnsemble sources;
  OffsetVector offsets;
  NoiseDistribution noise_distribution = NoiseDistribution::CircularGaussian;
  double sigma_v2 = 0.1; // noise inside the offsets
  double sigma_w2 = 0.0; // noise outside the offsets
  int sample_size = 1000;
  std::uint64_t seed = 1;

  int num_sensors() const { return geometry.num_sensors; }
  void validate() const;
};

// SNR[dB] = -10 log10(sigma_v2) for unit-power sources.
double snr_db_to_sigma_v2(double snr_db);

struct SnapshotMatrix {
  CMatrix data; // M x T
  std::string model;

  int num_sensors() const { return static_cast<int>(data.rows()); }
  int sample_size() const { return static_cast<int>(data.cols()); }
};

CVector steering_vector(double alpha, const ArrayGeometry &geometry);

// M x N Vandermonde manifold. Duplicate azimuths (rank-deficient A) are
// reported through `warnings` when given.
CMatrix manifold_matrix(const Vector &alphas, const ArrayGeometry &geometry,
                        std::vector<std::string> *warnings = nullptr);

// Offset-free covariance C = A R_s A^H + sigma_v2 I (Toeplitz Hermitian).
CMatrix nominal_covariance(const ScenarioConfig &scenario);
// Sigma = Psi Phi C Phi^* Psi + sigma_w2 I. With sigma_w2 = 0 this is R.
CMatrix analytic_covariance(const ScenarioConfig &scenario);

SnapshotMatrix synthesize(const ScenarioConfig &scenario);
SnapshotMatrix synthesize(const ScenarioConfig &scenario, Rng &rng);

// Framed cyclostationary sources; scenario.sources.frame is ignored in favour of `frame`.
SnapshotMatrix synthesize_framed(const ScenarioConfig &scenario, const FrameSpec &frame);
SnapshotMatrix synthesize_framed(const ScenarioConfig &scenario, const FrameSpec &frame, Rng &rng);

// One unit-power source sequence of `length` samples (before the per-source stretch).
CVector framed_base_sequence(const FrameSpec &frame, Constellation constellation, int length, Rng &rng);
// Average power of a unit-power framed sequence: sync samples contribute 2 per frame.
double framed_nominal_power(const FrameSpec &frame);

inline constexpr double kPam4Levels[4] = {-3.0, -1.0, 1.0, 3.0};
double pam4_scale(); // 1 / sqrt(5)

struct CalibrationEstimate;

// r_hat[t] = Psi_hat^-1 Phi_hat^* r[t]
SnapshotMatrix apply_calibration(const SnapshotMatrix &snapshots, const CalibrationEstimate &estimate);
SnapshotMatrix apply_calibration(const SnapshotMatrix &snapshots, const Vector &gains, const Vector &phases);

} // namespace blindcal
