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

#include "blindcal/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blindcal/owls.hpp"

namespace blindcal {

void ArrayGeometry::validate() const {
  if (num_sensors < 2) throw ConfigError("array needs at least 2 sensors");
  if (!(spacing_over_wavelength > 0.0) || !std::isfinite(spacing_over_wavelength))
    throw ConfigError("spacing_over_wavelength must be positive");
}

OffsetVector OffsetVector::identity(int num_sensors) {
  return {Vector::Ones(num_sensors), Vector::Zero(num_sensors)};
}

void OffsetVector::validate(int num_sensors) const {
  if (gains.size() != num_sensors || phases.size() != num_sensors)
    throw ConfigError("offset vectors must have one entry per sensor");
  for (Eigen::Index m = 0; m < gains.size(); ++m) {
    if (!(gains(m) > 0.0) || !std::isfinite(gains(m))) throw ConfigError("gains must be positive");
    if (!(std::abs(phases(m)) < kPi)) throw ConfigError("phases must lie in (-pi, pi)");
  }
}

bool OffsetVector::has_reference_convention() const {
  return gains.size() >= 2 && gains(0) == 1.0 && phases(0) == 0.0 && phases(1) == 0.0;
}

void FrameSpec::validate(int num_sources) const {
  if (frame_length < 1) throw ConfigError("frame_length must be positive");
  if (sync_length < 2 || sync_length >= frame_length)
    throw ConfigError("sync_length must satisfy 2 <= sync_length < frame_length");
  if (static_cast<int>(sources.size()) != num_sources)
    throw ConfigError("frame spec needs one constellation per source");
  for (const auto &s : sources) {
    if (s.stretch < 1) throw ConfigError("stretch factor must be >= 1");
    if (s.offset < 0) throw ConfigError("stretch offset must be >= 0");
  }
}

void ScenarioConfig::validate() const {
  geometry.validate();
  const int m = geometry.num_sensors;
  const int n = sources.count();
  if (n < 1) throw ConfigError("at least one source is required");
  if (n >= m - 1) throw ConfigError("number of sources must satisfy N < M - 1");
  if (sources.powers.size() != n) throw ConfigError("one power per source is required");
  for (int k = 0; k < n; ++k) {
    if (!(sources.powers(k) > 0.0)) throw ConfigError("source powers must be positive");
    for (int l = 0; l < k; ++l)
      if (sources.azimuths(k) == sources.azimuths(l)) throw ConfigError("source azimuths must be distinct");
  }
  offsets.validate(m);
  if (!(sigma_v2 >= 0.0) || !(sigma_w2 >= 0.0)) throw ConfigError("noise variances must be nonnegative");
  if (sample_size < 1) throw ConfigError("sample_size must be >= 1");
  if (sources.distribution == SourceDistribution::FramedComm) {
    sources.frame.validate(n);
    if (sample_size % sources.frame.frame_length != 0)
      throw ConfigError("sample_size must be a multiple of frame_length for framed sources");
  }
}

double snr_db_to_sigma_v2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

CVector steering_vector(double alpha, const ArrayGeometry &geometry) {
  const double w = geometry.wavenumber_spacing() * std::cos(alpha);
  CVector a(geometry.num_sensors);
  for (int m = 0; m < geometry.num_sensors; ++m) a(m) = std::polar(1.0, w * m);
  return a;
}

CMatrix manifold_matrix(const Vector &alphas, const ArrayGeometry &geometry, std::vector<std::string> *warnings) {
  CMatrix a(geometry.num_sensors, alphas.size());
  for (Eigen::Index n = 0; n < alphas.size(); ++n) {
    a.col(n) = steering_vector(alphas(n), geometry);
    if (warnings) {
      for (Eigen::Index k = 0; k < n; ++k)
        if (alphas(k) == alphas(n)) {
          std::ostringstream os;
          os << "duplicate azimuth in columns " << k << " and " << n << ": manifold is rank deficient";
          warnings->push_back(os.str());
        }
    }
  }
  return a;
}

namespace {

double source_power_factor(const SourceEnsemble &sources) {
  return sources.distribution == SourceDistribution::FramedComm ? framed_nominal_power(sources.frame) : 1.0;
}

CVector offset_diagonal(const OffsetVector &offsets) {
  CVector d(offsets.gains.size());
  for (Eigen::Index m = 0; m < d.size(); ++m) d(m) = std::polar(offsets.gains(m), offsets.phases(m));
  return d;
}

// Unit-variance real draw for the non-Gaussian source models.
double unit_real(SourceDistribution dist, Rng &rng) {
  switch (dist) {
  case SourceDistribution::Bernoulli:
    return rng.bernoulli(0.5) ? 1.0 : -1.0;
  case SourceDistribution::Laplace: {
    // Laplace(0, 1) has variance 2.
    const double u = rng.uniform() - 0.5;
    const double x = (u < 0 ? 1.0 : -1.0) * std::log(1.0 - 2.0 * std::abs(u));
    return x / std::sqrt(2.0);
  }
  default:
    return rng.normal();
  }
}

cdouble draw_source(SourceDistribution dist, double power, Rng &rng) {
  if (dist == SourceDistribution::CircularGaussian) return rng.circular_normal(power);
  const double s = std::sqrt(0.5 * power);
  const double re = unit_real(dist, rng);
  const double im = unit_real(dist, rng);
  return {s * re, s * im};
}

cdouble draw_noise(NoiseDistribution dist, double variance, Rng &rng) {
  if (dist == NoiseDistribution::CircularGaussian) return rng.circular_normal(variance);
  // Uniform on (-a, a) per part with a^2 / 3 = variance / 2.
  const double a = std::sqrt(1.5 * variance);
  const double re = (2.0 * rng.uniform() - 1.0) * a;
  const double im = (2.0 * rng.uniform() - 1.0) * a;
  return {re, im};
}

SnapshotMatrix mix(const ScenarioConfig &scenario, const CMatrix &sources, Rng &rng, std::string model) {
  const int m = scenario.num_sensors();
  const int t_len = static_cast<int>(sources.cols());
  const CMatrix a = manifold_matrix(scenario.sources.azimuths, scenario.geometry);
  const CVector d = offset_diagonal(scenario.offsets);

  CMatrix x = a * sources;
  if (scenario.sigma_v2 > 0.0) {
    for (int t = 0; t < t_len; ++t)
      for (int k = 0; k < m; ++k) x(k, t) += draw_noise(scenario.noise_distribution, scenario.sigma_v2, rng);
  }
  x = d.asDiagonal() * x;
  if (scenario.sigma_w2 > 0.0) {
    for (int t = 0; t < t_len; ++t)
      for (int k = 0; k < m; ++k) x(k, t) += rng.circular_normal(scenario.sigma_w2);
  }
  return {std::move(x), std::move(model)};
}

} // namespace

CMatrix nominal_covariance(const ScenarioConfig &scenario) {
  const CMatrix a = manifold_matrix(scenario.sources.azimuths, scenario.geometry);
  const Vector p = scenario.sources.powers * source_power_factor(scenario.sources);
  CMatrix c = a * p.cast<cdouble>().asDiagonal() * a.adjoint();
  c.diagonal().array() += scenario.sigma_v2;
  return hermitian_part(c);
}

CMatrix analytic_covariance(const ScenarioConfig &scenario) {
  const CVector d = offset_diagonal(scenario.offsets);
  CMatrix r = d.asDiagonal() * nominal_covariance(scenario) * d.conjugate().asDiagonal();
  r.diagonal().array() += scenario.sigma_w2;
  return hermitian_part(r);
}

SnapshotMatrix synthesize(const ScenarioConfig &scenario) {
  Rng rng(scenario.seed);
  return synthesize(scenario, rng);
}

SnapshotMatrix synthesize(const ScenarioConfig &scenario, Rng &rng) {
  scenario.validate();
  const auto &src = scenario.sources;
  if (src.distribution == SourceDistribution::FramedComm) return synthesize_framed(scenario, src.frame, rng);

  const int n = src.count();
  const int t_len = scenario.sample_size;
  CMatrix s(n, t_len);
  for (int t = 0; t < t_len; ++t)
    for (int k = 0; k < n; ++k) s(k, t) = draw_source(src.distribution, src.powers(k), rng);

  const char *name = src.distribution == SourceDistribution::CircularGaussian ? "circular-complex-normal"
                     : src.distribution == SourceDistribution::Bernoulli      ? "bernoulli"
                                                                              : "laplace";
  return mix(scenario, s, rng, name);
}

double pam4_scale() { return 1.0 / std::sqrt(5.0); }

double framed_nominal_power(const FrameSpec &frame) {
  return (2.0 + frame.packet_length()) / static_cast<double>(frame.frame_length);
}

CVector framed_base_sequence(const FrameSpec &frame, Constellation constellation, int length, Rng &rng) {
  const int p_len = frame.packet_length();
  const int frames = (length + frame.frame_length - 1) / frame.frame_length;
  CVector out = CVector::Zero(static_cast<Eigen::Index>(frames) * frame.frame_length);
  std::vector<cdouble> symbols(static_cast<std::size_t>(p_len));
  std::vector<cdouble> twiddle(static_cast<std::size_t>(p_len));
  for (int q = 0; q < p_len; ++q) twiddle[static_cast<std::size_t>(q)] = std::polar(1.0, 2.0 * kPi * q / p_len);

  for (int k = 0; k < frames; ++k) {
    const int base = k * frame.frame_length;
    out(base) = 1.0;
    out(base + 1) = -1.0;
    if (constellation == Constellation::Psk8Ofdm) {
      for (auto &x : symbols) x = std::polar(1.0, 2.0 * kPi * rng.uniform_int(8) / 8.0);
      // Unitary inverse DFT: unit-modulus symbols give unit sample variance.
      const double norm = 1.0 / std::sqrt(static_cast<double>(p_len));
      for (int q = 0; q < p_len; ++q) {
        cdouble acc = 0.0;
        for (int f = 0; f < p_len; ++f)
          acc += symbols[static_cast<std::size_t>(f)] * twiddle[static_cast<std::size_t>((f * q) % p_len)];
        out(base + frame.sync_length + q) = acc * norm;
      }
    } else {
      for (int q = 0; q < p_len; ++q) out(base + frame.sync_length + q) = kPam4Levels[rng.uniform_int(4)] * pam4_scale();
    }
  }
  return out.head(length);
}

SnapshotMatrix synthesize_framed(const ScenarioConfig &scenario, const FrameSpec &frame) {
  Rng rng(scenario.seed);
  return synthesize_framed(scenario, frame, rng);
}

SnapshotMatrix synthesize_framed(const ScenarioConfig &scenario, const FrameSpec &frame, Rng &rng) {
  const int n = scenario.sources.count();
  frame.validate(n);
  if (scenario.sample_size % frame.frame_length != 0)
    throw ConfigError("sample_size must be a multiple of frame_length");
  const int t_len = scenario.sample_size;

  CMatrix s = CMatrix::Zero(n, t_len);
  for (int k = 0; k < n; ++k) {
    const auto &fs = frame.sources[static_cast<std::size_t>(k)];
    const CVector base = framed_base_sequence(frame, fs.constellation, t_len, rng);
    const double amp = std::sqrt(scenario.sources.powers(k));
    for (int t = 1; t <= t_len; ++t) {
      // floor((t - offset) / stretch), 1-based
      const int num = t - fs.offset;
      const int idx = num >= 0 ? num / fs.stretch : -((-num + fs.stretch - 1) / fs.stretch);
      if (idx >= 1) s(k, t - 1) = amp * base(idx - 1);
    }
  }
  return mix(scenario, s, rng, "framed-comm");
}

SnapshotMatrix apply_calibration(const SnapshotMatrix &snapshots, const Vector &gains, const Vector &phases) {
  const int m = snapshots.num_sensors();
  if (gains.size() != m || phases.size() != m) throw DomainError("calibration size does not match the array");
  CVector inv(m);
  for (int k = 0; k < m; ++k) {
    if (!(gains(k) > 0.0)) throw DomainError("gain estimates must be positive");
    inv(k) = std::polar(1.0 / gains(k), -phases(k));
  }
  return {inv.asDiagonal() * snapshots.data, snapshots.model + "+calibrated"};
}

SnapshotMatrix apply_calibration(const SnapshotMatrix &snapshots, const CalibrationEstimate &estimate) {
  return apply_calibration(snapshots, estimate.psi_hat, estimate.phi_hat);
}

} // namespace blindcal
