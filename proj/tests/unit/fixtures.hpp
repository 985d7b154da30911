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

#include "blindcal/array_model.hpp"
#include "oracles.hpp"

namespace fixtures {

// Five-sensor array with three sources at 10 dB.
inline blindcal::ScenarioConfig five_sensor(int sample_size = 750, double snr_db = 10.0) {
  using namespace blindcal;
  ScenarioConfig sc;
  sc.geometry = {5, 0.5};
  sc.offsets.gains = (Vector(5) << 1.0, 1.3, 1.1, 0.7, 2.2).finished();
  sc.offsets.phases = (Vector(5) << 0.0, 0.0, 5.0, 11.0, -8.0).finished() * kDeg;
  sc.sources.azimuths = (Vector(3) << -35.0, -73.0, -28.0).finished() * kDeg;
  sc.sources.powers = Vector::Ones(3);
  sc.sigma_v2 = snr_db_to_sigma_v2(snr_db);
  sc.sample_size = sample_size;
  return sc;
}

inline oracle::Model as_model(const blindcal::ScenarioConfig &sc) {
  oracle::Model m;
  m.m = sc.num_sensors();
  m.spacing = sc.geometry.spacing_over_wavelength;
  m.gains.assign(sc.offsets.gains.data(), sc.offsets.gains.data() + sc.offsets.gains.size());
  m.phases.assign(sc.offsets.phases.data(), sc.offsets.phases.data() + sc.offsets.phases.size());
  m.azimuths.assign(sc.sources.azimuths.data(), sc.sources.azimuths.data() + sc.sources.azimuths.size());
  m.powers.assign(sc.sources.powers.data(), sc.sources.powers.data() + sc.sources.powers.size());
  m.sigma_v2 = sc.sigma_v2;
  m.sigma_w2 = sc.sigma_w2;
  return m;
}

} // namespace fixtures
