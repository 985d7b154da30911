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

#include <string>

#include "blindcal/array_model.hpp"
#include "blindcal/harness.hpp"

namespace blindcal {

// INI-style configuration. Section [array_model] carries the scenario,
// [frame] the framed-source layout, [experiment] the Monte Carlo sweep.
// Angles are in degrees in the file and radians in memory.
//
//   [array_model]
//   num_sensors = 5
//   spacing_over_wavelength = 0.5
//   gains = 1, 1.3, 1.1, 0.7, 2.2
//   phases_deg = 0, 0, 5, 11, -8
//   azimuths_deg = -35, -73, -28
//   powers = 1, 1, 1
//   distribution = gaussian        ; gaussian | bernoulli | laplace | framed
//   noise_distribution = gaussian  ; gaussian | uniform
//   snr_db = 10                    ; or sigma_v2 = 0.1
//   sigma_w2 = 0
//   sample_size = 750
//   seed = 1
ScenarioConfig load_scenario(const std::string &path);
ScenarioConfig parse_scenario(const std::string &text);

//   [experiment]
//   id = mse-vs-T
//   sweep = T                      ; T | snr_db
//   values = 200, 400, 800
//   trials = 2000
//   methods = ML-OWLS, SEP-WLS, LS
//   master_seed = 1
//   case = none                    ; none | known | ml-ds
//   threads = 0
ExperimentSpec load_experiment(const std::string &path);
ExperimentSpec parse_experiment_text(const std::string &text);

} // namespace blindcal
