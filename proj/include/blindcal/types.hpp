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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace blindcal {

using cdouble = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDeg = kPi / 180.0;

// Error hierarchy. The C API maps each class onto a status code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid scenario / experiment description.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Argument outside the domain of an operation (e.g. N >= M).
class DomainError : public Error {
public:
  using Error::Error;
};

// log of a zero / nonpositive-real covariance entry. Marks a trial invalid.
class MeasurementError : public Error {
public:
  using Error::Error;
};

// Weight matrix could not be factorized. Marks a trial invalid.
class SingularWeightError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace blindcal
