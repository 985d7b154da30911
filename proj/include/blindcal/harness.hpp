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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blindcal/array_model.hpp"
#include "blindcal/covariance.hpp"
#include "blindcal/owls.hpp"
#include "blindcal/types.hpp"

namespace blindcal {

enum class ExperimentId { MseVsT, MseVsSnr, NongaussianMseVsT, FramedMseVsT, DoaVsT, DoaVsSnr, OracleValidate };
std::string experiment_name(ExperimentId id);
ExperimentId parse_experiment(const std::string &name);

// How sigma_w2 is handled before the logs are taken.
//   Raw:            Sigma_hat is used as is (pure model, or the reduced system)
//   KnownFloor:     Sigma_hat - sigma_w2 I
//   EstimatedFloor: Sigma_hat - sigma_w2_hat I, sigma_w2_hat from the M - N smallest eigenvalues
enum class NoiseCase { Raw, KnownFloor, EstimatedFloor };
std::string noise_case_name(NoiseCase c);
NoiseCase parse_noise_case(const std::string &name);

// Snapshots -> estimate for any non-oracle method. Holds the sample
// covariance, its noise-case shift and (on first QML use) the cumulants, so
// several methods on the same record share that work.
class Calibrator {
public:
  Calibrator(const SnapshotMatrix &snapshots, NoiseCase noise_case, double sigma_w2, int num_sources);
  CalibrationEstimate run(Method method);
  const HermitianCovariance &sample() const { return sigma_; }
  const HermitianCovariance &logged() const { return work_; }

private:
  const SnapshotMatrix &snapshots_;
  HermitianCovariance sigma_;
  HermitianCovariance work_;
  std::optional<CumulantTable> kappa_;
};

enum class SweepAxis { SampleSize, SnrDb };
std::string sweep_axis_name(SweepAxis axis); // "T" or "snr_db"
SweepAxis parse_sweep_axis(const std::string &name);

struct ExperimentSpec {
  ExperimentId id = ExperimentId::MseVsT;
  ScenarioConfig base;
  SweepAxis axis = SweepAxis::SampleSize;
  std::vector<double> values;
  int trials = 2000;
  std::vector<Method> methods{Method::MlOwls, Method::SeparatedWls, Method::Ls};
  std::uint64_t master_seed = 1;
  NoiseCase noise_case = NoiseCase::Raw;
  int threads = 0; // 0: hardware concurrency
  void validate() const;
  bool is_doa() const { return id == ExperimentId::DoaVsT || id == ExperimentId::DoaVsSnr; }
};

// The scenario at one sweep point.
ScenarioConfig scenario_at(const ExperimentSpec &spec, double sweep_value);

struct TrialOptions {
  std::vector<Method> methods;
  NoiseCase noise_case = NoiseCase::Raw;
  bool doa = false;
};

struct MethodOutcome {
  Method method = Method::MlOwls;
  bool valid = false;
  std::string failure;        // reason when !valid
  std::vector<double> errors; // signed: psi_hat - psi, phi_hat - phi (rad); DOA errors in degrees
};

struct TrialOutcome {
  std::vector<MethodOutcome> methods;
};

// Parameter labels of a trial, in error order: psi_2..psi_M, phi_3..phi_M,
// or alpha_1..alpha_N for DOA runs.
std::vector<std::string> parameter_names(const ScenarioConfig &scenario, bool doa);

// One Monte Carlo trial; estimation failures mark a method invalid instead of throwing.
TrialOutcome run_trial(const ScenarioConfig &scenario, const TrialOptions &options, std::uint64_t trial_seed);

struct ResultRow {
  std::string method;
  std::string sweep_name;
  double sweep_value = 0.0;
  std::string parameter;
  double mse = 0.0;
  double crlb = 0.0; // NaN when no bound applies
  int trials = 0;
  int invalid = 0;
  double std_error = 0.0; // standard error of mse
  bool unreliable = false;
};

struct PerTrialRecord {
  std::string method;
  double sweep_value = 0.0;
  int trial = 0;
  bool valid = false;
  std::vector<double> errors;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<std::string> parameters; // per-parameter labels (aggregates excluded)
  std::vector<PerTrialRecord> per_trial; // filled when requested
  bool any_unreliable() const;
  const ResultRow *find(const std::string &method, double sweep_value, const std::string &parameter) const;
};

struct RunOptions {
  bool keep_per_trial = false;
};

// Deterministic given spec.master_seed, whatever spec.threads is.
ResultTable run_experiment(const ExperimentSpec &spec, const RunOptions &options = {});

// Snapshot-level check of the noise covariance approximation: max relative
// deviation between the analytic Lambda and the empirical covariance of xi.
// Entries of Lambda below 1e-3 / T are skipped.
struct OracleReport {
  double max_relative_deviation = 0.0; // covariance of xi vs Lambda
  double mean_relative_deviation = 0.0; // Mu-row means vs -1/(2T)
  int replicates = 0;
};
OracleReport oracle_validate(const ScenarioConfig &scenario, int replicates, std::uint64_t master_seed, int threads);

void write_csv(const ResultTable &table, std::ostream &out);
void emit_csv(const ResultTable &table, const std::string &path);
// method,sweep_value,trial,parameter,error,valid
void emit_per_trial_csv(const ResultTable &table, const std::string &path);

// `requested` if positive, else CALIB_THREADS if set, else the hardware concurrency.
int resolve_threads(int requested);

} // namespace blindcal
