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

#include "blindcal/blindcal.h"

#include <cstring>
#include <iostream>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "blindcal/bounds.hpp"
#include "blindcal/doa.hpp"
#include "blindcal/harness.hpp"
#include "blindcal/scenario_io.hpp"

using namespace blindcal;

struct blindcal_scenario {
  ScenarioConfig config;
};
struct blindcal_snapshots {
  SnapshotMatrix snapshots;
};
struct blindcal_estimate {
  CalibrationEstimate estimate;
};
struct blindcal_experiment {
  ExperimentSpec spec;
  std::string id;
};
struct blindcal_result {
  ResultTable table;
};

namespace {

thread_local std::string g_last_error;

blindcal_status fail(blindcal_status status, const std::string &message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F> blindcal_status guarded(F &&body) {
  try {
    body();
    return BLINDCAL_OK;
  } catch (const ConfigError &e) {
    return fail(BLINDCAL_ERR_CONFIG, e.what());
  } catch (const DomainError &e) {
    return fail(BLINDCAL_ERR_DOMAIN, e.what());
  } catch (const MeasurementError &e) {
    return fail(BLINDCAL_ERR_MEASUREMENT, e.what());
  } catch (const SingularWeightError &e) {
    return fail(BLINDCAL_ERR_SINGULAR, e.what());
  } catch (const IoError &e) {
    return fail(BLINDCAL_ERR_IO, e.what());
  } catch (const std::bad_alloc &) {
    return fail(BLINDCAL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(BLINDCAL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BLINDCAL_ERR_INTERNAL, "unknown error");
  }
}

#define BLINDCAL_REQUIRE(cond, what)                                                                                   \
  do {                                                                                                                 \
    if (!(cond)) return fail(BLINDCAL_ERR_ARGUMENT, what);                                                             \
  } while (0)

Method to_method(blindcal_method m) {
  switch (m) {
  case BLINDCAL_METHOD_ML_OWLS: return Method::MlOwls;
  case BLINDCAL_METHOD_QML_OWLS: return Method::QmlOwls;
  case BLINDCAL_METHOD_R_ML_OWLS: return Method::ReducedMlOwls;
  case BLINDCAL_METHOD_LS: return Method::Ls;
  case BLINDCAL_METHOD_SEP_WLS: return Method::SeparatedWls;
  case BLINDCAL_METHOD_ORACLE: return Method::Oracle;
  }
  throw DomainError("unknown method code " + std::to_string(static_cast<int>(m)));
}

NoiseCase to_case(blindcal_noise_case c) {
  switch (c) {
  case BLINDCAL_CASE_NONE: return NoiseCase::Raw;
  case BLINDCAL_CASE_KNOWN: return NoiseCase::KnownFloor;
  case BLINDCAL_CASE_ML_DS: return NoiseCase::EstimatedFloor;
  }
  throw DomainError("unknown noise case code " + std::to_string(static_cast<int>(c)));
}

template <typename V> blindcal_status copy_out(const V &v, double *out, size_t len) {
  BLINDCAL_REQUIRE(out, "null output buffer");
  const auto n = static_cast<size_t>(v.size());
  if (len < n) return fail(BLINDCAL_ERR_ARGUMENT, "output buffer too short: need " + std::to_string(n));
  for (size_t k = 0; k < n; ++k) out[k] = v(static_cast<Eigen::Index>(k));
  return BLINDCAL_OK;
}

} // namespace

extern "C" {

const char *blindcal_version(void) { return "0.1.0"; }

const char *blindcal_last_error(void) { return g_last_error.c_str(); }

const char *blindcal_status_name(blindcal_status status) {
  switch (status) {
  case BLINDCAL_OK: return "ok";
  case BLINDCAL_ERR_CONFIG: return "configuration error";
  case BLINDCAL_ERR_DOMAIN: return "domain error";
  case BLINDCAL_ERR_MEASUREMENT: return "measurement error";
  case BLINDCAL_ERR_SINGULAR: return "singular weight matrix";
  case BLINDCAL_ERR_IO: return "i/o error";
  case BLINDCAL_ERR_ARGUMENT: return "invalid argument";
  case BLINDCAL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char *blindcal_method_name(blindcal_method method) {
  switch (method) {
  case BLINDCAL_METHOD_ML_OWLS: return "ML-OWLS";
  case BLINDCAL_METHOD_QML_OWLS: return "QML-OWLS";
  case BLINDCAL_METHOD_R_ML_OWLS: return "R-ML-OWLS";
  case BLINDCAL_METHOD_LS: return "LS";
  case BLINDCAL_METHOD_SEP_WLS: return "SEP-WLS";
  case BLINDCAL_METHOD_ORACLE: return "ORACLE";
  }
  return "?";
}

blindcal_status blindcal_method_from_name(const char *name, blindcal_method *out) {
  BLINDCAL_REQUIRE(name && out, "null argument");
  for (int k = BLINDCAL_METHOD_ML_OWLS; k <= BLINDCAL_METHOD_ORACLE; ++k)
    if (std::strcmp(name, blindcal_method_name(static_cast<blindcal_method>(k))) == 0) {
      *out = static_cast<blindcal_method>(k);
      return BLINDCAL_OK;
    }
  return fail(BLINDCAL_ERR_CONFIG, std::string("unknown method '") + name + "'");
}

// ---- scenarios

blindcal_status blindcal_scenario_load(const char *path, blindcal_scenario **out) {
  BLINDCAL_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new blindcal_scenario{load_scenario(path)}; });
}

blindcal_status blindcal_scenario_parse(const char *text, blindcal_scenario **out) {
  BLINDCAL_REQUIRE(text && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new blindcal_scenario{parse_scenario(text)}; });
}

void blindcal_scenario_free(blindcal_scenario *scenario) { delete scenario; }

int blindcal_scenario_num_sensors(const blindcal_scenario *scenario) {
  return scenario ? scenario->config.num_sensors() : 0;
}

int blindcal_scenario_num_sources(const blindcal_scenario *scenario) {
  return scenario ? scenario->config.sources.count() : 0;
}

blindcal_status blindcal_scenario_set_sample_size(blindcal_scenario *scenario, int sample_size) {
  BLINDCAL_REQUIRE(scenario, "null scenario");
  return guarded([&] {
    ScenarioConfig next = scenario->config;
    next.sample_size = sample_size;
    next.validate();
    scenario->config = next;
  });
}

blindcal_status blindcal_scenario_covariance(const blindcal_scenario *scenario, double *out, size_t len) {
  BLINDCAL_REQUIRE(scenario && out, "null argument");
  const int m = scenario->config.num_sensors();
  const auto need = static_cast<size_t>(2 * m * m);
  if (len < need) return fail(BLINDCAL_ERR_ARGUMENT, "output buffer too short: need " + std::to_string(need));
  return guarded([&] {
    const CMatrix s = analytic_covariance(scenario->config);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        out[2 * (i * m + j)] = s(i, j).real();
        out[2 * (i * m + j) + 1] = s(i, j).imag();
      }
  });
}

blindcal_status blindcal_crlb(const blindcal_scenario *scenario, int sample_size, double *gain_bounds,
                              size_t gain_len, double *phase_bounds, size_t phase_len) {
  BLINDCAL_REQUIRE(scenario && gain_bounds && phase_bounds, "null argument");
  BLINDCAL_REQUIRE(sample_size >= 1, "sample size must be >= 1");
  CrlbReport rep;
  const blindcal_status st = guarded([&] { rep = analytic_crlb(scenario->config, sample_size); });
  if (st != BLINDCAL_OK) return st;
  if (const auto s = copy_out(rep.gain_bounds, gain_bounds, gain_len); s != BLINDCAL_OK) return s;
  return copy_out(rep.phase_bounds, phase_bounds, phase_len);
}

// ---- snapshots

blindcal_status blindcal_synthesize(const blindcal_scenario *scenario, uint64_t seed, blindcal_snapshots **out) {
  BLINDCAL_REQUIRE(scenario && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    Rng rng(seed);
    *out = new blindcal_snapshots{synthesize(scenario->config, rng)};
  });
}

blindcal_status blindcal_snapshots_from_data(const double *data, int num_sensors, int sample_size,
                                             blindcal_snapshots **out) {
  BLINDCAL_REQUIRE(data && out, "null argument");
  BLINDCAL_REQUIRE(num_sensors >= 2 && sample_size >= 1, "need M >= 2 and T >= 1");
  *out = nullptr;
  return guarded([&] {
    SnapshotMatrix s;
    s.model = "external";
    s.data.resize(num_sensors, sample_size);
    for (int m = 0; m < num_sensors; ++m)
      for (int t = 0; t < sample_size; ++t) {
        const size_t k = 2 * (static_cast<size_t>(m) * sample_size + t);
        s.data(m, t) = cdouble(data[k], data[k + 1]);
      }
    if (!s.data.allFinite()) throw DomainError("snapshots contain non-finite values");
    *out = new blindcal_snapshots{std::move(s)};
  });
}

void blindcal_snapshots_free(blindcal_snapshots *snapshots) { delete snapshots; }

blindcal_status blindcal_snapshots_dims(const blindcal_snapshots *snapshots, int *num_sensors, int *sample_size) {
  BLINDCAL_REQUIRE(snapshots && num_sensors && sample_size, "null argument");
  *num_sensors = snapshots->snapshots.num_sensors();
  *sample_size = snapshots->snapshots.sample_size();
  return BLINDCAL_OK;
}

blindcal_status blindcal_snapshots_data(const blindcal_snapshots *snapshots, double *out, size_t len) {
  BLINDCAL_REQUIRE(snapshots && out, "null argument");
  const CMatrix &d = snapshots->snapshots.data;
  const auto need = static_cast<size_t>(2 * d.size());
  if (len < need) return fail(BLINDCAL_ERR_ARGUMENT, "output buffer too short: need " + std::to_string(need));
  for (Eigen::Index m = 0; m < d.rows(); ++m)
    for (Eigen::Index t = 0; t < d.cols(); ++t) {
      const size_t k = 2 * static_cast<size_t>(m * d.cols() + t);
      out[k] = d(m, t).real();
      out[k + 1] = d(m, t).imag();
    }
  return BLINDCAL_OK;
}

// ---- estimation

blindcal_status blindcal_calibrate(const blindcal_snapshots *snapshots, blindcal_method method,
                                   blindcal_noise_case noise_case, double sigma_w2, int num_sources,
                                   blindcal_estimate **out) {
  BLINDCAL_REQUIRE(snapshots && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const Method meth = to_method(method);
    const NoiseCase c = to_case(noise_case);
    if (c == NoiseCase::EstimatedFloor && (num_sources < 1 || num_sources >= snapshots->snapshots.num_sensors()))
      throw DomainError("ml-ds case needs 1 <= N < M");
    Calibrator cal(snapshots->snapshots, c, sigma_w2, num_sources);
    *out = new blindcal_estimate{cal.run(meth)};
  });
}

void blindcal_estimate_free(blindcal_estimate *estimate) { delete estimate; }

int blindcal_estimate_num_sensors(const blindcal_estimate *estimate) {
  return estimate ? estimate->estimate.num_sensors : 0;
}

blindcal_status blindcal_estimate_gains(const blindcal_estimate *estimate, double *out, size_t len) {
  BLINDCAL_REQUIRE(estimate, "null estimate");
  return copy_out(estimate->estimate.psi_hat, out, len);
}

blindcal_status blindcal_estimate_phases(const blindcal_estimate *estimate, double *out, size_t len) {
  BLINDCAL_REQUIRE(estimate, "null estimate");
  return copy_out(estimate->estimate.phi_hat, out, len);
}

blindcal_status blindcal_estimate_covariance(const blindcal_estimate *estimate, double *out, size_t len) {
  BLINDCAL_REQUIRE(estimate && out, "null argument");
  const Matrix &c = estimate->estimate.est_covariance;
  const auto need = static_cast<size_t>(c.size());
  if (len < need) return fail(BLINDCAL_ERR_ARGUMENT, "output buffer too short: need " + std::to_string(need));
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) out[static_cast<size_t>(i * c.cols() + j)] = c(i, j);
  return BLINDCAL_OK;
}

blindcal_status blindcal_estimate_csv(const blindcal_estimate *estimate, char *buffer, size_t len, size_t *needed) {
  BLINDCAL_REQUIRE(estimate, "null estimate");
  std::string line;
  const blindcal_status st = guarded([&] { line = estimate_to_csv(estimate->estimate); });
  if (st != BLINDCAL_OK) return st;
  if (needed) *needed = line.size() + 1;
  if (!buffer || len < line.size() + 1) return fail(BLINDCAL_ERR_ARGUMENT, "buffer too short");
  std::memcpy(buffer, line.c_str(), line.size() + 1);
  return BLINDCAL_OK;
}

blindcal_status blindcal_apply_calibration(const blindcal_snapshots *snapshots, const blindcal_estimate *estimate,
                                           blindcal_snapshots **out) {
  BLINDCAL_REQUIRE(snapshots && estimate && out, "null argument");
  *out = nullptr;
  return guarded(
      [&] { *out = new blindcal_snapshots{apply_calibration(snapshots->snapshots, estimate->estimate)}; });
}

blindcal_status blindcal_estimate_doas(const blindcal_snapshots *snapshots, const blindcal_estimate *estimate,
                                       int num_sources, double spacing_over_wavelength, double *angles, size_t len,
                                       int *detection_failed) {
  BLINDCAL_REQUIRE(snapshots && estimate && angles, "null argument");
  BLINDCAL_REQUIRE(num_sources >= 1 && len >= static_cast<size_t>(num_sources), "output buffer too short");
  return guarded([&] {
    ArrayGeometry geom{snapshots->snapshots.num_sensors(), spacing_over_wavelength};
    geom.validate();
    const std::vector<double> grid = default_grid();
    const DoaEstimate doa = estimate_doas(snapshots->snapshots, estimate->estimate, num_sources, grid, geom);
    for (size_t k = 0; k < static_cast<size_t>(num_sources); ++k)
      angles[k] = k < doa.angles.size() ? doa.angles[k] : std::numeric_limits<double>::quiet_NaN();
    if (detection_failed) *detection_failed = doa.detection_failed ? 1 : 0;
  });
}

// ---- experiments

blindcal_status blindcal_experiment_load(const char *path, blindcal_experiment **out) {
  BLINDCAL_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    ExperimentSpec spec = load_experiment(path);
    *out = new blindcal_experiment{spec, experiment_name(spec.id)};
  });
}

blindcal_status blindcal_experiment_parse(const char *text, blindcal_experiment **out) {
  BLINDCAL_REQUIRE(text && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    ExperimentSpec spec = parse_experiment_text(text);
    *out = new blindcal_experiment{spec, experiment_name(spec.id)};
  });
}

void blindcal_experiment_free(blindcal_experiment *experiment) { delete experiment; }

blindcal_status blindcal_experiment_set_id(blindcal_experiment *experiment, const char *id) {
  BLINDCAL_REQUIRE(experiment && id, "null argument");
  return guarded([&] {
    ExperimentSpec next = experiment->spec;
    next.id = parse_experiment(id);
    next.validate();
    experiment->spec = next;
    experiment->id = experiment_name(next.id);
  });
}

blindcal_status blindcal_experiment_set_trials(blindcal_experiment *experiment, int trials) {
  BLINDCAL_REQUIRE(experiment, "null experiment");
  if (trials < 1) return fail(BLINDCAL_ERR_CONFIG, "trials must be >= 1");
  experiment->spec.trials = trials;
  return BLINDCAL_OK;
}

blindcal_status blindcal_experiment_set_seed(blindcal_experiment *experiment, uint64_t seed) {
  BLINDCAL_REQUIRE(experiment, "null experiment");
  experiment->spec.master_seed = seed;
  return BLINDCAL_OK;
}

blindcal_status blindcal_experiment_set_threads(blindcal_experiment *experiment, int threads) {
  BLINDCAL_REQUIRE(experiment, "null experiment");
  if (threads < 0) return fail(BLINDCAL_ERR_CONFIG, "threads must be >= 0");
  experiment->spec.threads = threads;
  return BLINDCAL_OK;
}

const char *blindcal_experiment_id(const blindcal_experiment *experiment) {
  return experiment ? experiment->id.c_str() : "";
}

blindcal_status blindcal_experiment_run(const blindcal_experiment *experiment, int keep_per_trial,
                                        blindcal_result **out) {
  BLINDCAL_REQUIRE(experiment && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    RunOptions opt;
    opt.keep_per_trial = keep_per_trial != 0;
    *out = new blindcal_result{run_experiment(experiment->spec, opt)};
  });
}

void blindcal_result_free(blindcal_result *result) { delete result; }

size_t blindcal_result_num_rows(const blindcal_result *result) { return result ? result->table.rows.size() : 0; }

blindcal_status blindcal_result_row(const blindcal_result *result, size_t index, blindcal_row *out) {
  BLINDCAL_REQUIRE(result && out, "null argument");
  BLINDCAL_REQUIRE(index < result->table.rows.size(), "row index out of range");
  const ResultRow &r = result->table.rows[index];
  out->method = r.method.c_str();
  out->sweep_name = r.sweep_name.c_str();
  out->sweep_value = r.sweep_value;
  out->parameter = r.parameter.c_str();
  out->mse = r.mse;
  out->crlb = r.crlb;
  out->std_error = r.std_error;
  out->trials = r.trials;
  out->invalid = r.invalid;
  out->unreliable = r.unreliable ? 1 : 0;
  return BLINDCAL_OK;
}

int blindcal_result_unreliable(const blindcal_result *result) { return result && result->table.any_unreliable(); }

blindcal_status blindcal_result_write_csv(const blindcal_result *result, const char *path) {
  BLINDCAL_REQUIRE(result && path, "null argument");
  return guarded([&] {
    if (std::strcmp(path, "-") == 0) {
      write_csv(result->table, std::cout);
      std::cout.flush();
    } else {
      emit_csv(result->table, path);
    }
  });
}

blindcal_status blindcal_result_write_per_trial_csv(const blindcal_result *result, const char *path) {
  BLINDCAL_REQUIRE(result && path, "null argument");
  if (result->table.per_trial.empty() && !result->table.rows.empty())
    return fail(BLINDCAL_ERR_ARGUMENT, "per-trial errors were not kept for this run");
  return guarded([&] { emit_per_trial_csv(result->table, path); });
}

} // extern "C"
