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

/* C interface to blindcal. Every object is an opaque handle owned by the
 * caller and released with the matching *_free function. Functions return a
 * blindcal_status; on failure blindcal_last_error() describes the problem
 * (per thread, valid until the next failing call on that thread). */

#ifndef BLINDCAL_BLINDCAL_H
#define BLINDCAL_BLINDCAL_H

#include <stddef.h>
#include <stdint.h>

#if defined(BLINDCAL_BUILDING_LIBRARY)
#define BLINDCAL_API __attribute__((visibility("default")))
#else
#define BLINDCAL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum blindcal_status {
  BLINDCAL_OK = 0,
  BLINDCAL_ERR_CONFIG = 1,      /* invalid scenario or experiment description */
  BLINDCAL_ERR_DOMAIN = 2,      /* argument outside an operation's domain */
  BLINDCAL_ERR_MEASUREMENT = 3, /* log of a zero / nonpositive covariance entry */
  BLINDCAL_ERR_SINGULAR = 4,    /* weight matrix not factorizable */
  BLINDCAL_ERR_IO = 5,
  BLINDCAL_ERR_ARGUMENT = 6,    /* null handle, short buffer, ... */
  BLINDCAL_ERR_INTERNAL = 7
} blindcal_status;

typedef enum blindcal_method {
  BLINDCAL_METHOD_ML_OWLS = 0,
  BLINDCAL_METHOD_QML_OWLS = 1,
  BLINDCAL_METHOD_R_ML_OWLS = 2,
  BLINDCAL_METHOD_LS = 3,
  BLINDCAL_METHOD_SEP_WLS = 4,
  BLINDCAL_METHOD_ORACLE = 5
} blindcal_method;

typedef enum blindcal_noise_case {
  BLINDCAL_CASE_NONE = 0,  /* sample covariance used as is */
  BLINDCAL_CASE_KNOWN = 1, /* known noise floor removed */
  BLINDCAL_CASE_ML_DS = 2  /* noise floor estimated from the smallest eigenvalues */
} blindcal_noise_case;

typedef struct blindcal_scenario blindcal_scenario;
typedef struct blindcal_snapshots blindcal_snapshots;
typedef struct blindcal_estimate blindcal_estimate;
typedef struct blindcal_experiment blindcal_experiment;
typedef struct blindcal_result blindcal_result;

typedef struct blindcal_row {
  const char *method;
  const char *sweep_name;
  double sweep_value;
  const char *parameter;
  double mse;
  double crlb; /* NaN when no bound applies */
  double std_error;
  int trials;
  int invalid;
  int unreliable;
} blindcal_row;

BLINDCAL_API const char *blindcal_version(void);
BLINDCAL_API const char *blindcal_last_error(void);
BLINDCAL_API const char *blindcal_status_name(blindcal_status status);
BLINDCAL_API const char *blindcal_method_name(blindcal_method method);
BLINDCAL_API blindcal_status blindcal_method_from_name(const char *name, blindcal_method *out);

/* Scenarios (INI text, section [array_model] and optional [frame]). */
BLINDCAL_API blindcal_status blindcal_scenario_load(const char *path, blindcal_scenario **out);
BLINDCAL_API blindcal_status blindcal_scenario_parse(const char *text, blindcal_scenario **out);
BLINDCAL_API void blindcal_scenario_free(blindcal_scenario *scenario);
BLINDCAL_API int blindcal_scenario_num_sensors(const blindcal_scenario *scenario);
BLINDCAL_API int blindcal_scenario_num_sources(const blindcal_scenario *scenario);
BLINDCAL_API blindcal_status blindcal_scenario_set_sample_size(blindcal_scenario *scenario, int sample_size);
/* Analytic covariance, M*M (re, im) pairs row-major: 2*M*M doubles. */
BLINDCAL_API blindcal_status blindcal_scenario_covariance(const blindcal_scenario *scenario, double *out, size_t len);
/* Bounds at the true parameters: M-1 gain bounds and M-2 phase bounds (rad^2). */
BLINDCAL_API blindcal_status blindcal_crlb(const blindcal_scenario *scenario, int sample_size, double *gain_bounds,
                                           size_t gain_len, double *phase_bounds, size_t phase_len);

/* Snapshots. */
BLINDCAL_API blindcal_status blindcal_synthesize(const blindcal_scenario *scenario, uint64_t seed,
                                                 blindcal_snapshots **out);
/* Wraps caller data: M*T (re, im) pairs, sensor-major (all T samples of sensor 1 first). */
BLINDCAL_API blindcal_status blindcal_snapshots_from_data(const double *data, int num_sensors, int sample_size,
                                                          blindcal_snapshots **out);
BLINDCAL_API void blindcal_snapshots_free(blindcal_snapshots *snapshots);
BLINDCAL_API blindcal_status blindcal_snapshots_dims(const blindcal_snapshots *snapshots, int *num_sensors,
                                                     int *sample_size);
BLINDCAL_API blindcal_status blindcal_snapshots_data(const blindcal_snapshots *snapshots, double *out, size_t len);

/* Calibration. `sigma_w2` is used by BLINDCAL_CASE_KNOWN, `num_sources` by
 * BLINDCAL_CASE_ML_DS. BLINDCAL_METHOD_ORACLE is not available here. */
BLINDCAL_API blindcal_status blindcal_calibrate(const blindcal_snapshots *snapshots, blindcal_method method,
                                                blindcal_noise_case noise_case, double sigma_w2, int num_sources,
                                                blindcal_estimate **out);
BLINDCAL_API void blindcal_estimate_free(blindcal_estimate *estimate);
BLINDCAL_API int blindcal_estimate_num_sensors(const blindcal_estimate *estimate);
BLINDCAL_API blindcal_status blindcal_estimate_gains(const blindcal_estimate *estimate, double *out, size_t len);
BLINDCAL_API blindcal_status blindcal_estimate_phases(const blindcal_estimate *estimate, double *out, size_t len);
/* (4M-4)^2 doubles, row-major. */
BLINDCAL_API blindcal_status blindcal_estimate_covariance(const blindcal_estimate *estimate, double *out, size_t len);
/* Writes a NUL-terminated CSV line; *needed receives the size including the NUL. */
BLINDCAL_API blindcal_status blindcal_estimate_csv(const blindcal_estimate *estimate, char *buffer, size_t len,
                                                   size_t *needed);
BLINDCAL_API blindcal_status blindcal_apply_calibration(const blindcal_snapshots *snapshots,
                                                        const blindcal_estimate *estimate, blindcal_snapshots **out);
/* MUSIC on calibrated snapshots over the default grid; angles in radians, ascending. */
BLINDCAL_API blindcal_status blindcal_estimate_doas(const blindcal_snapshots *snapshots,
                                                    const blindcal_estimate *estimate, int num_sources,
                                                    double spacing_over_wavelength, double *angles, size_t len,
                                                    int *detection_failed);

/* Experiments (INI with an [experiment] section). */
BLINDCAL_API blindcal_status blindcal_experiment_load(const char *path, blindcal_experiment **out);
BLINDCAL_API blindcal_status blindcal_experiment_parse(const char *text, blindcal_experiment **out);
BLINDCAL_API void blindcal_experiment_free(blindcal_experiment *experiment);
BLINDCAL_API blindcal_status blindcal_experiment_set_id(blindcal_experiment *experiment, const char *id);
BLINDCAL_API blindcal_status blindcal_experiment_set_trials(blindcal_experiment *experiment, int trials);
BLINDCAL_API blindcal_status blindcal_experiment_set_seed(blindcal_experiment *experiment, uint64_t seed);
BLINDCAL_API blindcal_status blindcal_experiment_set_threads(blindcal_experiment *experiment, int threads);
BLINDCAL_API const char *blindcal_experiment_id(const blindcal_experiment *experiment);
BLINDCAL_API blindcal_status blindcal_experiment_run(const blindcal_experiment *experiment, int keep_per_trial,
                                                     blindcal_result **out);

BLINDCAL_API void blindcal_result_free(blindcal_result *result);
BLINDCAL_API size_t blindcal_result_num_rows(const blindcal_result *result);
BLINDCAL_API blindcal_status blindcal_result_row(const blindcal_result *result, size_t index, blindcal_row *out);
BLINDCAL_API int blindcal_result_unreliable(const blindcal_result *result);
/* Path "-" writes to standard output. */
BLINDCAL_API blindcal_status blindcal_result_write_csv(const blindcal_result *result, const char *path);
BLINDCAL_API blindcal_status blindcal_result_write_per_trial_csv(const blindcal_result *result, const char *path);

#ifdef __cplusplus
}
#endif

#endif /* BLINDCAL_BLINDCAL_H */
