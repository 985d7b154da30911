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

// calibctl: run a configured Monte Carlo calibration experiment and write
// its result table as CSV. Exit codes: 0 ok, 2 configuration error,
// 3 unreliable results (more than 20% invalid trials at some sweep point),
// 1 anything else.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "blindcal/blindcal.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitUnreliable = 3;

struct ExperimentDeleter {
  void operator()(blindcal_experiment *e) const { blindcal_experiment_free(e); }
};
struct ResultDeleter {
  void operator()(blindcal_result *r) const { blindcal_result_free(r); }
};

int report(blindcal_status st, const std::string &context) {
  std::cerr << "calibctl: " << context << ": " << blindcal_last_error() << '\n';
  return st == BLINDCAL_ERR_CONFIG ? kExitConfig : kExitFailure;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Blind gain/phase calibration experiments for uniform linear arrays"};
  std::string config_path;
  std::optional<std::string> experiment_id;
  std::string out_path = "-";
  std::optional<std::string> per_trial_path;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  app.add_option("--config", config_path, "experiment configuration (INI)")->required();
  app.add_option("--experiment", experiment_id,
                 "experiment id: mse-vs-T, mse-vs-snr, nongaussian-mse-vs-T, framed-mse-vs-T, doa-vs-T, "
                 "doa-vs-snr, oracle-validate (default: the one in the config)");
  app.add_option("--out", out_path, "result CSV path, - for stdout");
  app.add_option("--trials", trials, "override the number of trials per sweep point")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "override the master seed");
  app.add_option("--threads", threads, "worker threads (default: CALIB_THREADS, else all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--per-trial", per_trial_path, "also write per-trial signed errors to this CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitConfig;
  }

  blindcal_experiment *raw = nullptr;
  if (const auto st = blindcal_experiment_load(config_path.c_str(), &raw); st != BLINDCAL_OK)
    return report(st, "loading '" + config_path + "'");
  std::unique_ptr<blindcal_experiment, ExperimentDeleter> experiment(raw);

  if (experiment_id) {
    if (const auto st = blindcal_experiment_set_id(experiment.get(), experiment_id->c_str()); st != BLINDCAL_OK) {
      std::cerr << app.help();
      return report(st, "--experiment " + *experiment_id);
    }
  }
  if (trials)
    if (const auto st = blindcal_experiment_set_trials(experiment.get(), *trials); st != BLINDCAL_OK)
      return report(st, "--trials");
  if (seed)
    if (const auto st = blindcal_experiment_set_seed(experiment.get(), *seed); st != BLINDCAL_OK)
      return report(st, "--seed");
  if (threads)
    if (const auto st = blindcal_experiment_set_threads(experiment.get(), *threads); st != BLINDCAL_OK)
      return report(st, "--threads");

  blindcal_result *raw_result = nullptr;
  if (const auto st = blindcal_experiment_run(experiment.get(), per_trial_path ? 1 : 0, &raw_result);
      st != BLINDCAL_OK)
    return report(st, std::string("running ") + blindcal_experiment_id(experiment.get()));
  std::unique_ptr<blindcal_result, ResultDeleter> result(raw_result);

  if (const auto st = blindcal_result_write_csv(result.get(), out_path.c_str()); st != BLINDCAL_OK)
    return report(st, "writing '" + out_path + "'");
  if (per_trial_path)
    if (const auto st = blindcal_result_write_per_trial_csv(result.get(), per_trial_path->c_str()); st != BLINDCAL_OK)
      return report(st, "writing '" + *per_trial_path + "'");

  if (blindcal_result_unreliable(result.get())) {
    std::cerr << "calibctl: more than 20% of the trials failed at some sweep point; results are unreliable\n";
    return kExitUnreliable;
  }
  return kExitOk;
}
