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

#include "blindcal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <thread>

#include "blindcal/bounds.hpp"
#include "blindcal/covariance.hpp"
#include "blindcal/doa.hpp"
#include "format.hpp"

namespace blindcal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::pair<ExperimentId, const char *>> &experiment_names() {
  static const std::vector<std::pair<ExperimentId, const char *>> names{
      {ExperimentId::MseVsT, "mse-vs-T"},
      {ExperimentId::MseVsSnr, "mse-vs-snr"},
      {ExperimentId::NongaussianMseVsT, "nongaussian-mse-vs-T"},
      {ExperimentId::FramedMseVsT, "framed-mse-vs-T"},
      {ExperimentId::DoaVsT, "doa-vs-T"},
      {ExperimentId::DoaVsSnr, "doa-vs-snr"},
      {ExperimentId::OracleValidate, "oracle-validate"},
  };
  return names;
}

// Runs body(0..count-1) on `threads` workers; each index is processed exactly once.
void parallel_for(int count, int threads, const std::function<void(int)> &body) {
  threads = std::clamp(threads, 1, std::max(count, 1));
  if (threads == 1) {
    for (int n = 0; n < count; ++n) body(n);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (int n = next++; n < count && !failed; n = next++) {
      try {
        body(n);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < threads - 1; ++w) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double wrap_angle(double x) { return std::remainder(x, 2.0 * kPi); }

bool gaussian_model(const ScenarioConfig &sc) {
  return sc.sources.distribution == SourceDistribution::CircularGaussian &&
         sc.noise_distribution == NoiseDistribution::CircularGaussian;
}

const std::vector<double> &music_grid() {
  static const std::vector<double> grid = default_grid();
  return grid;
}

} // namespace

std::string experiment_name(ExperimentId id) {
  for (const auto &[k, v] : experiment_names())
    if (k == id) return v;
  return "?";
}

ExperimentId parse_experiment(const std::string &name) {
  for (const auto &[k, v] : experiment_names())
    if (name == v) return k;
  throw ConfigError("unknown experiment id '" + name + "'");
}

std::string noise_case_name(NoiseCase c) {
  switch (c) {
  case NoiseCase::Raw: return "none";
  case NoiseCase::KnownFloor: return "known";
  case NoiseCase::EstimatedFloor: return "ml-ds";
  }
  return "?";
}

NoiseCase parse_noise_case(const std::string &name) {
  for (NoiseCase c : {NoiseCase::Raw, NoiseCase::KnownFloor, NoiseCase::EstimatedFloor})
    if (noise_case_name(c) == name) return c;
  throw ConfigError("unknown noise case '" + name + "' (none | known | ml-ds)");
}

std::string sweep_axis_name(SweepAxis axis) { return axis == SweepAxis::SampleSize ? "T" : "snr_db"; }

SweepAxis parse_sweep_axis(const std::string &name) {
  if (name == "T") return SweepAxis::SampleSize;
  if (name == "snr_db") return SweepAxis::SnrDb;
  throw ConfigError("unknown sweep axis '" + name + "' (T | snr_db)");
}

void ExperimentSpec::validate() const {
  if (values.empty()) throw ConfigError("experiment: empty sweep");
  for (std::size_t n = 1; n < values.size(); ++n)
    if (!(values[n] > values[n - 1])) throw ConfigError("experiment: sweep values must be strictly increasing");
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("experiment: non-finite sweep value");
    if (axis == SweepAxis::SampleSize && (v < 1.0 || v != std::floor(v)))
      throw ConfigError("experiment: sample sizes must be positive integers");
  }
  if (trials < 1) throw ConfigError("experiment: trials must be >= 1");
  if (methods.empty()) throw ConfigError("experiment: no methods");
  const int m = base.num_sensors();
  const int n = base.sources.count();
  for (Method meth : methods) {
    if (meth == Method::ReducedMlOwls && m < 4) throw ConfigError("experiment: R-ML-OWLS needs M >= 4");
  }
  if (noise_case == NoiseCase::EstimatedFloor && n >= m)
    throw ConfigError("experiment: the ml-ds case needs N < M");
  for (double v : values) scenario_at(*this, v).validate();
}

ScenarioConfig scenario_at(const ExperimentSpec &spec, double sweep_value) {
  ScenarioConfig sc = spec.base;
  if (spec.axis == SweepAxis::SampleSize)
    sc.sample_size = static_cast<int>(std::llround(sweep_value));
  else
    sc.sigma_v2 = snr_db_to_sigma_v2(sweep_value);
  return sc;
}

std::vector<std::string> parameter_names(const ScenarioConfig &scenario, bool doa) {
  std::vector<std::string> names;
  if (doa) {
    for (int n = 1; n <= scenario.sources.count(); ++n) names.push_back("alpha_" + std::to_string(n));
    return names;
  }
  const int m = scenario.num_sensors();
  for (int n = 2; n <= m; ++n) names.push_back("psi_" + std::to_string(n));
  for (int n = 3; n <= m; ++n) names.push_back("phi_" + std::to_string(n));
  return names;
}

Calibrator::Calibrator(const SnapshotMatrix &snapshots, NoiseCase noise_case, double sigma_w2, int num_sources)
    : snapshots_(snapshots), sigma_(sample_covariance(snapshots)), work_(sigma_) {
  if (noise_case == NoiseCase::KnownFloor)
    work_ = ds_shift(sigma_, sigma_w2);
  else if (noise_case == NoiseCase::EstimatedFloor)
    work_ = ml_ds_shift(sigma_, num_sources).covariance;
}

CalibrationEstimate Calibrator::run(Method method) {
  const int t = snapshots_.sample_size();
  switch (method) {
  case Method::MlOwls:
  case Method::SeparatedWls:
  case Method::QmlOwls: {
    const CorrelationSystem sys = make_system(work_, false);
    const CumulantTable *kp = nullptr;
    if (method == Method::QmlOwls) {
      if (!kappa_) kappa_ = estimate_cumulants(snapshots_);
      kp = &*kappa_;
    }
    const NoiseStatistics stats = noise_statistics(work_.matrix, sigma_.matrix, kp, t, false);
    return method == Method::SeparatedWls ? separated_wls(sys, stats) : owls_solve(sys, stats, method);
  }
  case Method::ReducedMlOwls:
    return reduced_owls(make_system(work_, true), noise_statistics(work_.matrix, sigma_.matrix, nullptr, t, true));
  case Method::Ls: return ls_baseline(work_);
  case Method::Oracle: break;
  }
  throw DomainError("the oracle needs the true offsets; it is not a snapshot-based method");
}

TrialOutcome run_trial(const ScenarioConfig &scenario, const TrialOptions &options, std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  const SnapshotMatrix snaps = synthesize(scenario, rng);
  const int m = scenario.num_sensors();

  Calibrator cal(snaps, options.noise_case, scenario.sigma_w2, scenario.sources.count());
  TrialOutcome out;
  for (Method method : options.methods) {
    MethodOutcome mo;
    mo.method = method;
    try {
      const CalibrationEstimate est =
          method == Method::Oracle ? oracle_estimate(scenario.offsets) : cal.run(method);

      if (options.doa) {
        const DoaEstimate doa = estimate_doas(snaps, est, scenario.sources.count(), music_grid(), scenario.geometry);
        mo.errors = doa_errors_deg(doa, scenario.sources.azimuths);
        mo.valid = !doa.detection_failed;
        if (!mo.valid) mo.failure = "fewer spectrum peaks than sources";
      } else {
        for (int n = 1; n < m; ++n) mo.errors.push_back(est.psi_hat(n) - scenario.offsets.gains(n));
        for (int n = 2; n < m; ++n) mo.errors.push_back(wrap_angle(est.phi_hat(n) - scenario.offsets.phases(n)));
        mo.valid = std::all_of(mo.errors.begin(), mo.errors.end(), [](double e) { return std::isfinite(e); });
        if (!mo.valid) mo.failure = "non-finite estimate";
      }
    } catch (const MeasurementError &e) {
      mo.failure = e.what();
    } catch (const SingularWeightError &e) {
      mo.failure = e.what();
    } catch (const DomainError &e) {
      mo.failure = e.what();
    }
    if (!mo.valid) mo.errors.assign(parameter_names(scenario, options.doa).size(), kNaN);
    out.methods.push_back(std::move(mo));
  }
  return out;
}

bool ResultTable::any_unreliable() const {
  return std::any_of(rows.begin(), rows.end(), [](const ResultRow &r) { return r.unreliable; });
}

const ResultRow *ResultTable::find(const std::string &method, double sweep_value, const std::string &parameter) const {
  for (const auto &r : rows)
    if (r.method == method && r.sweep_value == sweep_value && r.parameter == parameter) return &r;
  return nullptr;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char *env = std::getenv("CALIB_THREADS")) {
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 1024L));
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

namespace {

// Mean and standard error of a sample; NaN when empty.
std::pair<double, double> mean_and_se(const std::vector<double> &x) {
  if (x.empty()) return {kNaN, kNaN};
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / static_cast<double>(x.size());
  if (x.size() < 2) return {mean, kNaN};
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(x.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(x.size()))};
}

ResultTable run_oracle_experiment(const ExperimentSpec &spec, int threads) {
  ResultTable table;
  table.parameters = {"lambda_max_rel_dev", "eta_max_rel_dev"};
  for (std::size_t p = 0; p < spec.values.size(); ++p) {
    const ScenarioConfig sc = scenario_at(spec, spec.values[p]);
    const OracleReport rep = oracle_validate(sc, spec.trials, derive_seed(spec.master_seed, p), threads);
    for (int k = 0; k < 2; ++k) {
      ResultRow row;
      row.method = method_name(Method::Oracle);
      row.sweep_name = sweep_axis_name(spec.axis);
      row.sweep_value = spec.values[p];
      row.parameter = table.parameters[static_cast<std::size_t>(k)];
      row.mse = k == 0 ? rep.max_relative_deviation : rep.mean_relative_deviation;
      row.crlb = kNaN;
      row.trials = rep.replicates;
      table.rows.push_back(row);
    }
  }
  return table;
}

} // namespace

ResultTable run_experiment(const ExperimentSpec &spec, const RunOptions &options) {
  spec.validate();
  const int threads = resolve_threads(spec.threads);
  if (spec.id == ExperimentId::OracleValidate) return run_oracle_experiment(spec, threads);

  const bool doa = spec.is_doa();
  ResultTable table;
  table.parameters = parameter_names(spec.base, doa);
  const std::size_t np = table.parameters.size();
  const int m = spec.base.num_sensors();

  // Aggregates: index ranges into the per-trial error vector.
  struct Aggregate {
    std::string name;
    std::size_t begin, end;
  };
  std::vector<Aggregate> aggregates;
  if (doa) {
    aggregates.push_back({"alpha_mean", 0, np});
  } else {
    aggregates.push_back({"psi_mean", 0, static_cast<std::size_t>(m - 1)});
    aggregates.push_back({"phi_mean", static_cast<std::size_t>(m - 1), np});
  }

  TrialOptions topt;
  topt.methods = spec.methods;
  topt.noise_case = spec.noise_case;
  topt.doa = doa;

  for (std::size_t p = 0; p < spec.values.size(); ++p) {
    const double value = spec.values[p];
    const ScenarioConfig sc = scenario_at(spec, value);
    const std::uint64_t point_seed = derive_seed(spec.master_seed, p);

    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(spec.trials));
    parallel_for(spec.trials, threads, [&](int n) {
      outcomes[static_cast<std::size_t>(n)] = run_trial(sc, topt, derive_seed(point_seed, static_cast<std::uint64_t>(n)));
    });

    Vector crlb_values = Vector::Constant(static_cast<Eigen::Index>(np), kNaN);
    if (!doa && gaussian_model(sc)) {
      const CrlbReport rep = analytic_crlb(sc, sc.sample_size);
      for (int k = 0; k < m - 1; ++k) crlb_values(k) = rep.gain_bounds(k);
      for (int k = 0; k < m - 2; ++k) crlb_values(m - 1 + k) = rep.phase_bounds(k);
    }

    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
      const std::string name = method_name(spec.methods[mi]);
      std::vector<std::vector<double>> sq(np);
      std::vector<std::vector<double>> agg(aggregates.size());
      int invalid = 0;
      for (int n = 0; n < spec.trials; ++n) {
        const MethodOutcome &mo = outcomes[static_cast<std::size_t>(n)].methods[mi];
        if (options.keep_per_trial) table.per_trial.push_back({name, value, n, mo.valid, mo.errors});
        if (!mo.valid) {
          ++invalid;
          continue;
        }
        for (std::size_t k = 0; k < np; ++k) sq[k].push_back(mo.errors[k] * mo.errors[k]);
        for (std::size_t g = 0; g < aggregates.size(); ++g) {
          double s = 0.0;
          for (std::size_t k = aggregates[g].begin; k < aggregates[g].end; ++k) s += mo.errors[k] * mo.errors[k];
          agg[g].push_back(s / static_cast<double>(aggregates[g].end - aggregates[g].begin));
        }
      }
      const bool unreliable = invalid > 0.2 * spec.trials;
      auto push = [&](const std::string &param, const std::vector<double> &x, double bound) {
        ResultRow row;
        row.method = name;
        row.sweep_name = sweep_axis_name(spec.axis);
        row.sweep_value = value;
        row.parameter = param;
        std::tie(row.mse, row.std_error) = mean_and_se(x);
        row.crlb = bound;
        row.trials = spec.trials;
        row.invalid = invalid;
        row.unreliable = unreliable;
        table.rows.push_back(row);
      };
      for (std::size_t k = 0; k < np; ++k) push(table.parameters[k], sq[k], crlb_values(static_cast<Eigen::Index>(k)));
      for (std::size_t g = 0; g < aggregates.size(); ++g) {
        const auto &a = aggregates[g];
        const double bound =
            crlb_values.segment(static_cast<Eigen::Index>(a.begin), static_cast<Eigen::Index>(a.end - a.begin)).mean();
        push(a.name, agg[g], bound);
      }
    }
  }
  return table;
}

OracleReport oracle_validate(const ScenarioConfig &scenario, int replicates, std::uint64_t master_seed, int threads) {
  if (replicates < 2) throw DomainError("oracle_validate: need at least 2 replicates");
  const int t = scenario.sample_size;
  const HermitianCovariance truth{analytic_covariance(scenario), CovarianceKind::RawSigma, t};
  const Vector y_true = build_measurements(truth);
  const auto l = y_true.size();

  NoiseStatistics stats;
  if (gaussian_model(scenario)) {
    stats = noise_covariance_gaussian(truth, t, false);
  } else {
    // Cumulants of a non-Gaussian model from one long record.
    ScenarioConfig longrun = scenario;
    const int frame = scenario.sources.distribution == SourceDistribution::FramedComm
                          ? scenario.sources.frame.frame_length
                          : 1;
    longrun.sample_size = (400000 / frame) * frame;
    Rng rng(derive_seed(master_seed, ~0ULL));
    const CumulantTable kappa = estimate_cumulants(synthesize(longrun, rng));
    stats = noise_covariance_qml(truth, kappa, t, false);
  }

  std::vector<Vector> xi(static_cast<std::size_t>(replicates));
  parallel_for(replicates, resolve_threads(threads), [&](int n) {
    Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(n)));
    const HermitianCovariance s = sample_covariance(synthesize(scenario, rng));
    Vector d = build_measurements(s) - y_true;
    for (Eigen::Index a = 0; a < l; ++a)
      if (stats.eta(a) == 0.0) d(a) = wrap_angle(d(a)); // Nu rows
    xi[static_cast<std::size_t>(n)] = std::move(d);
  });

  Vector mean = Vector::Zero(l);
  for (const auto &x : xi) mean += x;
  mean /= replicates;
  Matrix cov = Matrix::Zero(l, l);
  for (const auto &x : xi) cov.noalias() += (x - mean) * (x - mean).transpose();
  cov /= (replicates - 1);

  OracleReport rep;
  rep.replicates = replicates;
  const double floor = 1e-3 / t;
  for (Eigen::Index a = 0; a < l; ++a)
    for (Eigen::Index b = 0; b < l; ++b)
      if (std::abs(stats.lambda(a, b)) > floor)
        rep.max_relative_deviation =
            std::max(rep.max_relative_deviation, std::abs(cov(a, b) - stats.lambda(a, b)) / std::abs(stats.lambda(a, b)));
  for (Eigen::Index a = 0; a < l; ++a)
    if (stats.eta(a) != 0.0)
      rep.mean_relative_deviation =
          std::max(rep.mean_relative_deviation, std::abs(mean(a) - stats.eta(a)) / std::abs(stats.eta(a)));
  return rep;
}

void write_csv(const ResultTable &table, std::ostream &out) {
  out << "method,sweep_name,sweep_value,parameter,mse,crlb,trials,invalid\n";
  for (const auto &r : table.rows)
    out << r.method << ',' << r.sweep_name << ',' << detail::format_double(r.sweep_value) << ',' << r.parameter << ','
        << detail::format_double(r.mse) << ',' << detail::format_double(r.crlb) << ',' << r.trials << ',' << r.invalid
        << '\n';
}

void emit_csv(const ResultTable &table, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(table, out);
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

void emit_per_trial_csv(const ResultTable &table, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "method,sweep_value,trial,parameter,error,valid\n";
  for (const auto &rec : table.per_trial)
    for (std::size_t k = 0; k < rec.errors.size() && k < table.parameters.size(); ++k)
      out << rec.method << ',' << detail::format_double(rec.sweep_value) << ',' << rec.trial << ','
          << table.parameters[k] << ',' << detail::format_double(rec.errors[k]) << ',' << (rec.valid ? 1 : 0) << '\n';
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace blindcal
