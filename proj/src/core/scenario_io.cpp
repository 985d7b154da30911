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

#include "blindcal/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "format.hpp"

namespace blindcal {
namespace {

namespace pt = boost::property_tree;

pt::ptree read_ini_text(const std::string &text, const std::string &origin) {
  std::istringstream in(text);
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Strip trailing ';' / '#' comments, which read_ini only honours on whole lines.
std::string clean(std::string value) {
  const auto cut = value.find_first_of(";#");
  if (cut != std::string::npos) value.erase(cut);
  boost::algorithm::trim(value);
  return value;
}

std::vector<std::string> split_list(const std::string &value) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, value, boost::algorithm::is_any_of(", \t"), boost::algorithm::token_compress_on);
  std::erase_if(parts, [](const std::string &s) { return s.empty(); });
  return parts;
}

class Section {
public:
  Section(const pt::ptree &tree, std::string name) : name_(std::move(name)) {
    if (auto child = tree.get_child_optional(name_)) node_ = &*child;
  }
  bool present() const { return node_ != nullptr; }
  bool has(const std::string &key) const { return node_ && node_->get_optional<std::string>(key).has_value(); }

  std::string text(const std::string &key) const {
    if (!has(key)) throw ConfigError("missing key [" + name_ + "] " + key);
    return clean(node_->get<std::string>(key));
  }
  std::string text(const std::string &key, const std::string &fallback) const {
    return has(key) ? text(key) : fallback;
  }
  double real(const std::string &key) const { return detail::parse_double(text(key), key); }
  double real(const std::string &key, double fallback) const { return has(key) ? real(key) : fallback; }
  long long integer(const std::string &key, long long fallback) const {
    if (!has(key)) return fallback;
    const std::string s = text(key);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception &) {
      throw ConfigError("[" + name_ + "] " + key + ": not an integer: '" + s + "'");
    }
  }
  std::uint64_t unsigned_integer(const std::string &key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string s = text(key);
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
      return v;
    } catch (const std::exception &) {
      throw ConfigError("[" + name_ + "] " + key + ": not an unsigned integer: '" + s + "'");
    }
  }
  std::vector<double> reals(const std::string &key) const {
    std::vector<double> out;
    for (const auto &p : split_list(text(key))) out.push_back(detail::parse_double(p, key));
    return out;
  }
  std::vector<std::string> words(const std::string &key) const { return split_list(text(key)); }

private:
  std::string name_;
  const pt::ptree *node_ = nullptr;
};

Vector to_vector(const std::vector<double> &v, double scale = 1.0) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t n = 0; n < v.size(); ++n) out(static_cast<Eigen::Index>(n)) = v[n] * scale;
  return out;
}

SourceDistribution parse_distribution(const std::string &s) {
  const std::string v = boost::algorithm::to_lower_copy(s);
  if (v == "gaussian" || v == "circular-complex-normal") return SourceDistribution::CircularGaussian;
  if (v == "bernoulli") return SourceDistribution::Bernoulli;
  if (v == "laplace") return SourceDistribution::Laplace;
  if (v == "framed" || v == "framed-comm") return SourceDistribution::FramedComm;
  throw ConfigError("unknown source distribution '" + s + "'");
}

NoiseDistribution parse_noise(const std::string &s) {
  const std::string v = boost::algorithm::to_lower_copy(s);
  if (v == "gaussian" || v == "circular-complex-normal") return NoiseDistribution::CircularGaussian;
  if (v == "uniform") return NoiseDistribution::Uniform;
  throw ConfigError("unknown noise distribution '" + s + "'");
}

Constellation parse_constellation(const std::string &s) {
  const std::string v = boost::algorithm::to_lower_copy(s);
  if (v == "psk8-ofdm" || v == "8psk-ofdm" || v == "ofdm") return Constellation::Psk8Ofdm;
  if (v == "pam4" || v == "4pam") return Constellation::Pam4;
  throw ConfigError("unknown constellation '" + s + "'");
}

ScenarioConfig scenario_from_tree(const pt::ptree &tree) {
  const Section s(tree, "array_model");
  if (!s.present()) throw ConfigError("missing section [array_model]");
  ScenarioConfig sc;
  sc.geometry.num_sensors = static_cast<int>(s.integer("num_sensors", 0));
  sc.geometry.spacing_over_wavelength = s.real("spacing_over_wavelength", 0.5);
  const int m = sc.geometry.num_sensors;
  sc.offsets = OffsetVector::identity(m > 0 ? m : 1);
  if (s.has("gains")) sc.offsets.gains = to_vector(s.reals("gains"));
  if (s.has("phases_deg")) sc.offsets.phases = to_vector(s.reals("phases_deg"), kDeg);
  sc.sources.azimuths = to_vector(s.reals("azimuths_deg"), kDeg);
  sc.sources.powers = s.has("powers") ? to_vector(s.reals("powers")) : Vector::Ones(sc.sources.azimuths.size());
  sc.sources.distribution = parse_distribution(s.text("distribution", "gaussian"));
  sc.noise_distribution = parse_noise(s.text("noise_distribution", "gaussian"));
  if (s.has("sigma_v2") && s.has("snr_db")) throw ConfigError("[array_model] give sigma_v2 or snr_db, not both");
  sc.sigma_v2 = s.has("snr_db") ? snr_db_to_sigma_v2(s.real("snr_db")) : s.real("sigma_v2", 0.1);
  sc.sigma_w2 = s.real("sigma_w2", 0.0);
  sc.sample_size = static_cast<int>(s.integer("sample_size", 1000));
  sc.seed = s.unsigned_integer("seed", 1);

  const Section f(tree, "frame");
  if (sc.sources.distribution == SourceDistribution::FramedComm) {
    FrameSpec &fr = sc.sources.frame;
    fr.frame_length = static_cast<int>(f.integer("frame_length", 40));
    fr.sync_length = static_cast<int>(f.integer("sync_length", 8));
    const int n = sc.sources.count();
    std::vector<std::string> cons = f.has("constellations") ? f.words("constellations")
                                                            : std::vector<std::string>(n, "psk8-ofdm");
    std::vector<double> stretch = f.has("stretch") ? f.reals("stretch") : std::vector<double>(n, 1.0);
    if (static_cast<int>(cons.size()) != n || static_cast<int>(stretch.size()) != n)
      throw ConfigError("[frame] constellations/stretch need one entry per source");
    std::vector<double> offset;
    if (f.has("stretch_offset")) {
      offset = f.reals("stretch_offset");
      if (static_cast<int>(offset.size()) != n) throw ConfigError("[frame] stretch_offset needs one entry per source");
    } else {
      for (double st : stretch) offset.push_back(st - 1.0);
    }
    fr.sources.clear();
    for (int k = 0; k < n; ++k) {
      FramedSource src;
      src.constellation = parse_constellation(cons[static_cast<std::size_t>(k)]);
      src.stretch = static_cast<int>(stretch[static_cast<std::size_t>(k)]);
      src.offset = static_cast<int>(offset[static_cast<std::size_t>(k)]);
      if (src.stretch != stretch[static_cast<std::size_t>(k)] || src.offset != offset[static_cast<std::size_t>(k)])
        throw ConfigError("[frame] stretch and stretch_offset must be integers");
      fr.sources.push_back(src);
    }
  }
  sc.validate();
  return sc;
}

ExperimentSpec experiment_from_tree(const pt::ptree &tree) {
  ExperimentSpec spec;
  spec.base = scenario_from_tree(tree);
  const Section e(tree, "experiment");
  if (!e.present()) throw ConfigError("missing section [experiment]");
  spec.id = parse_experiment(e.text("id"));
  spec.axis = parse_sweep_axis(e.text("sweep", spec.id == ExperimentId::MseVsSnr || spec.id == ExperimentId::DoaVsSnr
                                                   ? "snr_db"
                                                   : "T"));
  spec.values = e.has("values") ? e.reals("values")
                                : std::vector<double>{spec.axis == SweepAxis::SampleSize
                                                          ? static_cast<double>(spec.base.sample_size)
                                                          : -10.0 * std::log10(spec.base.sigma_v2)};
  const long long trials = e.integer("trials", 2000);
  if (trials < 1 || trials > 100000000) throw ConfigError("[experiment] trials must be >= 1");
  spec.trials = static_cast<int>(trials);
  if (e.has("methods")) {
    spec.methods.clear();
    for (const auto &w : e.words("methods")) {
      try {
        spec.methods.push_back(parse_method(w));
      } catch (const Error &ex) {
        throw ConfigError(ex.what());
      }
    }
  } else if (spec.is_doa()) {
    spec.methods = {Method::Oracle, Method::MlOwls, Method::Ls};
  } else if (spec.id == ExperimentId::NongaussianMseVsT) {
    spec.methods = {Method::QmlOwls, Method::Ls};
  } else if (spec.id == ExperimentId::FramedMseVsT) {
    spec.methods = {Method::ReducedMlOwls, Method::Ls};
  }
  spec.master_seed = e.unsigned_integer("master_seed", spec.base.seed);
  spec.noise_case = parse_noise_case(e.text("case", "none"));
  spec.threads = static_cast<int>(e.integer("threads", 0));
  spec.validate();
  return spec;
}

} // namespace

ScenarioConfig parse_scenario(const std::string &text) { return scenario_from_tree(read_ini_text(text, "<text>")); }

ScenarioConfig load_scenario(const std::string &path) {
  try {
    return scenario_from_tree(read_ini_text(read_file(path), path));
  } catch (const ConfigError &e) {
    const std::string what = e.what();
    if (what.find(path) != std::string::npos) throw;
    throw ConfigError(path + ": " + what);
  }
}

ExperimentSpec parse_experiment_text(const std::string &text) {
  return experiment_from_tree(read_ini_text(text, "<text>"));
}

ExperimentSpec load_experiment(const std::string &path) {
  try {
    return experiment_from_tree(read_ini_text(read_file(path), path));
  } catch (const ConfigError &e) {
    const std::string what = e.what();
    if (what.find(path) != std::string::npos) throw;
    throw ConfigError(path + ": " + what);
  }
}

} // namespace blindcal
