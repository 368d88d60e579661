// Copyright 2026 The taprecon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TAPRECON_CORE_CONFIG_HPP_
#define TAPRECON_CORE_CONFIG_HPP_

#include "core/explorer.hpp"
#include "core/grid.hpp"
#include "core/kalman.hpp"
#include "core/sensor_model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace taprecon
{

/// Everything one experiment needs. Defaults reproduce the desk-scale setup:
/// a 4x4 taxel, 20 mm sensor super-resolved to 40x40 over a region twice its
/// side, 0.5 mm / 5 degree pose lattice, lambda 0.7, beta_C 1e-3,
/// gamma = (1, 1, 2), 30 taps.
struct ExperimentConfig
{
  // [grid]
  int sensor_taxels = 4;
  int hr_taxels = 40;
  double scale = 2.0;
  double sensor_side_mm = 20.0;

  // [prior]
  double prior_amplitude = 1.0;
  std::optional<double> prior_length_scale_mm;  // unset: two HR cell pitches
  double prior_mean = 0.0;

  // [sensor]
  std::array<double, 3> gamma = {1.0, 1.0, 2.0};
  double beta_c = kDefaultBetaC;
  double clip_drop_tolerance = kDefaultClipDropTolerance;
  double sobel_scale = 1.0;
  std::array<double, 3> sigma = {0.01, 0.01, 0.01};
  std::array<bool, 3> use_axis = {true, true, true};

  // [simulator]
  std::array<std::optional<double>, 3> simulator_gamma;  // unset: same as the filter
  bool simulator_noise = true;

  // [explorer]
  double lambda = kDefaultLambda;
  Policy policy = Policy::kActive;
  double dx_mm = 0.5;
  double dtheta_deg = 5.0;
  int threads = 1;

  // [experiment]
  long taps = 30;
  std::vector<std::uint64_t> seeds = {1};
  std::vector<std::string> surfaces = {"disk(0, 0, 10)"};
  std::vector<Policy> policies = {Policy::kActive, Policy::kPureUncertainty, Policy::kRandom};
  std::string output_dir = "taprecon_out";
  std::vector<long> snapshot_taps = {1, 10, 30};
  std::string image_format = "pgm";
  int workers = 1;

  GridSpec grid() const;
  PriorConfig prior() const;
  SensorParams sensor_params() const;
  SensorParams simulator_params() const;
  TapUpdateOptions tap_options() const;
  double dtheta_rad() const;
  double effective_length_scale() const;

  bool operator==(const ExperimentConfig &) const = default;
};

/// Section-qualified keys ("grid.hr_taxels", ...) in serialisation order.
const std::vector<std::string> & config_keys();
const std::string & config_key_help(const std::string & key);

void set_config_value(ExperimentConfig & cfg, const std::string & key, const std::string & value);
std::string get_config_value(const ExperimentConfig & cfg, const std::string & key);

ExperimentConfig parse_config(const std::string & text);
ExperimentConfig load_config(const std::string & path);
std::string serialize_config(const ExperimentConfig & cfg);

/// Named starting points: "paper" (the defaults), "patch" (single-tap
/// super-resolution of one patch), "convergence" (one active episode on a
/// disk) and "policy" (three policies over ten seeds and three surfaces).
ExperimentConfig preset_config(const std::string & name);
const std::vector<std::string> & preset_names();

/// Throws Error(kConfig) describing the first problem found. With
/// `check_sources`, surface files must exist and descriptors must parse.
void validate_config(const ExperimentConfig & cfg, bool check_sources = true);

}  // namespace taprecon

#endif  // TAPRECON_CORE_CONFIG_HPP_
