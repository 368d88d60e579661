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

#ifndef TAPRECON_CORE_HARNESS_HPP_
#define TAPRECON_CORE_HARNESS_HPP_

#include "core/config.hpp"
#include "core/explorer.hpp"
#include "core/kalman.hpp"
#include "core/metrics.hpp"
#include "core/sensor_model.hpp"
#include "core/simulator.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace taprecon
{

/// Operators shared by every episode of one configuration. Immutable.
class ExperimentContext
{
public:
  /// Validates the configuration (without touching surface sources).
  static std::shared_ptr<const ExperimentContext> create(const ExperimentConfig & config);

  const ExperimentConfig & config() const { return config_; }
  const GridSpec & grid() const { return sensor_.grid(); }
  const SensorModel & sensor() const { return sensor_; }
  const SensorModel & simulator() const { return simulator_; }
  const GradientOperators & state_gradients() const { return state_ops_; }
  const FootprintScorer & scorer() const { return scorer_; }
  PriorConfig prior() const { return config_.prior(); }

private:
  ExperimentContext(
    ExperimentConfig config, SensorModel sensor, SensorModel simulator, GradientOperators state_ops,
    FootprintScorer scorer);

  ExperimentConfig config_;
  SensorModel sensor_;
  SensorModel simulator_;
  GradientOperators state_ops_;
  FootprintScorer scorer_;
};

/// Independent generator for one (seed, stream) pair. Stream 1 drives
/// observation noise, stream 2 the random policy.
std::mt19937_64 seeded_stream(std::uint64_t seed, std::uint32_t stream);

struct TapContext
{
  const TapRecord & record;
  const StateEstimate & state;
  const TapUpdateStats & stats;
  const ObservationFrame & frame;
  const GroundTruthSurface & truth;
  const ExperimentContext & context;
};

struct EpisodeHooks
{
  /// Called after every filter update, before the next action is chosen.
  std::function<void(const TapContext &)> on_tap;
};

struct EpisodeArtifacts
{
  std::string directory;
  std::string stem;
};

struct EpisodeResult
{
  EpisodeLog log;
  Eigen::VectorXd final_mean;
  GroundTruthSurface truth;
};

/// Fixed first tap at the origin, then policy-driven selection. A module
/// error aborts the episode with Error(code, "tap k: ...").
EpisodeResult run_episode(
  const ExperimentContext & context, const std::string & surface, Policy policy, std::uint64_t seed,
  const EpisodeHooks & hooks = {}, const EpisodeArtifacts * artifacts = nullptr);

EpisodeResult run_episode(
  const ExperimentConfig & config, const std::string & surface, Policy policy, std::uint64_t seed);

/// Writes <stem>.csv, <stem>_timing.csv and <stem>_meta.txt.
void write_episode_files(const EpisodeLog & log, const EpisodeArtifacts & artifacts);

struct SuiteFailure
{
  std::string episode;
  std::string message;
};

struct SuiteResult
{
  std::size_t episodes = 0;
  std::vector<SuiteFailure> failures;
  std::string summary_path;
  std::vector<std::string> episode_csvs;
};

/// surfaces x policies x seeds. Each episode writes its own files under
/// <output_dir>/episodes; failed episodes are recorded and skipped. The
/// summary holds per (surface, policy, t) mean and sample std.
SuiteResult run_suite(const ExperimentConfig & config, const EpisodeHooks & hooks = {});

std::string episode_stem(std::size_t surface_index, Policy policy, std::uint64_t seed);

struct RenderResult
{
  std::string curve_path;
  std::optional<std::string> grid_path;
  std::optional<std::string> decision_grid_path;
};

/// Episode CSV -> <stem>_curve.dat plus image grids assembled from the
/// snapshot files that sit next to it.
RenderResult render_episode(const std::string & episode_csv, const std::string & output_dir = {});

}  // namespace taprecon

#endif  // TAPRECON_CORE_HARNESS_HPP_
