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

#include "core/harness.hpp"

#include "core/error.hpp"
#include "core/image_io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace taprecon
{

namespace fs = std::filesystem;

ExperimentContext::ExperimentContext(
  ExperimentConfig config, SensorModel sensor, SensorModel simulator, GradientOperators state_ops,
  FootprintScorer scorer)
: config_(std::move(config)),
  sensor_(std::move(sensor)),
  simulator_(std::move(simulator)),
  state_ops_(std::move(state_ops)),
  scorer_(std::move(scorer))
{
}

std::shared_ptr<const ExperimentContext> ExperimentContext::create(const ExperimentConfig & config)
{
  validate_config(config, false);
  const GridSpec grid = config.grid();
  SensorModel sensor = SensorModel::create(grid, config.sensor_params());
  SensorModel simulator = SensorModel::create(grid, config.simulator_params());
  GradientOperators ops = build_gradient_operators(grid.state_taxels(), config.sobel_scale);
  FootprintScorer scorer(grid, ActionSpace::create(grid, config.dx_mm, config.dtheta_rad()), config.beta_c,
    config.clip_drop_tolerance);
  return std::shared_ptr<const ExperimentContext>(new ExperimentContext(
    config, std::move(sensor), std::move(simulator), std::move(ops), std::move(scorer)));
}

std::mt19937_64 seeded_stream(std::uint64_t seed, std::uint32_t stream)
{
  std::seed_seq seq{
    static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

namespace
{

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

EpisodeMetadata make_metadata(const ExperimentConfig & cfg, const std::string & surface, Policy policy, std::uint64_t seed)
{
  EpisodeMetadata m;
  m.policy = policy_name(policy);
  m.lambda = policy == Policy::kPureUncertainty ? 0.0 : cfg.lambda;
  m.seed = seed;
  m.surface = surface;
  m.sensor_taxels = cfg.sensor_taxels;
  m.hr_taxels = cfg.hr_taxels;
  m.scale = cfg.scale;
  m.sensor_side_mm = cfg.sensor_side_mm;
  m.gamma = cfg.gamma;
  m.sigma = cfg.sigma;
  m.beta_c = cfg.beta_c;
  m.simulator_noise = cfg.simulator_noise;
  m.taps = cfg.taps;
  return m;
}

std::string snapshot_name(const EpisodeArtifacts & a, const std::string & what, long t, const std::string & ext)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_t%03ld", t);
  return (fs::path(a.directory) / (a.stem + "_" + what + buf + "." + ext)).string();
}

double patch_ssim(const Eigen::VectorXd & a, const Eigen::VectorXd & b, int side)
{
  if (side < kSsimWindow) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return ssim(a, b, side, side);
}

}  // namespace

EpisodeResult run_episode(
  const ExperimentContext & context, const std::string & surface, Policy policy, std::uint64_t seed,
  const EpisodeHooks & hooks, const EpisodeArtifacts * artifacts)
{
  const ExperimentConfig & cfg = context.config();
  const GridSpec & grid = context.grid();
  const int side = grid.state_taxels();
  const int hr_side = grid.hr_taxels();
  const double lambda = policy == Policy::kPureUncertainty ? 0.0 : cfg.lambda;
  const std::set<long> snapshots(cfg.snapshot_taps.begin(), cfg.snapshot_taps.end());
  const std::string ext = cfg.image_format;

  EpisodeResult result{EpisodeLog(make_metadata(cfg, surface, policy, seed)), {}, load_surface(surface, grid)};
  const GroundTruthSurface & truth = result.truth;
  if (artifacts) {
    fs::create_directories(artifacts->directory);
    write_gray_image(
      (fs::path(artifacts->directory) / (artifacts->stem + "_truth." + ext)).string(),
      field_to_image(truth.heights, side));
  }

  StateEstimate state = init_state(grid, context.prior());
  std::mt19937_64 noise_rng = seeded_stream(seed, 1);
  std::mt19937_64 policy_rng = seeded_stream(seed, 2);
  std::optional<DecisionMaps> maps;

  for (long k = 0; k < cfg.taps; ++k) {
    const long t = k + 1;
    try {
      TapRecord record;
      record.t = t;
      auto start = Clock::now();
      if (k == 0) {
        record.motion = MotionParams{};
        record.action_index = -1;
      } else {
        if (!maps) {
          maps = decision_maps(state, lambda, k, context.state_gradients());
        }
        const Selection pick = select_action(*maps, context.scorer(), policy, policy_rng, cfg.threads);
        record.motion = pick.motion;
        record.action_index = static_cast<long>(pick.index);
      }
      record.scoring_ms = elapsed_ms(start);

      const ObservationFrame frame =
        execute_tap(truth, TapCommand{record.motion, cfg.simulator_noise}, context.simulator(), noise_rng, t);
      start = Clock::now();
      const TapUpdateStats stats = update_tap(state, frame, context.sensor(), cfg.tap_options());
      record.update_ms = elapsed_ms(start);
      maps.reset();

      const ClipMatrix clip = context.sensor().clip(record.motion);
      record.ssim_state = ssim(state.mean, truth.heights, side, side);
      record.ssim_patch = patch_ssim(predict_hr(state, clip), surface_patch(truth, clip), hr_side);
      record.mse_state = mse(state.mean, truth.heights);
      record.psnr_state = psnr(state.mean, truth.heights);
      record.trace_cov = state.covariance.trace();
      record.clip_fallback_rows = stats.clip_fallback_rows;
      result.log.append(record);

      if (hooks.on_tap) {
        hooks.on_tap(TapContext{record, state, stats, frame, truth, context});
      }
      if (artifacts && snapshots.count(t)) {
        maps = decision_maps(state, lambda, t, context.state_gradients());
        write_gray_image(snapshot_name(*artifacts, "mean", t, ext), field_to_image(state.mean, side));
        const Eigen::VectorXd & shown = policy == Policy::kPureUncertainty ? maps->uncertainty : maps->decision;
        write_gray_image(snapshot_name(*artifacts, "decision", t, ext), field_to_image_autoscaled(shown, side));
      }
    } catch (const Error & e) {
      throw Error(e.code(), "tap " + std::to_string(t) + ": " + e.what());
    } catch (const std::exception & e) {
      throw Error(ErrorCode::kInternal, "tap " + std::to_string(t) + ": " + e.what());
    }
  }
  result.final_mean = state.mean;
  if (artifacts) {
    write_episode_files(result.log, *artifacts);
  }
  return result;
}

EpisodeResult run_episode(
  const ExperimentConfig & config, const std::string & surface, Policy policy, std::uint64_t seed)
{
  return run_episode(*ExperimentContext::create(config), surface, policy, seed);
}

void write_episode_files(const EpisodeLog & log, const EpisodeArtifacts & artifacts)
{
  fs::create_directories(artifacts.directory);
  const fs::path base = fs::path(artifacts.directory) / artifacts.stem;
  auto open = [](const fs::path & p) {
    std::ofstream out(p, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + p.string());
    return out;
  };
  {
    auto out = open(base.string() + ".csv");
    log.write_csv(out);
  }
  {
    auto out = open(base.string() + "_timing.csv");
    log.write_timing_csv(out);
  }
  {
    auto out = open(base.string() + "_meta.txt");
    log.write_metadata(out);
  }
}

std::string episode_stem(std::size_t surface_index, Policy policy, std::uint64_t seed)
{
  return "surface" + std::to_string(surface_index) + "_" + policy_name(policy) + "_seed" + std::to_string(seed);
}

namespace
{

struct Job
{
  std::size_t surface = 0;
  Policy policy = Policy::kActive;
  std::uint64_t seed = 0;
};

struct Moments
{
  double sum = 0.0;
  double sum_sq = 0.0;
  long n = 0;
  void add(double v)
  {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / n : std::nan(""); }
  double stddev() const
  {
    if (n < 2) {
      return 0.0;
    }
    const double m = mean();
    return std::sqrt(std::max(0.0, (sum_sq - n * m * m) / (n - 1)));
  }
};

}  // namespace

SuiteResult run_suite(const ExperimentConfig & config, const EpisodeHooks & hooks)
{
  validate_config(config, true);
  const auto context = ExperimentContext::create(config);
  const fs::path root(config.output_dir);
  const fs::path episodes_dir = root / "episodes";
  fs::create_directories(episodes_dir);

  std::vector<Job> jobs;
  for (std::size_t s = 0; s < config.surfaces.size(); ++s) {
    for (Policy p : config.policies) {
      for (std::uint64_t seed : config.seeds) {
        jobs.push_back({s, p, seed});
      }
    }
  }

  std::vector<std::optional<EpisodeLog>> logs(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex hook_mutex;
  EpisodeHooks guarded;
  if (hooks.on_tap) {
    guarded.on_tap = [&](const TapContext & ctx) {
      std::lock_guard<std::mutex> lock(hook_mutex);
      hooks.on_tap(ctx);
    };
  }
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job & job = jobs[i];
      const EpisodeArtifacts artifacts{episodes_dir.string(), episode_stem(job.surface, job.policy, job.seed)};
      try {
        logs[i] = run_episode(*context, config.surfaces[job.surface], job.policy, job.seed, guarded, &artifacts).log;
      } catch (const std::exception & e) {
        errors[i] = e.what();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.workers), jobs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
    for (auto & th : pool) {
      th.join();
    }
  }

  SuiteResult result;
  result.episodes = jobs.size();
  std::map<std::tuple<std::size_t, int, long>, std::array<Moments, 3>> table;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const std::string stem = episode_stem(jobs[i].surface, jobs[i].policy, jobs[i].seed);
    if (!logs[i]) {
      result.failures.push_back({stem, errors[i]});
      continue;
    }
    result.episode_csvs.push_back((episodes_dir / (stem + ".csv")).string());
    for (const auto & r : logs[i]->records()) {
      auto & m = table[{jobs[i].surface, static_cast<int>(jobs[i].policy), r.t}];
      m[0].add(r.ssim_state);
      m[1].add(r.mse_state);
      m[2].add(r.trace_cov);
    }
  }

  result.summary_path = (root / "summary.csv").string();
  std::ofstream summary(result.summary_path, std::ios::binary);
  require(static_cast<bool>(summary), ErrorCode::kIo, "cannot write " + result.summary_path);
  summary << "surface_index,surface,policy,t,episodes,ssim_state_mean,ssim_state_std,mse_state_mean,mse_state_std,"
             "trace_cov_mean,trace_cov_std\n";
  for (const auto & [key, m] : table) {
    const auto [s, p, t] = key;
    summary << s << ',' << csv_field(config.surfaces[s]) << ',' << policy_name(static_cast<Policy>(p)) << ',' << t
            << ',' << m[0].n << ',' << format_number(m[0].mean()) << ',' << format_number(m[0].stddev()) << ','
            << format_number(m[1].mean()) << ',' << format_number(m[1].stddev()) << ','
            << format_number(m[2].mean()) << ',' << format_number(m[2].stddev()) << '\n';
  }

  const fs::path failures_path = root / "failures.txt";
  if (!result.failures.empty()) {
    std::ofstream out(failures_path, std::ios::binary);
    for (const auto & f : result.failures) {
      out << f.episode << ": " << f.message << '\n';
    }
  } else {
    fs::remove(failures_path);
  }
  return result;
}

RenderResult render_episode(const std::string & episode_csv, const std::string & output_dir)
{
  std::ifstream in(episode_csv, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + episode_csv);
  const EpisodeLog log = EpisodeLog::read_csv(in);

  const fs::path csv_path(episode_csv);
  const std::string stem = csv_path.stem().string();
  const fs::path source_dir = csv_path.has_parent_path() ? csv_path.parent_path() : fs::path(".");
  const fs::path out_dir = output_dir.empty() ? source_dir : fs::path(output_dir);
  fs::create_directories(out_dir);

  RenderResult result;
  result.curve_path = (out_dir / (stem + "_curve.dat")).string();
  {
    std::ofstream out(result.curve_path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + result.curve_path);
    out << "# t ssim_state ssim_patch mse_state psnr_state trace_cov\n";
    for (const auto & r : log.records()) {
      out << r.t << ' ' << format_number(r.ssim_state) << ' ' << format_number(r.ssim_patch) << ' '
          << format_number(r.mse_state) << ' ' << format_number(r.psnr_state) << ' ' << format_number(r.trace_cov)
          << '\n';
    }
  }

  for (const char * ext : {"pgm", "png"}) {
    auto snapshot_files = [&](const std::string & what) {
      std::vector<std::string> files;
      for (const auto & r : log.records()) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "_t%03ld.", r.t);
        const fs::path p = source_dir / (stem + "_" + what + buf + ext);
        if (fs::is_regular_file(p)) {
          files.push_back(p.string());
        }
      }
      return files;
    };
    const auto means = snapshot_files("mean");
    const auto decisions = snapshot_files("decision");
    const fs::path truth = source_dir / (stem + "_truth." + ext);
    if (means.empty() && decisions.empty()) {
      continue;
    }
    if (!means.empty()) {
      std::vector<GrayImage> row;
      if (fs::is_regular_file(truth)) {
        row.push_back(read_gray_image(truth.string()));
      }
      for (const auto & f : means) {
        row.push_back(read_gray_image(f));
      }
      result.grid_path = (out_dir / (stem + "_grid." + ext)).string();
      write_gray_image(*result.grid_path, hstack(row));
    }
    if (!decisions.empty()) {
      std::vector<GrayImage> row;
      for (const auto & f : decisions) {
        row.push_back(read_gray_image(f));
      }
      result.decision_grid_path = (out_dir / (stem + "_decision_grid." + ext)).string();
      write_gray_image(*result.decision_grid_path, hstack(row));
    }
    break;
  }
  return result;
}

}  // namespace taprecon
