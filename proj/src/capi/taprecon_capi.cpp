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

#include "taprecon/taprecon.h"

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/harness.hpp"

#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

struct taprecon_config
{
  taprecon::ExperimentConfig cfg;
};

struct taprecon_session
{
  std::shared_ptr<const taprecon::ExperimentContext> context;
  taprecon::StateEstimate state;
};

struct taprecon_simulator
{
  std::shared_ptr<const taprecon::ExperimentContext> context;
  taprecon::GroundTruthSurface truth;
  std::mt19937_64 rng;
};

namespace
{

thread_local std::string g_last_error;

taprecon_status to_status(taprecon::ErrorCode code)
{
  switch (code) {
    case taprecon::ErrorCode::kInvalidArgument:
      return TAPRECON_ERR_INVALID_ARGUMENT;
    case taprecon::ErrorCode::kDimensionMismatch:
      return TAPRECON_ERR_DIMENSION;
    case taprecon::ErrorCode::kNumerical:
      return TAPRECON_ERR_NUMERICAL;
    case taprecon::ErrorCode::kIo:
      return TAPRECON_ERR_IO;
    case taprecon::ErrorCode::kConfig:
      return TAPRECON_ERR_CONFIG;
    case taprecon::ErrorCode::kInternal:
      return TAPRECON_ERR_INTERNAL;
  }
  return TAPRECON_ERR_INTERNAL;
}

taprecon_status set_error(taprecon_status status, const std::string & message)
{
  g_last_error = message;
  return status;
}

template <typename F>
taprecon_status guarded(F && body)
{
  try {
    g_last_error.clear();
    return body();
  } catch (const taprecon::Error & e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc &) {
    return set_error(TAPRECON_ERR_INTERNAL, "out of memory");
  } catch (const std::exception & e) {
    return set_error(TAPRECON_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(TAPRECON_ERR_INTERNAL, "unknown error");
  }
}

void require_arg(bool ok, const char * what)
{
  taprecon::require(ok, taprecon::ErrorCode::kInvalidArgument, what);
}

taprecon_status copy_string(const std::string & s, char * buf, size_t capacity, size_t * needed)
{
  if (needed) {
    *needed = s.size() + 1;
  }
  if (!buf || capacity < s.size() + 1) {
    return set_error(TAPRECON_ERR_BUFFER, "buffer needs " + std::to_string(s.size() + 1) + " bytes");
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return TAPRECON_OK;
}

void copy_vector(const Eigen::VectorXd & v, double * out, size_t count)
{
  require_arg(out != nullptr, "output pointer is null");
  taprecon::require(
    count == static_cast<size_t>(v.size()), taprecon::ErrorCode::kDimensionMismatch,
    "output length " + std::to_string(count) + " does not match " + std::to_string(v.size()));
  std::memcpy(out, v.data(), sizeof(double) * count);
}

taprecon::Policy to_policy(taprecon_policy p)
{
  switch (p) {
    case TAPRECON_POLICY_ACTIVE:
      return taprecon::Policy::kActive;
    case TAPRECON_POLICY_PURE_UNCERTAINTY:
      return taprecon::Policy::kPureUncertainty;
    case TAPRECON_POLICY_RANDOM:
      return taprecon::Policy::kRandom;
  }
  taprecon::fail(taprecon::ErrorCode::kInvalidArgument, "unknown policy");
}

taprecon::MotionParams to_motion(taprecon_pose p) { return {p.x, p.y, p.theta}; }

template <typename T>
taprecon_status emit(T * handle, T ** out)
{
  *out = handle;
  return TAPRECON_OK;
}

}  // namespace

extern "C" {

const char * taprecon_version(void) { return "0.1.0"; }

const char * taprecon_status_string(taprecon_status status)
{
  switch (status) {
    case TAPRECON_OK:
      return "ok";
    case TAPRECON_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case TAPRECON_ERR_DIMENSION:
      return "dimension mismatch";
    case TAPRECON_ERR_NUMERICAL:
      return "numerical failure";
    case TAPRECON_ERR_IO:
      return "i/o error";
    case TAPRECON_ERR_CONFIG:
      return "configuration error";
    case TAPRECON_ERR_INTERNAL:
      return "internal error";
    case TAPRECON_ERR_BUFFER:
      return "buffer too small";
    case TAPRECON_ERR_PARTIAL:
      return "some episodes failed";
  }
  return "unknown status";
}

const char * taprecon_last_error(void) { return g_last_error.c_str(); }

taprecon_status taprecon_config_create(taprecon_config ** out)
{
  return guarded([&] {
    require_arg(out != nullptr, "out is null");
    return emit(new taprecon_config{}, out);
  });
}

taprecon_status taprecon_config_create_preset(const char * name, taprecon_config ** out)
{
  return guarded([&] {
    require_arg(out != nullptr && name != nullptr, "null argument");
    return emit(new taprecon_config{taprecon::preset_config(name)}, out);
  });
}

taprecon_status taprecon_config_load(const char * path, taprecon_config ** out)
{
  return guarded([&] {
    require_arg(out != nullptr && path != nullptr, "null argument");
    return emit(new taprecon_config{taprecon::load_config(path)}, out);
  });
}

taprecon_status taprecon_config_parse(const char * text, taprecon_config ** out)
{
  return guarded([&] {
    require_arg(out != nullptr && text != nullptr, "null argument");
    return emit(new taprecon_config{taprecon::parse_config(text)}, out);
  });
}

void taprecon_config_destroy(taprecon_config * config) { delete config; }

taprecon_status taprecon_config_set(taprecon_config * config, const char * key, const char * value)
{
  return guarded([&] {
    require_arg(config && key && value, "null argument");
    taprecon::set_config_value(config->cfg, key, value);
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_config_get(
  const taprecon_config * config, const char * key, char * buf, size_t capacity, size_t * needed)
{
  return guarded([&] {
    require_arg(config && key, "null argument");
    return copy_string(taprecon::get_config_value(config->cfg, key), buf, capacity, needed);
  });
}

size_t taprecon_config_key_count(void) { return taprecon::config_keys().size(); }

const char * taprecon_config_key_name(size_t index)
{
  const auto & keys = taprecon::config_keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

const char * taprecon_config_key_help(size_t index)
{
  const auto & keys = taprecon::config_keys();
  return index < keys.size() ? taprecon::config_key_help(keys[index]).c_str() : nullptr;
}

taprecon_status taprecon_config_serialize(const taprecon_config * config, char * buf, size_t capacity, size_t * needed)
{
  return guarded([&] {
    require_arg(config != nullptr, "config is null");
    return copy_string(taprecon::serialize_config(config->cfg), buf, capacity, needed);
  });
}

taprecon_status taprecon_config_validate(const taprecon_config * config)
{
  return guarded([&] {
    require_arg(config != nullptr, "config is null");
    taprecon::validate_config(config->cfg, true);
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_run_episode(
  const taprecon_config * config, const char * surface, taprecon_policy policy, uint64_t seed,
  const char * output_stem, taprecon_episode_summary * out)
{
  return guarded([&] {
    require_arg(config && surface, "null argument");
    taprecon::ExperimentConfig cfg = config->cfg;
    cfg.surfaces = {surface};
    taprecon::validate_config(cfg, true);
    const auto context = taprecon::ExperimentContext::create(cfg);
    std::optional<taprecon::EpisodeArtifacts> artifacts;
    if (output_stem) {
      artifacts = taprecon::EpisodeArtifacts{cfg.output_dir, output_stem};
    }
    const auto result = taprecon::run_episode(
      *context, surface, to_policy(policy), seed, {}, artifacts ? &*artifacts : nullptr);
    if (out) {
      const auto & records = result.log.records();
      *out = taprecon_episode_summary{};
      out->taps = static_cast<long>(records.size());
      if (!records.empty()) {
        out->final_ssim_state = records.back().ssim_state;
        out->final_mse_state = records.back().mse_state;
        out->final_trace = records.back().trace_cov;
      }
      for (const auto & r : records) {
        out->update_ms_total += r.update_ms;
        out->scoring_ms_total += r.scoring_ms;
      }
    }
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_run_suite(const taprecon_config * config, taprecon_suite_summary * out)
{
  return guarded([&] {
    require_arg(config != nullptr, "config is null");
    const auto result = taprecon::run_suite(config->cfg);
    if (out) {
      out->episodes = result.episodes;
      out->failed = result.failures.size();
    }
    if (!result.failures.empty()) {
      return set_error(
        TAPRECON_ERR_PARTIAL, std::to_string(result.failures.size()) + " of " + std::to_string(result.episodes) +
                                " episodes failed; first: " + result.failures.front().episode + ": " +
                                result.failures.front().message);
    }
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_render(const char * episode_csv, const char * output_dir)
{
  return guarded([&] {
    require_arg(episode_csv != nullptr, "episode_csv is null");
    taprecon::render_episode(episode_csv, output_dir ? output_dir : "");
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_session_create(const taprecon_config * config, taprecon_session ** out)
{
  return guarded([&] {
    require_arg(config && out, "null argument");
    auto context = taprecon::ExperimentContext::create(config->cfg);
    auto state = taprecon::init_state(context->grid(), context->prior());
    return emit(new taprecon_session{std::move(context), std::move(state)}, out);
  });
}

void taprecon_session_destroy(taprecon_session * session) { delete session; }

taprecon_status taprecon_session_dims(
  const taprecon_session * session, size_t * state_cells, size_t * lr_cells, size_t * hr_cells)
{
  return guarded([&] {
    require_arg(session != nullptr, "session is null");
    const auto & g = session->context->grid();
    if (state_cells) {
      *state_cells = static_cast<size_t>(g.cell_count(taprecon::GridKind::kState));
    }
    if (lr_cells) {
      *lr_cells = static_cast<size_t>(g.cell_count(taprecon::GridKind::kLrSensor));
    }
    if (hr_cells) {
      *hr_cells = static_cast<size_t>(g.cell_count(taprecon::GridKind::kHrSensor));
    }
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_session_taps(const taprecon_session * session, long * taps)
{
  return guarded([&] {
    require_arg(session && taps, "null argument");
    *taps = session->state.taps;
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_session_update(
  taprecon_session * session, taprecon_pose pose, const double * lr_x, const double * lr_y, const double * lr_z,
  size_t lr_cells)
{
  return guarded([&] {
    require_arg(session && lr_x && lr_y && lr_z, "null argument");
    const auto & g = session->context->grid();
    taprecon::require(
      lr_cells == static_cast<size_t>(g.cell_count(taprecon::GridKind::kLrSensor)),
      taprecon::ErrorCode::kDimensionMismatch, "lr_cells does not match the sensor grid");
    taprecon::ObservationFrame frame;
    frame.motion = to_motion(pose);
    frame.tap = session->state.taps + 1;
    const double * src[3] = {lr_x, lr_y, lr_z};
    for (int a = 0; a < 3; ++a) {
      frame.lr[a] = Eigen::Map<const Eigen::VectorXd>(src[a], static_cast<Eigen::Index>(lr_cells));
    }
    // Update a copy so a numerical failure leaves the session untouched.
    taprecon::StateEstimate next = session->state;
    taprecon::update_tap(next, frame, session->context->sensor(), session->context->config().tap_options());
    session->state = std::move(next);
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_session_mean(const taprecon_session * session, double * out, size_t count)
{
  return guarded([&] {
    require_arg(session != nullptr, "session is null");
    copy_vector(session->state.mean, out, count);
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_session_variance(const taprecon_session * session, double * out, size_t count)
{
  return guarded([&] {
    require_arg(session != nullptr, "session is null");
    copy_vector(session->state.covariance.diagonal(), out, count);
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_session_covariance_trace(const taprecon_session * session, double * out)
{
  return guarded([&] {
    require_arg(session && out, "null argument");
    *out = session->state.covariance.trace();
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_session_predict_hr(
  const taprecon_session * session, taprecon_pose pose, double * out, size_t count)
{
  return guarded([&] {
    require_arg(session != nullptr, "session is null");
    copy_vector(taprecon::predict_hr(session->state, to_motion(pose), session->context->sensor()), out, count);
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_session_next_pose(
  const taprecon_session * session, taprecon_policy policy, uint64_t seed, taprecon_pose * out)
{
  return guarded([&] {
    require_arg(session && out, "null argument");
    const auto & ctx = *session->context;
    const taprecon::Policy p = to_policy(policy);
    const double lambda = p == taprecon::Policy::kPureUncertainty ? 0.0 : ctx.config().lambda;
    taprecon::DecisionMaps maps;
    if (p != taprecon::Policy::kRandom) {
      maps = taprecon::decision_maps(session->state, lambda, session->state.taps, ctx.state_gradients());
    }
    std::mt19937_64 rng = taprecon::seeded_stream(seed, 2);
    const auto pick = taprecon::select_action(maps, ctx.scorer(), p, rng, ctx.config().threads);
    *out = taprecon_pose{pick.motion.x, pick.motion.y, pick.motion.theta};
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_session_save(const taprecon_session * session, const char * path)
{
  return guarded([&] {
    require_arg(session && path, "null argument");
    taprecon::save_checkpoint(path, session->context->grid(), session->context->prior(), session->state);
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_session_load(const taprecon_config * config, const char * path, taprecon_session ** out)
{
  return guarded([&] {
    require_arg(config && path && out, "null argument");
    auto context = taprecon::ExperimentContext::create(config->cfg);
    taprecon::Checkpoint ckp = taprecon::load_checkpoint(path);
    taprecon::require(
      ckp.grid == context->grid() && ckp.prior == context->prior(), taprecon::ErrorCode::kConfig,
      "checkpoint grid or prior does not match the config");
    return emit(new taprecon_session{std::move(context), std::move(ckp.state)}, out);
  });
}

taprecon_status taprecon_simulator_create(
  const taprecon_config * config, const char * surface, taprecon_simulator ** out)
{
  return guarded([&] {
    require_arg(config && surface && out, "null argument");
    auto context = taprecon::ExperimentContext::create(config->cfg);
    auto truth = taprecon::load_surface(surface, context->grid());
    return emit(new taprecon_simulator{std::move(context), std::move(truth), taprecon::seeded_stream(0, 1)}, out);
  });
}

void taprecon_simulator_destroy(taprecon_simulator * simulator) { delete simulator; }

taprecon_status taprecon_simulator_truth(const taprecon_simulator * simulator, double * out, size_t count)
{
  return guarded([&] {
    require_arg(simulator != nullptr, "simulator is null");
    copy_vector(simulator->truth.heights, out, count);
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_simulator_reseed(taprecon_simulator * simulator, uint64_t seed)
{
  return guarded([&] {
    require_arg(simulator != nullptr, "simulator is null");
    simulator->rng = taprecon::seeded_stream(seed, 1);
    return TAPRECON_OK;
  });
}

taprecon_status taprecon_simulator_tap(
  taprecon_simulator * simulator, taprecon_pose pose, int noise, double * lr_x, double * lr_y, double * lr_z,
  size_t lr_cells)
{
  return guarded([&] {
    require_arg(simulator && lr_x && lr_y && lr_z, "null argument");
    const auto frame = taprecon::execute_tap(
      simulator->truth, taprecon::TapCommand{to_motion(pose), noise != 0}, simulator->context->simulator(),
      simulator->rng);
    double * dst[3] = {lr_x, lr_y, lr_z};
    for (int a = 0; a < 3; ++a) {
      copy_vector(frame.lr[a], dst[a], lr_cells);
    }
    return TAPRECON_OK;
  });
}

}  // extern "C"
