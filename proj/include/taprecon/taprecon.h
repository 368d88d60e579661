/*
 * Copyright 2026 The taprecon Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * taprecon: tactile super-resolution by Kalman filtering of repeated taps,
 * with an active tap planner and a simulator for batch experiments.
 *
 * Conventions
 *   - Every call returns a taprecon_status. On failure the message for the
 *     calling thread is available from taprecon_last_error().
 *   - Handles are opaque. Destroy functions accept NULL.
 *   - Output strings use the (buf, capacity, needed) pattern: the full length
 *     plus the terminator is written to *needed (if non-NULL); the text is
 *     copied only when it fits, otherwise TAPRECON_ERR_BUFFER is returned.
 *   - Fields are flattened row-major, row 0 at the lowest y.
 *   - Lengths are in mm, angles in radians.
 */

#ifndef TAPRECON_TAPRECON_H_
#define TAPRECON_TAPRECON_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TAPRECON_BUILDING_LIBRARY)
#define TAPRECON_API __declspec(dllexport)
#else
#define TAPRECON_API __declspec(dllimport)
#endif
#else
#define TAPRECON_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum taprecon_status {
  TAPRECON_OK = 0,
  TAPRECON_ERR_INVALID_ARGUMENT = 1,
  TAPRECON_ERR_DIMENSION = 2,
  TAPRECON_ERR_NUMERICAL = 3,
  TAPRECON_ERR_IO = 4,
  TAPRECON_ERR_CONFIG = 5,
  TAPRECON_ERR_INTERNAL = 6,
  TAPRECON_ERR_BUFFER = 7,  /* output buffer too small */
  TAPRECON_ERR_PARTIAL = 8  /* suite finished but some episodes failed */
} taprecon_status;

typedef enum taprecon_policy {
  TAPRECON_POLICY_ACTIVE = 0,
  TAPRECON_POLICY_PURE_UNCERTAINTY = 1,
  TAPRECON_POLICY_RANDOM = 2
} taprecon_policy;

typedef struct taprecon_pose {
  double x;
  double y;
  double theta;
} taprecon_pose;

typedef struct taprecon_config taprecon_config;
typedef struct taprecon_session taprecon_session;
typedef struct taprecon_simulator taprecon_simulator;

TAPRECON_API const char * taprecon_version(void);
TAPRECON_API const char * taprecon_status_string(taprecon_status status);
/* Message of the last failed call on this thread ("" if none). */
TAPRECON_API const char * taprecon_last_error(void);

/* ---- configuration ---------------------------------------------------- */

TAPRECON_API taprecon_status taprecon_config_create(taprecon_config ** out);
/* "paper", "patch", "convergence" or "policy". */
TAPRECON_API taprecon_status taprecon_config_create_preset(const char * name, taprecon_config ** out);
TAPRECON_API taprecon_status taprecon_config_load(const char * path, taprecon_config ** out);
TAPRECON_API taprecon_status taprecon_config_parse(const char * text, taprecon_config ** out);
TAPRECON_API void taprecon_config_destroy(taprecon_config * config);

/* Keys are section qualified, e.g. "grid.hr_taxels". */
TAPRECON_API taprecon_status taprecon_config_set(taprecon_config * config, const char * key, const char * value);
TAPRECON_API taprecon_status taprecon_config_get(
  const taprecon_config * config, const char * key, char * buf, size_t capacity, size_t * needed);
TAPRECON_API size_t taprecon_config_key_count(void);
TAPRECON_API const char * taprecon_config_key_name(size_t index);
TAPRECON_API const char * taprecon_config_key_help(size_t index);
TAPRECON_API taprecon_status taprecon_config_serialize(
  const taprecon_config * config, char * buf, size_t capacity, size_t * needed);
/* Checks values and that every surface source exists or parses. */
TAPRECON_API taprecon_status taprecon_config_validate(const taprecon_config * config);

/* ---- experiments ------------------------------------------------------ */

typedef struct taprecon_episode_summary {
  long taps;
  double final_ssim_state;
  double final_mse_state;
  double final_trace;
  double update_ms_total;
  double scoring_ms_total;
} taprecon_episode_summary;

/* Runs one episode. When output_stem is non-NULL the CSV, timing, metadata
 * and snapshot files are written to config's output_dir with that stem. */
TAPRECON_API taprecon_status taprecon_run_episode(
  const taprecon_config * config, const char * surface, taprecon_policy policy, uint64_t seed,
  const char * output_stem, taprecon_episode_summary * out);

typedef struct taprecon_suite_summary {
  size_t episodes;
  size_t failed;
} taprecon_suite_summary;

/* TAPRECON_ERR_PARTIAL when at least one episode failed. */
TAPRECON_API taprecon_status taprecon_run_suite(const taprecon_config * config, taprecon_suite_summary * out);

/* Episode CSV to curve data and image grids. output_dir may be NULL. */
TAPRECON_API taprecon_status taprecon_render(const char * episode_csv, const char * output_dir);

/* ---- filter session --------------------------------------------------- */

TAPRECON_API taprecon_status taprecon_session_create(const taprecon_config * config, taprecon_session ** out);
TAPRECON_API void taprecon_session_destroy(taprecon_session * session);

/* Cells in the state grid, the LR sensor grid and the HR sensor grid. */
TAPRECON_API taprecon_status taprecon_session_dims(
  const taprecon_session * session, size_t * state_cells, size_t * lr_cells, size_t * hr_cells);
TAPRECON_API taprecon_status taprecon_session_taps(const taprecon_session * session, long * taps);

/* One tap: sequential X, Y, Z measurement updates (axes disabled in the
 * config are skipped). Each reading has lr_cells values. */
TAPRECON_API taprecon_status taprecon_session_update(
  taprecon_session * session, taprecon_pose pose, const double * lr_x, const double * lr_y, const double * lr_z,
  size_t lr_cells);

TAPRECON_API taprecon_status taprecon_session_mean(const taprecon_session * session, double * out, size_t count);
TAPRECON_API taprecon_status taprecon_session_variance(
  const taprecon_session * session, double * out, size_t count);
TAPRECON_API taprecon_status taprecon_session_covariance_trace(const taprecon_session * session, double * out);

/* HR patch prediction C(pose) mu, hr_cells values. */
TAPRECON_API taprecon_status taprecon_session_predict_hr(
  const taprecon_session * session, taprecon_pose pose, double * out, size_t count);

/* Next tap pose under a policy. seed feeds the random policy only. */
TAPRECON_API taprecon_status taprecon_session_next_pose(
  const taprecon_session * session, taprecon_policy policy, uint64_t seed, taprecon_pose * out);

TAPRECON_API taprecon_status taprecon_session_save(const taprecon_session * session, const char * path);
/* The checkpoint grid and prior must match the config. */
TAPRECON_API taprecon_status taprecon_session_load(
  const taprecon_config * config, const char * path, taprecon_session ** out);

/* ---- simulator -------------------------------------------------------- */

/* surface: shape descriptor such as "disk(0, 0, 10)" or a PGM/PNG path. */
TAPRECON_API taprecon_status taprecon_simulator_create(
  const taprecon_config * config, const char * surface, taprecon_simulator ** out);
TAPRECON_API void taprecon_simulator_destroy(taprecon_simulator * simulator);

TAPRECON_API taprecon_status taprecon_simulator_truth(
  const taprecon_simulator * simulator, double * out, size_t count);

/* Noise is drawn from a generator owned by the simulator, seeded here. */
TAPRECON_API taprecon_status taprecon_simulator_reseed(taprecon_simulator * simulator, uint64_t seed);

TAPRECON_API taprecon_status taprecon_simulator_tap(
  taprecon_simulator * simulator, taprecon_pose pose, int noise, double * lr_x, double * lr_y, double * lr_z,
  size_t lr_cells);

#ifdef __cplusplus
}
#endif

#endif /* TAPRECON_TAPRECON_H_ */
