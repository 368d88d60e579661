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

#ifndef TAPRECON_CORE_KALMAN_HPP_
#define TAPRECON_CORE_KALMAN_HPP_

#include "core/grid.hpp"
#include "core/sensor_model.hpp"

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <string>

namespace taprecon
{

/// Squared-exponential prior over the state grid:
/// Sigma0(i, j) = amplitude * exp(-|v_i - v_j|^2 / length_scale^2).
struct PriorConfig
{
  double amplitude = 1.0;
  double length_scale = 1.0;  // mm
  double mean = 0.0;

  bool operator==(const PriorConfig &) const = default;
};

/// Relative diagonal jitter added to Sigma0 (times the amplitude).
inline constexpr double kPriorJitter = 1e-8;

/// Gaussian belief over the flattened surface. The surface is static, so the
/// posterior after one tap is used unchanged as the prior of the next.
struct StateEstimate
{
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  long taps = 0;
};

/// One tap: the three LR axis readings and the pose they were taken at.
struct ObservationFrame
{
  std::array<Eigen::VectorXd, 3> lr;
  MotionParams motion;
  long tap = 0;

  const Eigen::VectorXd & axis(Axis a) const { return lr[static_cast<int>(a)]; }
};

StateEstimate init_state(const GridSpec & grid, const PriorConfig & prior);

/// Smallest eigenvalue of the jittered prior covariance. The kernel is
/// separable on the grid, so this is computed from the 1-D factor.
double prior_min_eigenvalue(const GridSpec & grid, const PriorConfig & prior);

struct AxisUpdateStats
{
  double trace_before = 0.0;
  double trace_after = 0.0;
};

/// Conditions the belief on one linear-Gaussian measurement
/// obs = A * s + e, e ~ N(0, diag(noise_variance)).
///
/// Gain form: K = Sigma A^T (A Sigma A^T + Q)^-1, inverting only the
/// measurement-sized innovation covariance. The covariance is updated in
/// Joseph form, evaluated as the symmetric rank-2k correction
/// -K P^T - P K^T + K S K^T (P = Sigma A^T) on the lower triangle and then
/// mirrored, so the result is exactly symmetric.
AxisUpdateStats update_axis(
  StateEstimate & state, const Eigen::VectorXd & obs, const Eigen::MatrixXd & observation_matrix,
  const Eigen::VectorXd & noise_variance);

struct TapUpdateOptions
{
  std::array<bool, 3> enabled = {true, true, true};
  std::array<Axis, 3> order = {Axis::kX, Axis::kY, Axis::kZ};
};

struct TapUpdateStats
{
  std::array<AxisUpdateStats, 3> axes{};  // in update order
  int updated_axes = 0;
  int clip_fallback_rows = 0;
};

/// Sequential triaxial update: X posterior -> Y prior -> Z prior.
TapUpdateStats update_tap(
  StateEstimate & state, const ObservationFrame & frame, const SensorModel & sensor,
  const TapUpdateOptions & options = {});

/// HR patch the sensor would read at `m` under the current mean: C(m) mu.
Eigen::VectorXd predict_hr(const StateEstimate & state, const ClipMatrix & clip);
Eigen::VectorXd predict_hr(const StateEstimate & state, const MotionParams & m, const SensorModel & sensor);

/// diag(C Sigma C^T).
Eigen::VectorXd predict_hr_variance(const StateEstimate & state, const ClipMatrix & clip);

/// Copies the lower triangle onto the upper one.
void mirror_lower(Eigen::MatrixXd & m);

// Checkpoints: flat little-endian binary record.
//   "TAPRCKP1" | u32 version | u32 reserved
//   i32 N | i32 M | f64 scale | f64 sensor_side
//   f64 amplitude | f64 length_scale | f64 prior_mean
//   i64 taps | i64 n | f64 mean[n] | f64 covariance[n*n] (column-major)
struct Checkpoint
{
  GridSpec grid;
  PriorConfig prior;
  StateEstimate state;
};

void write_checkpoint(std::ostream & out, const GridSpec & grid, const PriorConfig & prior, const StateEstimate & state);
Checkpoint read_checkpoint(std::istream & in);
void save_checkpoint(const std::string & path, const GridSpec & grid, const PriorConfig & prior, const StateEstimate & state);
Checkpoint load_checkpoint(const std::string & path);

}  // namespace taprecon

#endif  // TAPRECON_CORE_KALMAN_HPP_
