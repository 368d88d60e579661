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

#ifndef TAPRECON_CORE_SENSOR_MODEL_HPP_
#define TAPRECON_CORE_SENSOR_MODEL_HPP_

#include "core/grid.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <random>

// Linear operators of the tap observation pipeline:
//
//   I_hr_z = C(m) * S                 clip: state -> HR sensor patch
//   I_hr_x = Gx * I_hr_z, I_hr_y = Gy * I_hr_z
//   I_lr_a = H(gamma_a) * I_hr_a + e  with e ~ N(0, sigma_a^2 I)

namespace taprecon
{

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Axis { kX = 0, kY = 1, kZ = 2 };

inline constexpr std::array<Axis, 3> kAllAxes = {Axis::kX, Axis::kY, Axis::kZ};

const char * axis_name(Axis axis);

inline constexpr double kDefaultBetaC = 1e-3;
inline constexpr double kDefaultClipDropTolerance = 1e-12;

struct ClipMatrix
{
  SparseRowMatrix weights;  // M^2 x (alpha M)^2, rows sum to 1
  MotionParams motion;
  /// Rows with no finite Gaussian weights, assigned to the nearest state
  /// cell instead. Weights are relative to the nearest cell, so only a
  /// non-finite pose produces these.
  int fallback_rows = 0;

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(weights); }
};

/// Gaussian similarity between state cells and the HR cells placed by `m`,
/// row-normalised. Entries below `drop_tolerance` (relative to their row) are
/// discarded; a tolerance of 0 evaluates every state cell for every row.
ClipMatrix build_clip_matrix(
  const GridSpec & grid, const MotionParams & m, double beta_c = kDefaultBetaC,
  double drop_tolerance = kDefaultClipDropTolerance);

struct DegradationMatrix
{
  Eigen::MatrixXd weights;  // N^2 x M^2, row maxima are 1
  double gamma = 0.0;
};

DegradationMatrix build_degradation_matrix(const GridSpec & grid, double gamma);

/// 3x3 Sobel kernels in matrix form over a side x side image, replicate
/// padding at the border. `scale` multiplies the raw integer weights.
struct GradientOperators
{
  SparseRowMatrix gx;
  SparseRowMatrix gy;
  int side = 0;
  double scale = 1.0;
};

GradientOperators build_gradient_operators(int side, double scale = 1.0);

/// Operators over the HR sensor grid (M x M).
GradientOperators build_gradient_operators(const GridSpec & grid, double scale = 1.0);

struct NoiseModel
{
  std::array<double, 3> sigma = {0.01, 0.01, 0.01};

  double variance(Axis axis) const
  {
    const double s = sigma[static_cast<int>(axis)];
    return s * s;
  }
  /// Diagonal of Q for one axis.
  Eigen::VectorXd covariance_diagonal(Axis axis, Eigen::Index size) const
  {
    return Eigen::VectorXd::Constant(size, variance(axis));
  }
  bool strictly_positive() const { return sigma[0] > 0.0 && sigma[1] > 0.0 && sigma[2] > 0.0; }
};

struct SensorParams
{
  std::array<double, 3> gamma = {1.0, 1.0, 2.0};
  double beta_c = kDefaultBetaC;
  double clip_drop_tolerance = kDefaultClipDropTolerance;
  double sobel_scale = 1.0;
  NoiseModel noise;
};

/// Precomputed operators for one sensor. Immutable after creation.
class SensorModel
{
public:
  static SensorModel create(const GridSpec & grid, const SensorParams & params);

  const GridSpec & grid() const { return grid_; }
  const SensorParams & params() const { return params_; }
  const NoiseModel & noise() const { return params_.noise; }
  const GradientOperators & gradients() const { return gradients_; }
  const DegradationMatrix & degradation(Axis axis) const { return degradation_[static_cast<int>(axis)]; }

  /// H(gamma_a) * G_a for X/Y and H(gamma_z) for Z; N^2 x M^2.
  const Eigen::MatrixXd & hr_to_lr(Axis axis) const { return hr_to_lr_[static_cast<int>(axis)]; }

  ClipMatrix clip(const MotionParams & m) const;

  /// A_a(m) = H G_a C(m), N^2 x (alpha M)^2.
  Eigen::MatrixXd composite(Axis axis, const ClipMatrix & clip) const;

private:
  SensorModel(const GridSpec & grid) : grid_(grid) {}

  GridSpec grid_;
  SensorParams params_;
  GradientOperators gradients_;
  std::array<DegradationMatrix, 3> degradation_;
  std::array<Eigen::MatrixXd, 3> hr_to_lr_;
};

/// LR reading of one axis for a given HR Z patch. A null `rng` (or a zero
/// sigma) gives the noiseless reading.
Eigen::VectorXd observe(
  const Eigen::VectorXd & hr_z, const SensorModel & sensor, Axis axis, std::mt19937_64 * rng);

}  // namespace taprecon

#endif  // TAPRECON_CORE_SENSOR_MODEL_HPP_
