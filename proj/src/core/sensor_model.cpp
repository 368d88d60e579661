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

#include "core/sensor_model.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace taprecon
{

const char * axis_name(Axis axis)
{
  switch (axis) {
    case Axis::kX:
      return "x";
    case Axis::kY:
      return "y";
    case Axis::kZ:
      return "z";
  }
  return "?";
}

namespace
{

int clamp_index(long value, int side) { return static_cast<int>(std::clamp<long>(value, 0, side - 1)); }

}  // namespace

ClipMatrix build_clip_matrix(
  const GridSpec & grid, const MotionParams & m, double beta_c, double drop_tolerance)
{
  require(std::isfinite(beta_c) && beta_c > 0.0, ErrorCode::kInvalidArgument, "beta_c must be positive");
  require(
    drop_tolerance >= 0.0 && drop_tolerance < 1.0, ErrorCode::kInvalidArgument,
    "clip drop tolerance must be in [0, 1)");

  const int side = grid.state_taxels();
  const double pitch = grid.hr_pitch();
  const double origin = -0.5 * grid.state_side();
  const Eigen::Matrix2Xd sensor_cells = cell_center_matrix(grid, GridKind::kHrSensor);
  const Eigen::Matrix2d rot = m.rotation();
  const Eigen::Vector2d shift = m.translation();

  const bool windowed = drop_tolerance > 0.0;
  const double window_slack = windowed ? beta_c * std::log(1.0 / drop_tolerance) : 0.0;

  ClipMatrix clip;
  clip.motion = m;
  clip.weights.resize(sensor_cells.cols(), static_cast<Eigen::Index>(side) * side);

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(sensor_cells.cols()) * 4);
  std::vector<std::pair<Eigen::Index, double>> row;

  for (Eigen::Index i = 0; i < sensor_cells.cols(); ++i) {
    const Eigen::Vector2d u = rot * sensor_cells.col(i) + shift;
    const double fx = (u.x() - origin) / pitch;
    const double fy = (u.y() - origin) / pitch;
    const int near_col = clamp_index(static_cast<long>(std::floor(fx)), side);
    const int near_row = clamp_index(static_cast<long>(std::floor(fy)), side);

    // weights are taken relative to the nearest cell so far rows cannot underflow
    const double near_dx = u.x() - cell_center_coordinate(near_col, side, grid.state_side());
    const double near_dy = u.y() - cell_center_coordinate(near_row, side, grid.state_side());
    const double near_d2 = near_dx * near_dx + near_dy * near_dy;

    int col_lo = 0, col_hi = side - 1, row_lo = 0, row_hi = side - 1;
    if (windowed) {
      const double radius = std::sqrt(near_d2 + window_slack) / pitch;
      col_lo = clamp_index(static_cast<long>(std::floor(fx - radius)), side);
      col_hi = clamp_index(static_cast<long>(std::floor(fx + radius)), side);
      row_lo = clamp_index(static_cast<long>(std::floor(fy - radius)), side);
      row_hi = clamp_index(static_cast<long>(std::floor(fy + radius)), side);
    }

    row.clear();
    double sum = 0.0;
    for (int r = row_lo; r <= row_hi; ++r) {
      const double dy = u.y() - cell_center_coordinate(r, side, grid.state_side());
      for (int c = col_lo; c <= col_hi; ++c) {
        const double dx = u.x() - cell_center_coordinate(c, side, grid.state_side());
        const double w = std::exp(-(dx * dx + dy * dy - near_d2) / beta_c);
        row.emplace_back(flat_index(r, c, side), w);
        sum += w;
      }
    }

    if (!(sum >= std::numeric_limits<double>::min())) {
      // non-finite pose
      entries.emplace_back(i, flat_index(near_row, near_col, side), 1.0);
      ++clip.fallback_rows;
      continue;
    }

    double kept = 0.0;
    for (auto & [j, w] : row) {
      w /= sum;
      if (w >= drop_tolerance && w > 0.0) {
        kept += w;
      } else {
        w = 0.0;
      }
    }
    for (const auto & [j, w] : row) {
      if (w > 0.0) {
        entries.emplace_back(i, j, w / kept);
      }
    }
  }

  clip.weights.setFromTriplets(entries.begin(), entries.end());
  clip.weights.makeCompressed();
  return clip;
}

DegradationMatrix build_degradation_matrix(const GridSpec & grid, double gamma)
{
  require(std::isfinite(gamma) && gamma > 0.0, ErrorCode::kInvalidArgument, "gamma must be positive");
  const Eigen::Matrix2Xd lr = cell_center_matrix(grid, GridKind::kLrSensor);
  const Eigen::Matrix2Xd hr = cell_center_matrix(grid, GridKind::kHrSensor);

  DegradationMatrix h;
  h.gamma = gamma;
  h.weights.resize(lr.cols(), hr.cols());
  for (Eigen::Index i = 0; i < lr.cols(); ++i) {
    const Eigen::VectorXd dist2 = (hr.colwise() - lr.col(i)).colwise().squaredNorm().transpose();
    // dividing by the row maximum is the same as shifting by the smallest
    // distance, which keeps tiny gammas from underflowing the whole row
    const double nearest = dist2.minCoeff();
    h.weights.row(i) = (-(dist2.array() - nearest) / gamma).exp().transpose();
  }
  return h;
}

GradientOperators build_gradient_operators(int side, double scale)
{
  require(side >= 3, ErrorCode::kInvalidArgument, "Sobel operators need a grid side of at least 3");
  require(std::isfinite(scale) && scale > 0.0, ErrorCode::kInvalidArgument, "Sobel scale must be positive");

  const Eigen::Index n = static_cast<Eigen::Index>(side) * side;
  std::vector<Eigen::Triplet<double>> tx, ty;
  tx.reserve(static_cast<std::size_t>(n) * 6);
  ty.reserve(static_cast<std::size_t>(n) * 6);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const Eigen::Index out = flat_index(r, c, side);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const Eigen::Index in =
            flat_index(std::clamp(r + dr, 0, side - 1), std::clamp(c + dc, 0, side - 1), side);
          const double wx = dc * (dr == 0 ? 2.0 : 1.0);
          const double wy = dr * (dc == 0 ? 2.0 : 1.0);
          if (wx != 0.0) {
            tx.emplace_back(out, in, scale * wx);
          }
          if (wy != 0.0) {
            ty.emplace_back(out, in, scale * wy);
          }
        }
      }
    }
  }

  GradientOperators ops;
  ops.side = side;
  ops.scale = scale;
  ops.gx.resize(n, n);
  ops.gy.resize(n, n);
  // replicate padding folds border taps onto the same column; duplicates sum
  ops.gx.setFromTriplets(tx.begin(), tx.end());
  ops.gy.setFromTriplets(ty.begin(), ty.end());
  ops.gx.prune(0.0);
  ops.gy.prune(0.0);
  return ops;
}

GradientOperators build_gradient_operators(const GridSpec & grid, double scale)
{
  return build_gradient_operators(grid.hr_taxels(), scale);
}

SensorModel SensorModel::create(const GridSpec & grid, const SensorParams & params)
{
  for (double s : params.noise.sigma) {
    require(std::isfinite(s) && s >= 0.0, ErrorCode::kInvalidArgument, "noise sigma must be >= 0");
  }
  require(
    std::isfinite(params.beta_c) && params.beta_c > 0.0, ErrorCode::kInvalidArgument,
    "beta_c must be positive");

  SensorModel model(grid);
  model.params_ = params;
  model.gradients_ = build_gradient_operators(grid, params.sobel_scale);
  for (Axis axis : kAllAxes) {
    const int a = static_cast<int>(axis);
    model.degradation_[a] = build_degradation_matrix(grid, params.gamma[a]);
  }
  const auto & hx = model.degradation_[0].weights;
  const auto & hy = model.degradation_[1].weights;
  model.hr_to_lr_[0] = hx * model.gradients_.gx;
  model.hr_to_lr_[1] = hy * model.gradients_.gy;
  model.hr_to_lr_[2] = model.degradation_[2].weights;
  return model;
}

ClipMatrix SensorModel::clip(const MotionParams & m) const
{
  return build_clip_matrix(grid_, m, params_.beta_c, params_.clip_drop_tolerance);
}

Eigen::MatrixXd SensorModel::composite(Axis axis, const ClipMatrix & clip) const
{
  require(
    clip.weights.rows() == grid_.cell_count(GridKind::kHrSensor) &&
      clip.weights.cols() == grid_.cell_count(GridKind::kState),
    ErrorCode::kDimensionMismatch, "clip matrix does not match the sensor grid");
  return hr_to_lr(axis) * clip.weights;
}

Eigen::VectorXd observe(
  const Eigen::VectorXd & hr_z, const SensorModel & sensor, Axis axis, std::mt19937_64 * rng)
{
  const Eigen::Index expected = sensor.grid().cell_count(GridKind::kHrSensor);
  require(
    hr_z.size() == expected, ErrorCode::kDimensionMismatch,
    "HR patch has " + std::to_string(hr_z.size()) + " values, expected " + std::to_string(expected));

  Eigen::VectorXd lr = sensor.hr_to_lr(axis) * hr_z;
  const double sigma = sensor.noise().sigma[static_cast<int>(axis)];
  if (rng != nullptr && sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (Eigen::Index i = 0; i < lr.size(); ++i) {
      lr[i] += noise(*rng);
    }
  }
  return lr;
}

}  // namespace taprecon
