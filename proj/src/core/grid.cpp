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

#include "core/grid.hpp"

#include "core/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace taprecon
{

GridSpec GridSpec::create(int sensor_taxels, int hr_taxels, double scale, double sensor_side_mm)
{
  require(sensor_taxels >= 1, ErrorCode::kInvalidArgument, "sensor_taxels must be >= 1");
  require(
    hr_taxels >= sensor_taxels, ErrorCode::kInvalidArgument,
    "hr_taxels must be >= sensor_taxels (got M=" + std::to_string(hr_taxels) +
      ", N=" + std::to_string(sensor_taxels) + ")");
  require(std::isfinite(scale) && scale >= 1.0, ErrorCode::kInvalidArgument, "scale must be >= 1");
  require(
    std::isfinite(sensor_side_mm) && sensor_side_mm > 0.0, ErrorCode::kInvalidArgument,
    "sensor side length must be positive");
  const double state_cells = scale * hr_taxels;
  const double rounded = std::round(state_cells);
  require(
    std::abs(state_cells - rounded) < 1e-9, ErrorCode::kInvalidArgument,
    "scale * hr_taxels must be an integer");

  GridSpec g;
  g.sensor_taxels_ = sensor_taxels;
  g.hr_taxels_ = hr_taxels;
  g.scale_ = scale;
  g.sensor_side_ = sensor_side_mm;
  g.state_taxels_ = static_cast<int>(rounded);
  return g;
}

int GridSpec::side_count(GridKind kind) const
{
  switch (kind) {
    case GridKind::kState:
      return state_taxels_;
    case GridKind::kHrSensor:
      return hr_taxels_;
    case GridKind::kLrSensor:
      return sensor_taxels_;
  }
  return 0;
}

double GridSpec::side_length(GridKind kind) const
{
  return kind == GridKind::kState ? state_side() : sensor_side_;
}

Eigen::Matrix2Xd cell_center_matrix(const GridSpec & grid, GridKind which)
{
  const int side = grid.side_count(which);
  const double length = grid.side_length(which);
  Eigen::Matrix2Xd centers(2, static_cast<Eigen::Index>(side) * side);
  for (int row = 0; row < side; ++row) {
    const double y = cell_center_coordinate(row, side, length);
    for (int col = 0; col < side; ++col) {
      centers.col(flat_index(row, col, side)) << cell_center_coordinate(col, side, length), y;
    }
  }
  return centers;
}

std::vector<CellLocation> cell_centers(const GridSpec & grid, GridKind which)
{
  const Eigen::Matrix2Xd packed = cell_center_matrix(grid, which);
  const Frame frame = which == GridKind::kState ? Frame::kState : Frame::kSensor;
  std::vector<CellLocation> out;
  out.reserve(static_cast<std::size_t>(packed.cols()));
  for (Eigen::Index i = 0; i < packed.cols(); ++i) {
    out.push_back({packed.col(i), frame});
  }
  return out;
}

Eigen::Matrix2d MotionParams::rotation() const
{
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

MotionParams MotionParams::inverse() const
{
  MotionParams back;
  back.theta = -theta;
  const Eigen::Vector2d t = -(back.rotation() * translation());
  back.x = t.x();
  back.y = t.y();
  return back;
}

Eigen::Vector2d transform_to_state_frame(const MotionParams & m, const Eigen::Vector2d & sensor_point)
{
  return m.rotation() * sensor_point + m.translation();
}

CellLocation transform_to_state_frame(const MotionParams & m, const CellLocation & v)
{
  require(v.frame == Frame::kSensor, ErrorCode::kInvalidArgument, "expected a sensor-frame location");
  return {transform_to_state_frame(m, v.position), Frame::kState};
}

namespace
{

std::vector<double> inclusive_range(double lo, double hi, double step)
{
  const auto steps = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(steps + 1));
  for (long k = 0; k <= steps; ++k) {
    values.push_back(std::min(lo + static_cast<double>(k) * step, hi));
  }
  // snap the final value so an exact division lands on the endpoint
  if (std::abs(values.back() - hi) < 1e-9 * std::max(1.0, std::abs(hi))) {
    values.back() = hi;
  }
  return values;
}

}  // namespace

ActionSpace ActionSpace::create(const GridSpec & grid, double x_step_mm, double theta_step_rad)
{
  require(
    std::isfinite(x_step_mm) && x_step_mm > 0.0, ErrorCode::kInvalidArgument,
    "translation step must be positive");
  require(
    std::isfinite(theta_step_rad) && theta_step_rad > 0.0, ErrorCode::kInvalidArgument,
    "rotation step must be positive");
  const double half = 0.5 * grid.state_side();
  constexpr double kHalfPi = 0.5 * std::numbers::pi;

  ActionSpace space;
  space.xs_ = inclusive_range(-half, half, x_step_mm);
  space.ys_ = space.xs_;
  space.thetas_ = inclusive_range(-kHalfPi, kHalfPi, theta_step_rad);
  space.x_step_ = x_step_mm;
  space.theta_step_ = theta_step_rad;
  return space;
}

MotionParams ActionSpace::at(std::size_t index) const
{
  require(index < size(), ErrorCode::kInvalidArgument, "action index out of range");
  const std::size_t ix = index % xs_.size();
  const std::size_t rest = index / xs_.size();
  const std::size_t iy = rest % ys_.size();
  const std::size_t itheta = rest / ys_.size();
  return {xs_[ix], ys_[iy], thetas_[itheta]};
}

std::vector<MotionParams> ActionSpace::enumerate() const
{
  std::vector<MotionParams> all;
  all.reserve(size());
  for (double theta : thetas_) {
    for (double y : ys_) {
      for (double x : xs_) {
        all.push_back({x, y, theta});
      }
    }
  }
  return all;
}

}  // namespace taprecon
