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

#ifndef TAPRECON_CORE_GRID_HPP_
#define TAPRECON_CORE_GRID_HPP_

#include <Eigen/Core>

#include <cstddef>
#include <vector>

// Grid geometry shared by every module.
//
// Conventions (fixed project-wide, including the Sobel operators):
//  * all grids are square and centred on their frame origin;
//  * X points right, Y points up;
//  * flattening is row-major with row 0 at the lowest Y and column 0 at the
//    lowest X, i.e. index = row * side + col.

namespace taprecon
{

enum class Frame { kState, kSensor };

enum class GridKind { kState, kHrSensor, kLrSensor };

class GridSpec
{
public:
  /// Validates and builds a grid. `scale * hr_taxels` must be integral.
  static GridSpec create(int sensor_taxels, int hr_taxels, double scale, double sensor_side_mm);

  int sensor_taxels() const { return sensor_taxels_; }
  int hr_taxels() const { return hr_taxels_; }
  double scale() const { return scale_; }
  double sensor_side() const { return sensor_side_; }
  double state_side() const { return scale_ * sensor_side_; }
  int state_taxels() const { return state_taxels_; }

  /// Taxels per millimetre.
  double lr_resolution() const { return sensor_taxels_ / sensor_side_; }
  double hr_resolution() const { return hr_taxels_ / sensor_side_; }

  /// Cell pitch shared by the HR sensor grid and the state grid.
  double hr_pitch() const { return sensor_side_ / hr_taxels_; }
  double lr_pitch() const { return sensor_side_ / sensor_taxels_; }

  int side_count(GridKind kind) const;
  double side_length(GridKind kind) const;
  Eigen::Index cell_count(GridKind kind) const
  {
    const Eigen::Index s = side_count(kind);
    return s * s;
  }

  bool operator==(const GridSpec &) const = default;

private:
  GridSpec() = default;

  int sensor_taxels_ = 0;
  int hr_taxels_ = 0;
  double scale_ = 1.0;
  double sensor_side_ = 0.0;
  int state_taxels_ = 0;
};

struct CellLocation
{
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Frame frame = Frame::kState;
};

/// Centre of cell `k` along one axis of a grid with `count` cells over `side` mm.
inline double cell_center_coordinate(int k, int count, double side)
{
  return -0.5 * side + (k + 0.5) * side / count;
}

inline Eigen::Index flat_index(int row, int col, int side) { return static_cast<Eigen::Index>(row) * side + col; }

struct GridIndex
{
  int row = 0;
  int col = 0;
};

inline GridIndex unflatten(Eigen::Index index, int side)
{
  return {static_cast<int>(index / side), static_cast<int>(index % side)};
}

std::vector<CellLocation> cell_centers(const GridSpec & grid, GridKind which);

/// Same centres as cell_centers, packed column-wise (2 x count) for the builders.
Eigen::Matrix2Xd cell_center_matrix(const GridSpec & grid, GridKind which);

struct MotionParams
{
  double x = 0.0;      // mm
  double y = 0.0;      // mm
  double theta = 0.0;  // rad, about +Z

  Eigen::Matrix2d rotation() const;
  Eigen::Vector2d translation() const { return {x, y}; }
  /// The motion that undoes this one.
  MotionParams inverse() const;

  bool operator==(const MotionParams &) const = default;
};

Eigen::Vector2d transform_to_state_frame(const MotionParams & m, const Eigen::Vector2d & sensor_point);

/// Throws if `v` is not a sensor-frame location.
CellLocation transform_to_state_frame(const MotionParams & m, const CellLocation & v);

/// The discretised tap poses X x Y x Theta. Translations span
/// [-l_state/2, l_state/2] and rotations [-pi/2, pi/2], both endpoints
/// included when the step divides the span. Enumeration order is theta
/// slowest, then y, then x.
class ActionSpace
{
public:
  static ActionSpace create(const GridSpec & grid, double x_step_mm, double theta_step_rad);

  std::size_t size() const { return xs_.size() * ys_.size() * thetas_.size(); }
  MotionParams at(std::size_t index) const;
  std::size_t index_of(std::size_t ix, std::size_t iy, std::size_t itheta) const
  {
    return (itheta * ys_.size() + iy) * xs_.size() + ix;
  }

  const std::vector<double> & xs() const { return xs_; }
  const std::vector<double> & ys() const { return ys_; }
  const std::vector<double> & thetas() const { return thetas_; }
  double x_step() const { return x_step_; }
  double theta_step() const { return theta_step_; }

  std::vector<MotionParams> enumerate() const;

private:
  ActionSpace() = default;

  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> thetas_;
  double x_step_ = 0.0;
  double theta_step_ = 0.0;
};

}  // namespace taprecon

#endif  // TAPRECON_CORE_GRID_HPP_
