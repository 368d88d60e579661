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

#ifndef TAPRECON_CORE_SIMULATOR_HPP_
#define TAPRECON_CORE_SIMULATOR_HPP_

#include "core/grid.hpp"
#include "core/image_io.hpp"
#include "core/kalman.hpp"
#include "core/sensor_model.hpp"

#include <Eigen/Core>

#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace taprecon
{

/// Procedural contact surface, parsed from descriptors such as
///
///   disk(cx, cy, radius)
///   rectangle(cx, cy, width, height[, angle_deg])
///   ring(cx, cy, outer_radius, inner_radius)
///   cross(cx, cy, arm_length, width[, angle_deg])
///   polyline(stroke_width, x1, y1, x2, y2, ...)
///   composite(shape, shape, ...)
///
/// All lengths are millimetres in the state frame. A composite is the union
/// of its parts.
class Shape
{
public:
  enum class Kind { kDisk, kRectangle, kRing, kCross, kPolyline, kComposite };

  static Shape parse(std::string_view descriptor);

  bool contains(const Eigen::Vector2d & p) const;
  Kind kind() const { return kind_; }

private:
  Kind kind_ = Kind::kDisk;
  std::vector<double> params_;
  std::vector<Shape> parts_;

  friend class ShapeParser;
};

/// Heightmap over the state grid with values in [0, 1], flattened with the
/// project convention (row 0 at the lowest Y).
struct GroundTruthSurface
{
  Eigen::VectorXd heights;
  int side = 0;
  double side_mm = 0.0;
  std::string provenance;
};

/// Rasterises with 4x4 supersampling per cell.
GroundTruthSurface rasterize(const Shape & shape, const GridSpec & grid, std::string provenance = {});

/// Bilinear resampling of an 8-bit image onto the state grid, scaled by 1/255.
GroundTruthSurface resample_image(const GrayImage & image, const GridSpec & grid, std::string provenance = {});

/// A descriptor (anything containing '(') or a PGM/PNG file path.
GroundTruthSurface load_surface(const std::string & source, const GridSpec & grid);

struct TapCommand
{
  MotionParams motion;
  bool noise = true;
};

/// C(m) * S_true: the HR Z patch an ideal sensor would read.
Eigen::VectorXd surface_patch(const GroundTruthSurface & surface, const ClipMatrix & clip);

/// Taps the hidden surface: HR patch through the sensor's clip, then each
/// axis degraded with independent noise draws in X, Y, Z order. The pose is
/// echoed back exactly.
ObservationFrame execute_tap(
  const GroundTruthSurface & surface, const TapCommand & cmd, const SensorModel & sensor, std::mt19937_64 & rng,
  long tap_index = 0);

}  // namespace taprecon

#endif  // TAPRECON_CORE_SIMULATOR_HPP_
