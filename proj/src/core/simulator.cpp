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

#include "core/simulator.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace taprecon
{

namespace
{

constexpr int kSupersample = 4;

}  // namespace

GroundTruthSurface rasterize(const Shape & shape, const GridSpec & grid, std::string provenance)
{
  const int side = grid.state_taxels();
  const double pitch = grid.hr_pitch();
  GroundTruthSurface surface;
  surface.side = side;
  surface.side_mm = grid.state_side();
  surface.provenance = std::move(provenance);
  surface.heights.resize(static_cast<Eigen::Index>(side) * side);
  constexpr double kSamples = kSupersample * kSupersample;
  for (int r = 0; r < side; ++r) {
    const double cy = cell_center_coordinate(r, side, grid.state_side());
    for (int c = 0; c < side; ++c) {
      const double cx = cell_center_coordinate(c, side, grid.state_side());
      int inside = 0;
      for (int sy = 0; sy < kSupersample; ++sy) {
        for (int sx = 0; sx < kSupersample; ++sx) {
          const Eigen::Vector2d p(
            cx + ((sx + 0.5) / kSupersample - 0.5) * pitch, cy + ((sy + 0.5) / kSupersample - 0.5) * pitch);
          inside += shape.contains(p) ? 1 : 0;
        }
      }
      surface.heights[flat_index(r, c, side)] = inside / kSamples;
    }
  }
  return surface;
}

GroundTruthSurface resample_image(const GrayImage & image, const GridSpec & grid, std::string provenance)
{
  require(image.width > 0 && image.height > 0, ErrorCode::kIo, "empty image");
  const int side = grid.state_taxels();
  GroundTruthSurface surface;
  surface.side = side;
  surface.side_mm = grid.state_side();
  surface.provenance = std::move(provenance);
  surface.heights.resize(static_cast<Eigen::Index>(side) * side);

  auto source = [](int out, int out_count, int in_count) {
    const double s = (out + 0.5) * in_count / static_cast<double>(out_count) - 0.5;
    return std::clamp(s, 0.0, static_cast<double>(in_count - 1));
  };
  for (int ir = 0; ir < side; ++ir) {  // image row, top first
    const double sy = source(ir, side, image.height);
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double fy = sy - y0;
    for (int c = 0; c < side; ++c) {
      const double sx = source(c, side, image.width);
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double fx = sx - x0;
      const double top = (1.0 - fx) * image.at(y0, x0) + fx * image.at(y0, x1);
      const double bottom = (1.0 - fx) * image.at(y1, x0) + fx * image.at(y1, x1);
      const double v = ((1.0 - fy) * top + fy * bottom) / 255.0;
      surface.heights[flat_index(side - 1 - ir, c, side)] = std::clamp(v, 0.0, 1.0);
    }
  }
  return surface;
}

GroundTruthSurface load_surface(const std::string & source, const GridSpec & grid)
{
  const auto first = source.find_first_not_of(" \t\r\n");
  require(first != std::string::npos, ErrorCode::kInvalidArgument, "empty surface source");
  if (source.find('(') != std::string::npos) {
    return rasterize(Shape::parse(source), grid, source);
  }
  return resample_image(read_gray_image(source), grid, source);
}

Eigen::VectorXd surface_patch(const GroundTruthSurface & surface, const ClipMatrix & clip)
{
  require(
    clip.weights.cols() == surface.heights.size(), ErrorCode::kDimensionMismatch,
    "surface does not match the clip matrix");
  return clip.weights * surface.heights;
}

ObservationFrame execute_tap(
  const GroundTruthSurface & surface, const TapCommand & cmd, const SensorModel & sensor, std::mt19937_64 & rng,
  long tap_index)
{
  const GridSpec & grid = sensor.grid();
  require(
    surface.heights.size() == grid.cell_count(GridKind::kState), ErrorCode::kDimensionMismatch,
    "surface does not match the sensor grid");
  const double half = 0.5 * grid.state_side() * (1.0 + 1e-12);
  const auto & m = cmd.motion;
  require(
    std::abs(m.x) <= half && std::abs(m.y) <= half && std::abs(m.theta) <= 0.5 * std::numbers::pi * (1.0 + 1e-12),
    ErrorCode::kInvalidArgument, "tap pose is outside the action space");

  const Eigen::VectorXd hr_z = surface_patch(surface, sensor.clip(m));
  ObservationFrame frame;
  frame.motion = m;
  frame.tap = tap_index;
  for (Axis axis : kAllAxes) {
    frame.lr[static_cast<int>(axis)] = observe(hr_z, sensor, axis, cmd.noise ? &rng : nullptr);
  }
  return frame;
}

}  // namespace taprecon
