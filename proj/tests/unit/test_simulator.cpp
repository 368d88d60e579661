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

#include "core/error.hpp"
#include "core/image_io.hpp"
#include "core/simulator.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace taprecon;
namespace fs = std::filesystem;

namespace
{

SensorParams noiseless()
{
  SensorParams p;
  p.noise.sigma = {0.0, 0.0, 0.0};
  return p;
}

fs::path scratch_dir(const std::string & name)
{
  const fs::path dir = fs::temp_directory_path() / ("taprecon_sim_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("shape descriptors")
{
  const Shape disk = Shape::parse("disk(1, -2, 3)");
  CHECK(disk.kind() == Shape::Kind::kDisk);
  CHECK(disk.contains({1.0, 0.9}));
  CHECK_FALSE(disk.contains({1.0, 1.1}));

  const Shape rect = Shape::parse("rectangle(0, 0, 4, 2, 90)");
  CHECK(rect.contains({0.0, 1.9}));
  CHECK_FALSE(rect.contains({1.9, 0.0}));

  const Shape ring = Shape::parse("  ring(0,0,5,3) ");
  CHECK(ring.contains({4.0, 0.0}));
  CHECK_FALSE(ring.contains({0.0, 0.0}));

  const Shape cross = Shape::parse("cross(0, 0, 10, 2)");
  CHECK(cross.contains({4.5, 0.0}));
  CHECK(cross.contains({0.0, -4.5}));
  CHECK_FALSE(cross.contains({3.0, 3.0}));

  const Shape line = Shape::parse("polyline(1, -5, 0, 5, 0, 5, 5)");
  CHECK(line.contains({0.0, 0.4}));
  CHECK(line.contains({5.3, 4.0}));
  CHECK_FALSE(line.contains({0.0, 0.6}));

  const Shape both = Shape::parse("composite(disk(-5, 0, 1), disk(5, 0, 1))");
  CHECK(both.kind() == Shape::Kind::kComposite);
  CHECK(both.contains({-5.0, 0.5}));
  CHECK(both.contains({5.0, -0.5}));
  CHECK_FALSE(both.contains({0.0, 0.0}));

  for (const char * bad :
       {"", "   ", "disk(0, 0)", "disk(0, 0, -1)", "ring(0, 0, 2, 3)", "blob(1)", "disk(0, 0, 1", "disk(0, 0, 1) x",
        "polyline(1, 0, 0)", "composite()", "disk(a, 0, 1)"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Shape::parse(bad), Error);
  }
}

TEST_CASE("rasterised disk")
{
  const auto grid = GridSpec::create(4, 40, 2.0, 20.0);
  const auto s = rasterize(Shape::parse("disk(0, 0, 10)"), grid);
  CHECK(s.side == 80);
  CHECK(s.heights[flat_index(40, 40, 80)] == 1.0);
  CHECK(s.heights[flat_index(0, 0, 80)] == 0.0);
  CHECK(s.heights.minCoeff() >= 0.0);
  CHECK(s.heights.maxCoeff() <= 1.0);
  // area in cells approximates pi r^2 / pitch^2
  CHECK(s.heights.sum() * 0.25 == doctest::Approx(std::numbers::pi * 100.0).epsilon(0.01));
  bool fractional = false;
  for (Eigen::Index i = 0; i < s.heights.size(); ++i) {
    fractional = fractional || (s.heights[i] > 0.0 && s.heights[i] < 1.0);
  }
  CHECK(fractional);
}

TEST_CASE("image surfaces")
{
  const auto dir = scratch_dir("images");
  const auto grid = GridSpec::create(2, 4, 2.0, 4.0);

  GrayImage black{8, 8, std::vector<std::uint8_t>(64, 0)};
  write_pgm((dir / "black.pgm").string(), black);
  CHECK(load_surface((dir / "black.pgm").string(), grid).heights.isZero(0.0));

  GrayImage mid{5, 3, std::vector<std::uint8_t>(15, 128)};
  write_png((dir / "mid.png").string(), mid);
  const auto s = load_surface((dir / "mid.png").string(), grid);
  CHECK((s.heights.array() - 128.0 / 255.0).abs().maxCoeff() < 1e-15);
  CHECK(128.0 / 255.0 == doctest::Approx(0.50196).epsilon(1e-5));

  // top image row maps to the highest state rows
  GrayImage half{2, 2, {255, 255, 0, 0}};
  write_pgm((dir / "half.pgm").string(), half);
  const auto h = load_surface((dir / "half.pgm").string(), grid);
  CHECK(h.heights[flat_index(7, 3, 8)] == 1.0);
  CHECK(h.heights[flat_index(0, 3, 8)] == 0.0);

  const GrayImage back = read_gray_image((dir / "mid.png").string());
  CHECK(back.width == 5);
  CHECK(back.height == 3);
  CHECK(back.pixels == mid.pixels);

  std::ofstream((dir / "junk.pgm").string()) << "P5\n4 4\n255\n";
  CHECK_THROWS_AS(load_surface((dir / "junk.pgm").string(), grid), Error);
  CHECK_THROWS_AS(load_surface((dir / "missing.png").string(), grid), Error);
  fs::remove_all(dir);
}

TEST_CASE("flat surface gives no gradient readings")
{
  const auto grid = GridSpec::create(2, 4, 2.0, 4.0);
  const auto sensor = SensorModel::create(grid, noiseless());
  const auto s = rasterize(Shape::parse("rectangle(0, 0, 100, 100)"), grid);
  std::mt19937_64 rng(1);
  const auto f = execute_tap(s, {{0.5, -0.5, 0.3}, true}, sensor, rng);
  CHECK(f.axis(Axis::kX).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(f.axis(Axis::kY).cwiseAbs().maxCoeff() < 1e-12);
  const auto & z = f.axis(Axis::kZ);
  CHECK(z.maxCoeff() - z.minCoeff() < 1e-12);
  CHECK(z[0] > 0.0);
}

TEST_CASE("taps are deterministic and echo the pose")
{
  const auto grid = GridSpec::create(2, 4, 2.0, 4.0);
  const auto sensor = SensorModel::create(grid, SensorParams{});
  const auto s = rasterize(Shape::parse("disk(0.5, 0, 1.5)"), grid);
  const TapCommand cmd{{0.5, 1.0, -0.7}, true};
  std::mt19937_64 a(9), b(9);
  const auto fa = execute_tap(s, cmd, sensor, a, 4);
  const auto fb = execute_tap(s, cmd, sensor, b, 4);
  CHECK(fa.motion == cmd.motion);
  CHECK(fa.tap == 4);
  for (Axis axis : kAllAxes) {
    CHECK(fa.axis(axis) == fb.axis(axis));
  }
  const auto quiet = execute_tap(s, {cmd.motion, false}, sensor, a);
  const auto quiet2 = execute_tap(s, {cmd.motion, false}, sensor, b);
  CHECK(quiet.axis(Axis::kZ) == quiet2.axis(Axis::kZ));
  CHECK_THROWS_AS(execute_tap(s, {{5.0, 0.0, 0.0}, false}, sensor, a), Error);
  CHECK_THROWS_AS(execute_tap(s, {{0.0, 0.0, 2.0}, false}, sensor, a), Error);
}

TEST_CASE("step edge reading matches a brute-force evaluation")
{
  const int n = 2, m = 4, side = 8;
  const auto grid = GridSpec::create(n, m, 2.0, 4.0);
  const auto sensor = SensorModel::create(grid, noiseless());
  const auto surface = rasterize(Shape::parse("rectangle(3, 0, 4, 20)"), grid);
  const MotionParams pose{0.0, 0.0, 0.0};
  std::mt19937_64 rng(0);
  const auto frame = execute_tap(surface, {pose, false}, sensor, rng);

  // 1 mm pitch on the HR and state grids, 2 mm on the LR grid
  auto hr_center = [&](int j) { return -1.5 + (j % m); };
  auto hr_center_y = [&](int j) { return -1.5 + (j / m); };
  // clip: Gaussian weights over every state cell, row-normalised
  double hr[m * m];
  for (int i = 0; i < m * m; ++i) {
    const double sx = hr_center(i) + pose.x;
    const double sy = hr_center_y(i) + pose.y;
    double total = 0.0, acc = 0.0;
    for (int j = 0; j < side * side; ++j) {
      const double cx = -3.5 + (j % side), cy = -3.5 + (j / side);
      const double w = std::exp(-((sx - cx) * (sx - cx) + (sy - cy) * (sy - cy)) / 1e-3);
      total += w;
      acc += w * surface.heights[j];
    }
    hr[i] = acc / total;
  }
  // Sobel-x with replicate padding
  double gx[m * m];
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      auto at = [&](int rr, int cc) { return hr[std::clamp(rr, 0, m - 1) * m + std::clamp(cc, 0, m - 1)]; };
      gx[r * m + c] = (at(r - 1, c + 1) + 2 * at(r, c + 1) + at(r + 1, c + 1)) -
                      (at(r - 1, c - 1) + 2 * at(r, c - 1) + at(r + 1, c - 1));
    }
  }
  // H with gamma = 1, max-normalised per row
  for (int i = 0; i < n * n; ++i) {
    const double lx = -1.0 + 2.0 * (i % n), ly = -1.0 + 2.0 * (i / n);
    double best = 1e300;
    for (int j = 0; j < m * m; ++j) {
      const double hx = hr_center(j), hy = hr_center_y(j);
      best = std::min(best, (hx - lx) * (hx - lx) + (hy - ly) * (hy - ly));
    }
    double expected = 0.0;
    for (int j = 0; j < m * m; ++j) {
      const double hx = hr_center(j), hy = hr_center_y(j);
      expected += std::exp(-((hx - lx) * (hx - lx) + (hy - ly) * (hy - ly) - best)) * gx[j];
    }
    CHECK(std::abs(frame.axis(Axis::kX)[i] - expected) < 1e-10);
  }
  // the edge runs along y, so the right LR column sees the larger x response
  CHECK(frame.axis(Axis::kX)[1] > frame.axis(Axis::kX)[0]);
  CHECK(frame.axis(Axis::kX)[1] > 0.0);
  CHECK(frame.axis(Axis::kY).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("true mean leaves zero innovation")
{
  const auto grid = GridSpec::create(2, 6, 2.0, 6.0);
  const auto sensor = SensorModel::create(grid, noiseless());
  const auto surface = rasterize(Shape::parse("cross(0.3, -0.2, 5, 1.2, 20)"), grid);
  StateEstimate s = init_state(grid, {1.0, 1.0, 0.0});
  s.mean = surface.heights;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-6.0, 6.0), a(-1.5, 1.5);
  for (int k = 0; k < 10; ++k) {
    const auto frame = execute_tap(surface, {{u(rng), u(rng), a(rng)}, false}, sensor, rng);
    const ClipMatrix clip = sensor.clip(frame.motion);
    for (Axis axis : kAllAxes) {
      const Eigen::VectorXd innovation = frame.axis(axis) - sensor.composite(axis, clip) * s.mean;
      CHECK(innovation.cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}
