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
#include "core/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace taprecon;

namespace
{

constexpr int kRows = 24;
constexpr int kCols = 30;

// Smooth test pair shared with an external SSIM implementation.
void reference_pair(Eigen::VectorXd & a, Eigen::VectorXd & b)
{
  a.resize(kRows * kCols);
  b.resize(kRows * kCols);
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) {
      const double v = 0.5 + 0.4 * std::sin(0.3 * r) * std::cos(0.2 * c);
      a[r * kCols + c] = v;
      b[r * kCols + c] = std::clamp(v + 0.1 * std::cos(0.5 * r + 0.7 * c), 0.0, 1.0);
    }
  }
}

Eigen::VectorXd random_image(int n, std::mt19937_64 & rng, double lo = 0.0, double hi = 1.0)
{
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = u(rng);
  }
  return v;
}

Eigen::VectorXd transpose_image(const Eigen::VectorXd & v, int rows, int cols)
{
  Eigen::VectorXd t(v.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      t[c * rows + r] = v[r * cols + c];
    }
  }
  return t;
}

}  // namespace

TEST_CASE("ssim of an image with itself is one")
{
  std::mt19937_64 rng(1);
  for (int k = 0; k < 5; ++k) {
    const Eigen::VectorXd a = random_image(kRows * kCols, rng);
    CHECK(ssim(a, a, kRows, kCols) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const Eigen::VectorXd flat = Eigen::VectorXd::Constant(kRows * kCols, 0.3);
  CHECK(ssim(flat, flat, kRows, kCols) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim of zeros against ones is the luminance floor")
{
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(kRows * kCols);
  const Eigen::VectorXd o = Eigen::VectorXd::Ones(kRows * kCols);
  const double c1 = (kSsimK1 * kSsimRange) * (kSsimK1 * kSsimRange);
  const double expected = c1 / (1.0 + c1);
  const double v = ssim(z, o, kRows, kCols);
  CHECK(v < 0.01);
  CHECK(v == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("ssim is symmetric and transpose invariant")
{
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) {
    const Eigen::VectorXd a = random_image(kRows * kCols, rng);
    const Eigen::VectorXd b = random_image(kRows * kCols, rng);
    const double ab = ssim(a, b, kRows, kCols);
    CHECK(std::abs(ab - ssim(b, a, kRows, kCols)) < 1e-12);
    CHECK(
      std::abs(ab - ssim(transpose_image(a, kRows, kCols), transpose_image(b, kRows, kCols), kCols, kRows)) <
      1e-12);
  }
}

TEST_CASE("contrast-structure term ignores a common shift")
{
  std::mt19937_64 rng(3);
  const Eigen::VectorXd a = random_image(kRows * kCols, rng, 0.2, 0.6);
  const Eigen::VectorXd b = random_image(kRows * kCols, rng, 0.2, 0.6);
  const auto base = ssim_components(a, b, kRows, kCols);
  for (double shift : {-0.15, 0.1, 0.35}) {
    const Eigen::VectorXd as = (a.array() + shift).matrix();
    const Eigen::VectorXd bs = (b.array() + shift).matrix();
    CHECK(std::abs(ssim_components(as, bs, kRows, kCols).contrast_structure - base.contrast_structure) < 1e-9);
  }
}

TEST_CASE("ssim matches an external reference value")
{
  Eigen::VectorXd a, b;
  reference_pair(a, b);
  // skimage.metrics.structural_similarity(gaussian_weights=True, sigma=1.5,
  // use_sample_covariance=False, data_range=1.0)
  CHECK(ssim(a, b, kRows, kCols) == doctest::Approx(0.7846154241974026).epsilon(1e-6));
}

TEST_CASE("ssim input checks")
{
  const Eigen::VectorXd a = Eigen::VectorXd::Zero(100);
  CHECK_THROWS_AS(ssim(a, Eigen::VectorXd::Zero(99), 10, 10), Error);
  CHECK_THROWS_AS(ssim(Eigen::VectorXd::Zero(64), Eigen::VectorXd::Zero(64), 8, 8), Error);
}

TEST_CASE("mse and psnr")
{
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(50);
  const Eigen::VectorXd o = Eigen::VectorXd::Ones(50);
  CHECK(mse(z, z) == 0.0);
  CHECK(mse(z, o) == 1.0);
  CHECK(psnr(z, o) == doctest::Approx(0.0));
  CHECK(std::isinf(psnr(o, o)));
  CHECK_THROWS_AS(mse(z, Eigen::VectorXd::Zero(49)), Error);

  std::mt19937_64 rng(4);
  const Eigen::VectorXd a = random_image(777, rng), b = random_image(777, rng);
  double acc = 0.0;
  for (int i = 0; i < 777; ++i) {
    acc += (a[i] - b[i]) * (a[i] - b[i]);
  }
  CHECK(std::abs(mse(a, b) - acc / 777.0) < 1e-15);
  CHECK(psnr(a, b) == doctest::Approx(-10.0 * std::log10(acc / 777.0)));
}

TEST_CASE("number formatting round-trips")
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) {
    const double v = u(rng) / (i + 1);
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv quoting")
{
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const std::vector<std::string> fields = {"disk(0, 0, 10)", "x", "", "q\"uote", "semi;colon"};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    line += (i ? "," : "") + csv_field(fields[i]);
  }
  CHECK(parse_csv_line(line) == fields);
}

TEST_CASE("episode log CSV round trip")
{
  EpisodeLog log(EpisodeMetadata{});
  for (long t = 1; t <= 3; ++t) {
    TapRecord r;
    r.t = t;
    r.motion = {0.5 * t, -0.25, 0.1 * t};
    r.action_index = t == 1 ? -1 : 100 + t;
    r.ssim_state = 0.1 * t;
    r.ssim_patch = std::nan("");
    r.mse_state = 0.01 / t;
    r.psnr_state = 20.0 + t;
    r.trace_cov = 1000.0 / t;
    r.update_ms = 3.0;
    log.append(r);
  }
  std::stringstream out;
  log.write_csv(out);
  CHECK(out.str().find("update_ms") == std::string::npos);
  const EpisodeLog back = EpisodeLog::read_csv(out);
  REQUIRE(back.records().size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto & a = log.records()[i];
    const auto & b = back.records()[i];
    CHECK(a.t == b.t);
    CHECK(a.motion == b.motion);
    CHECK(a.action_index == b.action_index);
    CHECK(a.ssim_state == b.ssim_state);
    CHECK(std::isnan(b.ssim_patch));
    CHECK(a.trace_cov == b.trace_cov);
  }

  std::stringstream timing;
  log.write_timing_csv(timing);
  CHECK(timing.str().rfind("t,update_ms,scoring_ms\n", 0) == 0);

  TapRecord stale;
  stale.t = 3;
  CHECK_THROWS_AS(log.append(stale), Error);
  std::stringstream empty;
  CHECK_THROWS_AS(EpisodeLog::read_csv(empty), Error);
  std::stringstream ragged("t,x_mm\n1\n");
  CHECK_THROWS_AS(EpisodeLog::read_csv(ragged), Error);
}
