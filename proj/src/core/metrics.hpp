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

#ifndef TAPRECON_CORE_METRICS_HPP_
#define TAPRECON_CORE_METRICS_HPP_

#include "core/grid.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace taprecon
{

// SSIM with the usual Gaussian-window parameters: 11x11 window, sigma 1.5,
// K1 = 0.01, K2 = 0.03, dynamic range 1. Inputs are clamped to [0, 1] and
// the index is averaged over all fully-contained windows.
inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;
inline constexpr double kSsimRange = 1.0;

struct SsimResult
{
  double ssim = 0.0;
  /// Mean contrast-structure term (2 s_ab + C2) / (s_a^2 + s_b^2 + C2).
  double contrast_structure = 0.0;
};

/// Images are flattened row-major, rows x cols.
SsimResult ssim_components(const Eigen::VectorXd & a, const Eigen::VectorXd & b, int rows, int cols);
double ssim(const Eigen::VectorXd & a, const Eigen::VectorXd & b, int rows, int cols);

double mse(const Eigen::VectorXd & a, const Eigen::VectorXd & b);

/// For data range 1; +inf for identical inputs.
double psnr(const Eigen::VectorXd & a, const Eigen::VectorXd & b);

struct EpisodeMetadata
{
  std::string policy;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::string surface;
  int sensor_taxels = 0;
  int hr_taxels = 0;
  double scale = 0.0;
  double sensor_side_mm = 0.0;
  std::array<double, 3> gamma{};
  std::array<double, 3> sigma{};
  double beta_c = 0.0;
  bool simulator_noise = true;
  long taps = 0;
};

struct TapRecord
{
  long t = 0;  // 1-based tap count after this update
  MotionParams motion;
  long action_index = -1;  // -1 for the fixed first tap
  double ssim_state = 0.0;
  double ssim_patch = 0.0;
  double mse_state = 0.0;
  double psnr_state = 0.0;
  double trace_cov = 0.0;
  int clip_fallback_rows = 0;
  double update_ms = 0.0;
  double scoring_ms = 0.0;
};

class EpisodeLog
{
public:
  explicit EpisodeLog(EpisodeMetadata meta) : meta_(std::move(meta)) {}

  const EpisodeMetadata & metadata() const { return meta_; }
  const std::vector<TapRecord> & records() const { return records_; }

  /// Records must arrive with strictly increasing t.
  void append(const TapRecord & record);

  /// One row per tap. Wall-clock timings are excluded so the file is a pure
  /// function of (config, seed); see write_timing_csv.
  void write_csv(std::ostream & out) const;
  void write_timing_csv(std::ostream & out) const;
  /// key = value lines, including the SSIM parameters.
  void write_metadata(std::ostream & out) const;

  /// Reads what write_csv produced (metadata left default).
  static EpisodeLog read_csv(std::istream & in);

private:
  EpisodeMetadata meta_;
  std::vector<TapRecord> records_;
};

/// Shortest decimal form that round-trips ("nan"/"inf"/"-inf" for specials).
std::string format_number(double v);

/// RFC-4180 field quoting.
std::string csv_field(const std::string & s);

/// Splits one CSV record honouring quoted fields.
std::vector<std::string> parse_csv_line(const std::string & line);

}  // namespace taprecon

#endif  // TAPRECON_CORE_METRICS_HPP_
