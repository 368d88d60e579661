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

#include "core/metrics.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace taprecon
{

namespace
{

std::array<double, kSsimWindow * kSsimWindow> gaussian_window()
{
  std::array<double, kSsimWindow * kSsimWindow> w{};
  constexpr int half = kSsimWindow / 2;
  double total = 0.0;
  for (int r = 0; r < kSsimWindow; ++r) {
    for (int c = 0; c < kSsimWindow; ++c) {
      const double d2 = (r - half) * (r - half) + (c - half) * (c - half);
      w[r * kSsimWindow + c] = std::exp(-d2 / (2.0 * kSsimSigma * kSsimSigma));
      total += w[r * kSsimWindow + c];
    }
  }
  for (double & v : w) {
    v /= total;
  }
  return w;
}

void check_same_size(const Eigen::VectorXd & a, const Eigen::VectorXd & b)
{
  require(
    a.size() == b.size(), ErrorCode::kDimensionMismatch,
    "size mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

}  // namespace

SsimResult ssim_components(const Eigen::VectorXd & a, const Eigen::VectorXd & b, int rows, int cols)
{
  check_same_size(a, b);
  require(
    a.size() == static_cast<Eigen::Index>(rows) * cols, ErrorCode::kDimensionMismatch,
    "image size does not match rows x cols");
  require(
    rows >= kSsimWindow && cols >= kSsimWindow, ErrorCode::kInvalidArgument,
    "images must be at least 11 x 11 for SSIM");

  static const auto window = gaussian_window();
  const Eigen::ArrayXd x = a.array().max(0.0).min(1.0);
  const Eigen::ArrayXd y = b.array().max(0.0).min(1.0);
  constexpr double c1 = (kSsimK1 * kSsimRange) * (kSsimK1 * kSsimRange);
  constexpr double c2 = (kSsimK2 * kSsimRange) * (kSsimK2 * kSsimRange);

  double ssim_sum = 0.0;
  double cs_sum = 0.0;
  long windows = 0;
  for (int r0 = 0; r0 + kSsimWindow <= rows; ++r0) {
    for (int c0 = 0; c0 + kSsimWindow <= cols; ++c0) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int r = 0; r < kSsimWindow; ++r) {
        const Eigen::Index base = static_cast<Eigen::Index>(r0 + r) * cols + c0;
        for (int c = 0; c < kSsimWindow; ++c) {
          const double w = window[r * kSsimWindow + c];
          const double xv = x[base + c];
          const double yv = y[base + c];
          mx += w * xv;
          my += w * yv;
          sxx += w * xv * xv;
          syy += w * yv * yv;
          sxy += w * xv * yv;
        }
      }
      const double vx = sxx - mx * mx;
      const double vy = syy - my * my;
      const double cov = sxy - mx * my;
      const double cs = (2.0 * cov + c2) / (vx + vy + c2);
      const double lum = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
      ssim_sum += lum * cs;
      cs_sum += cs;
      ++windows;
    }
  }
  return {ssim_sum / windows, cs_sum / windows};
}

double ssim(const Eigen::VectorXd & a, const Eigen::VectorXd & b, int rows, int cols)
{
  return ssim_components(a, b, rows, cols).ssim;
}

double mse(const Eigen::VectorXd & a, const Eigen::VectorXd & b)
{
  check_same_size(a, b);
  require(a.size() > 0, ErrorCode::kInvalidArgument, "empty input");
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double psnr(const Eigen::VectorXd & a, const Eigen::VectorXd & b)
{
  const double e = mse(a, b);
  if (e == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(kSsimRange * kSsimRange / e);
}

std::string format_number(double v)
{
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string csv_field(const std::string & s)
{
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    return s;
  }
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') {
      quoted += "\"\"";
    } else {
      quoted += c;
    }
  }
  quoted += '"';
  return quoted;
}

std::vector<std::string> parse_csv_line(const std::string & line)
{
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

void EpisodeLog::append(const TapRecord & record)
{
  require(
    records_.empty() || record.t > records_.back().t, ErrorCode::kInvalidArgument,
    "episode records must be strictly ordered by t");
  records_.push_back(record);
}

namespace
{

constexpr const char * kColumns[] = {
  "t",         "x_mm",       "y_mm",      "theta_rad", "action_index",      "ssim_state",
  "ssim_patch", "mse_state", "psnr_state", "trace_cov", "clip_fallback_rows"};

}  // namespace

void EpisodeLog::write_csv(std::ostream & out) const
{
  for (std::size_t i = 0; i < std::size(kColumns); ++i) {
    out << (i ? "," : "") << kColumns[i];
  }
  out << '\n';
  for (const auto & r : records_) {
    out << r.t << ',' << format_number(r.motion.x) << ',' << format_number(r.motion.y) << ','
        << format_number(r.motion.theta) << ',' << r.action_index << ',' << format_number(r.ssim_state) << ','
        << format_number(r.ssim_patch) << ',' << format_number(r.mse_state) << ',' << format_number(r.psnr_state)
        << ',' << format_number(r.trace_cov) << ',' << r.clip_fallback_rows << '\n';
  }
}

void EpisodeLog::write_timing_csv(std::ostream & out) const
{
  out << "t,update_ms,scoring_ms\n";
  for (const auto & r : records_) {
    out << r.t << ',' << format_number(r.update_ms) << ',' << format_number(r.scoring_ms) << '\n';
  }
}

void EpisodeLog::write_metadata(std::ostream & out) const
{
  const auto & m = meta_;
  out << "policy = " << m.policy << '\n'
      << "lambda = " << format_number(m.lambda) << '\n'
      << "seed = " << m.seed << '\n'
      << "surface = " << m.surface << '\n'
      << "sensor_taxels = " << m.sensor_taxels << '\n'
      << "hr_taxels = " << m.hr_taxels << '\n'
      << "scale = " << format_number(m.scale) << '\n'
      << "sensor_side_mm = " << format_number(m.sensor_side_mm) << '\n'
      << "gamma = " << format_number(m.gamma[0]) << ", " << format_number(m.gamma[1]) << ", "
      << format_number(m.gamma[2]) << '\n'
      << "sigma = " << format_number(m.sigma[0]) << ", " << format_number(m.sigma[1]) << ", "
      << format_number(m.sigma[2]) << '\n'
      << "beta_c = " << format_number(m.beta_c) << '\n'
      << "simulator_noise = " << (m.simulator_noise ? "true" : "false") << '\n'
      << "taps = " << m.taps << '\n'
      << "ssim = gaussian window " << kSsimWindow << ", sigma " << format_number(kSsimSigma) << ", K1 "
      << format_number(kSsimK1) << ", K2 " << format_number(kSsimK2) << ", range " << format_number(kSsimRange)
      << ", valid windows\n";
}

EpisodeLog EpisodeLog::read_csv(std::istream & in)
{
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kIo, "episode CSV is empty");
  const auto header = parse_csv_line(line);
  auto column = [&](const char * name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    require(it != header.end(), ErrorCode::kIo, std::string("episode CSV lacks column ") + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ct = column("t"), cx = column("x_mm"), cy = column("y_mm"), cth = column("theta_rad"),
                    ca = column("action_index"), cs = column("ssim_state"), cp = column("ssim_patch"),
                    cm = column("mse_state"), cps = column("psnr_state"), ctr = column("trace_cov");

  EpisodeLog log(EpisodeMetadata{});
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto f = parse_csv_line(line);
    require(f.size() == header.size(), ErrorCode::kIo, "ragged row in episode CSV");
    auto num = [&](std::size_t i) {
      try {
        return std::stod(f[i]);
      } catch (const std::logic_error &) {
        fail(ErrorCode::kIo, "bad number '" + f[i] + "' in episode CSV");
      }
    };
    TapRecord r;
    r.t = static_cast<long>(num(ct));
    r.motion = {num(cx), num(cy), num(cth)};
    r.action_index = static_cast<long>(num(ca));
    r.ssim_state = num(cs);
    r.ssim_patch = num(cp);
    r.mse_state = num(cm);
    r.psnr_state = num(cps);
    r.trace_cov = num(ctr);
    log.append(r);
  }
  return log;
}

}  // namespace taprecon
