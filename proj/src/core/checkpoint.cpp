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
#include "core/kalman.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <type_traits>
#include <vector>

namespace taprecon
{

namespace
{

constexpr std::array<char, 8> kMagic = {'T', 'A', 'P', 'R', 'C', 'K', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream & out, T value)
{
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get(std::istream & in)
{
  std::array<char, sizeof(T)> bytes;
  in.read(bytes.data(), sizeof(T));
  require(static_cast<bool>(in), ErrorCode::kIo, "checkpoint is truncated");
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void put_doubles(std::ostream & out, const double * data, std::size_t count)
{
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char *>(data), static_cast<std::streamsize>(count * sizeof(double)));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      put(out, data[i]);
    }
  }
}

void get_doubles(std::istream & in, double * data, std::size_t count)
{
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char *>(data), static_cast<std::streamsize>(count * sizeof(double)));
    require(static_cast<bool>(in), ErrorCode::kIo, "checkpoint is truncated");
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      data[i] = get<double>(in);
    }
  }
}

}  // namespace

void write_checkpoint(std::ostream & out, const GridSpec & grid, const PriorConfig & prior, const StateEstimate & state)
{
  const Eigen::Index n = grid.cell_count(GridKind::kState);
  require(
    state.mean.size() == n && state.covariance.rows() == n && state.covariance.cols() == n,
    ErrorCode::kDimensionMismatch, "state does not match the grid");

  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, 0);
  put<std::int32_t>(out, grid.sensor_taxels());
  put<std::int32_t>(out, grid.hr_taxels());
  put<double>(out, grid.scale());
  put<double>(out, grid.sensor_side());
  put<double>(out, prior.amplitude);
  put<double>(out, prior.length_scale);
  put<double>(out, prior.mean);
  put<std::int64_t>(out, state.taps);
  put<std::int64_t>(out, n);
  put_doubles(out, state.mean.data(), static_cast<std::size_t>(n));
  put_doubles(out, state.covariance.data(), static_cast<std::size_t>(n * n));
  require(static_cast<bool>(out), ErrorCode::kIo, "failed to write checkpoint");
}

Checkpoint read_checkpoint(std::istream & in)
{
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  require(static_cast<bool>(in) && magic == kMagic, ErrorCode::kIo, "not a taprecon checkpoint");
  const auto version = get<std::uint32_t>(in);
  require(version == kVersion, ErrorCode::kIo, "unsupported checkpoint version " + std::to_string(version));
  (void)get<std::uint32_t>(in);

  const auto n_taxels = get<std::int32_t>(in);
  const auto m_taxels = get<std::int32_t>(in);
  const auto scale = get<double>(in);
  const auto side = get<double>(in);
  GridSpec grid = GridSpec::create(n_taxels, m_taxels, scale, side);

  PriorConfig prior;
  prior.amplitude = get<double>(in);
  prior.length_scale = get<double>(in);
  prior.mean = get<double>(in);

  StateEstimate state;
  state.taps = get<std::int64_t>(in);
  const auto n = get<std::int64_t>(in);
  require(n == grid.cell_count(GridKind::kState), ErrorCode::kIo, "checkpoint dimension does not match its grid");
  state.mean.resize(n);
  state.covariance.resize(n, n);
  get_doubles(in, state.mean.data(), static_cast<std::size_t>(n));
  get_doubles(in, state.covariance.data(), static_cast<std::size_t>(n * n));
  return Checkpoint{grid, prior, std::move(state)};
}

void save_checkpoint(const std::string & path, const GridSpec & grid, const PriorConfig & prior, const StateEstimate & state)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open " + path + " for writing");
  write_checkpoint(out, grid, prior, state);
}

Checkpoint load_checkpoint(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path);
  return read_checkpoint(in);
}

}  // namespace taprecon
