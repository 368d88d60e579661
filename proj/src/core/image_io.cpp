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

#include "core/image_io.hpp"

#include "core/error.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace taprecon
{

namespace
{

std::vector<std::uint8_t> slurp(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open image " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Reads one whitespace/comment separated header token of a PNM file.
std::string pnm_token(const std::vector<std::uint8_t> & data, std::size_t & pos)
{
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') {
        ++pos;
      }
    } else if (std::isspace(data[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string token;
  while (pos < data.size() && !std::isspace(data[pos]) && data[pos] != '#') {
    token.push_back(static_cast<char>(data[pos++]));
  }
  return token;
}

int parse_dimension(const std::string & token, const std::string & path)
{
  try {
    const int v = std::stoi(token);
    require(v > 0, ErrorCode::kIo, "bad PGM header in " + path);
    return v;
  } catch (const std::logic_error &) {
    fail(ErrorCode::kIo, "bad PGM header in " + path);
  }
}

GrayImage decode_pgm(const std::vector<std::uint8_t> & data, const std::string & path)
{
  std::size_t pos = 2;
  GrayImage img;
  img.width = parse_dimension(pnm_token(data, pos), path);
  img.height = parse_dimension(pnm_token(data, pos), path);
  const int maxval = parse_dimension(pnm_token(data, pos), path);
  require(maxval == 255, ErrorCode::kIo, path + ": only 8-bit PGM (maxval 255) is supported");
  ++pos;  // single whitespace before the raster
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  require(pos + count <= data.size(), ErrorCode::kIo, path + ": PGM raster is truncated");
  img.pixels.assign(data.begin() + static_cast<std::ptrdiff_t>(pos), data.begin() + static_cast<std::ptrdiff_t>(pos + count));
  return img;
}

GrayImage decode_png(const std::string & path)
{
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  require(png_image_begin_read_from_file(&image, path.c_str()) != 0, ErrorCode::kIo, path + ": " + image.message);
  // png_image hides the stored layout, so check the IHDR bytes directly
  const auto raw = slurp(path);
  const int bit_depth = raw.size() > 25 ? raw[24] : 0;
  const int color_type = raw.size() > 25 ? raw[25] : -1;
  if (color_type != 0 || bit_depth != 8) {
    png_image_free(&image);
    fail(
      ErrorCode::kIo, path + ": expected an 8-bit grayscale PNG (bit depth " + std::to_string(bit_depth) +
                        ", color type " + std::to_string(color_type) + ")");
  }
  image.format = PNG_FORMAT_GRAY;
  GrayImage img;
  img.width = static_cast<int>(image.width);
  img.height = static_cast<int>(image.height);
  img.pixels.resize(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, img.pixels.data(), 0, nullptr) == 0) {
    const std::string message = image.message;
    png_image_free(&image);
    fail(ErrorCode::kIo, path + ": " + message);
  }
  return img;
}

}  // namespace

GrayImage read_gray_image(const std::string & path)
{
  const auto data = slurp(path);
  if (data.size() >= 2 && data[0] == 'P' && data[1] == '5') {
    return decode_pgm(data, path);
  }
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (data.size() >= 8 && std::equal(kPngSig, kPngSig + 8, data.begin())) {
    return decode_png(path);
  }
  fail(ErrorCode::kIo, path + ": not a binary PGM (P5) or PNG image");
}

void write_pgm(const std::string & path, const GrayImage & image)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path);
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char *>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path);
}

void write_png(const std::string & path, const GrayImage & image)
{
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_GRAY;
  if (png_image_write_to_file(&png, path.c_str(), 0, image.pixels.data(), 0, nullptr) == 0) {
    const std::string message = png.message;
    png_image_free(&png);
    fail(ErrorCode::kIo, "cannot write " + path + ": " + message);
  }
}

void write_gray_image(const std::string & path, const GrayImage & image)
{
  const bool png = path.size() >= 4 && path.compare(path.size() - 4, 4, ".png") == 0;
  if (png) {
    write_png(path, image);
  } else {
    write_pgm(path, image);
  }
}

GrayImage field_to_image(const Eigen::VectorXd & field, int side)
{
  require(
    field.size() == static_cast<Eigen::Index>(side) * side, ErrorCode::kDimensionMismatch,
    "field is not side x side");
  GrayImage img;
  img.width = side;
  img.height = side;
  img.pixels.resize(static_cast<std::size_t>(side) * side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      double v = field[static_cast<Eigen::Index>(r) * side + c];
      v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
      img.pixels[static_cast<std::size_t>(side - 1 - r) * side + c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  return img;
}

GrayImage field_to_image_autoscaled(const Eigen::VectorXd & field, int side)
{
  const double lo = field.minCoeff();
  const double hi = field.maxCoeff();
  if (!(hi > lo)) {
    return field_to_image(Eigen::VectorXd::Zero(field.size()), side);
  }
  return field_to_image(((field.array() - lo) / (hi - lo)).matrix(), side);
}

GrayImage hstack(const std::vector<GrayImage> & images, int gap)
{
  GrayImage out;
  for (const auto & img : images) {
    out.height = std::max(out.height, img.height);
    out.width += img.width;
  }
  if (!images.empty()) {
    out.width += gap * static_cast<int>(images.size() - 1);
  }
  out.pixels.assign(static_cast<std::size_t>(out.width) * out.height, 0);
  int x = 0;
  for (const auto & img : images) {
    for (int r = 0; r < img.height; ++r) {
      std::copy_n(
        img.pixels.begin() + static_cast<std::ptrdiff_t>(r) * img.width, img.width,
        out.pixels.begin() + static_cast<std::ptrdiff_t>(r) * out.width + x);
    }
    x += img.width + gap;
  }
  return out;
}

}  // namespace taprecon
