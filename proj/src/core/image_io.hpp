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

#ifndef TAPRECON_CORE_IMAGE_IO_HPP_
#define TAPRECON_CORE_IMAGE_IO_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace taprecon
{

/// 8-bit grayscale raster, row 0 at the top (file order).
struct GrayImage
{
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// Binary PGM (P5, maxval 255) or 8-bit grayscale PNG, chosen by content.
GrayImage read_gray_image(const std::string & path);

void write_pgm(const std::string & path, const GrayImage & image);
void write_png(const std::string & path, const GrayImage & image);
/// Format from the extension (".png" or anything else as PGM).
void write_gray_image(const std::string & path, const GrayImage & image);

/// Renders a flattened square field (row 0 = lowest Y) with values clamped to
/// [0, 1] and scaled to 0..255. The image is flipped so +Y points up.
GrayImage field_to_image(const Eigen::VectorXd & field, int side);

/// Same, after rescaling the field's own [min, max] to [0, 1].
GrayImage field_to_image_autoscaled(const Eigen::VectorXd & field, int side);

/// Places images side by side with `gap` black columns between them; shorter
/// images are top-aligned.
GrayImage hstack(const std::vector<GrayImage> & images, int gap = 2);

}  // namespace taprecon

#endif  // TAPRECON_CORE_IMAGE_IO_HPP_
