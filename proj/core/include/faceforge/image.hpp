/*
 * Copyright 2026 The FaceForge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace faceforge {

/// Interleaved RGB (or single-channel) float image, values nominally in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c = 3, float fill = 0.0f)
      : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

  float& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
  float at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool empty() const { return data.empty(); }
  bool operator==(const Image&) const = default;
};

/// Integer pixel rectangle, half-open: [x0, x1) x [y0, y1).
struct PixelBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool operator==(const PixelBox&) const = default;
};

std::uint8_t to_byte(float v);

/// Quantizes to 8 bits and back, the precision frames have on disk.
Image quantize8(const Image& img);

Image read_png(const std::filesystem::path& path);
/// Writes 8-bit RGB (3 channels) or grayscale (1 channel) PNG.
void write_png(const std::filesystem::path& path, const Image& img);

/// Bilinear resample with half-pixel centers. Same-size resize is the identity
/// and an exact 2x downscale averages 2x2 blocks.
Image resize_bilinear(const Image& src, int width, int height);

Image crop(const Image& src, const PixelBox& box);
Image flip_horizontal(const Image& src);

/// Round-trips an RGB image through an in-memory baseline JPEG at the given
/// quality (1..100).
Image jpeg_roundtrip(const Image& src, int quality);

double mean_abs_diff(const Image& a, const Image& b);

}  // namespace faceforge
