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

#include "faceforge/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

#include "faceforge/error.hpp"

namespace faceforge {

std::uint8_t to_byte(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

Image quantize8(const Image& img) {
  Image out = img;
  for (auto& v : out.data) v = static_cast<float>(to_byte(v)) / 255.0f;
  return out;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Image read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorKind::Io, "cannot read PNG '" + path.string() + "': " + image.message);
  }
  // Grayscale files stay single-channel; everything else decodes to RGB.
  const int channels = (image.format & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorKind::Format, "cannot decode PNG '" + path.string() + "': " + image.message);
  }
  Image out(static_cast<int>(image.width), static_cast<int>(image.height), channels);
  for (std::size_t i = 0; i < buf.size(); ++i) out.data[i] = static_cast<float>(buf[i]) / 255.0f;
  return out;
}

void write_png(const std::filesystem::path& path, const Image& img) {
  FACEFORGE_CHECK(img.channels == 3 || img.channels == 1, ErrorKind::InvalidArgument,
                  "write_png supports 1 or 3 channels");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(img.data.size());
  std::transform(img.data.begin(), img.data.end(), buf.begin(), to_byte);
  if (!png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr)) {
    throw Error(ErrorKind::Io, "cannot write PNG '" + path.string() + "': " + image.message);
  }
}

Image resize_bilinear(const Image& src, int width, int height) {
  FACEFORGE_CHECK(width > 0 && height > 0 && !src.empty(), ErrorKind::InvalidArgument,
                  "resize_bilinear: empty source or target");
  if (width == src.width && height == src.height) return src;
  Image out(width, height, src.channels);
  const double sx = static_cast<double>(src.width) / width;
  const double sy = static_cast<double>(src.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(src.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(src.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < src.channels; ++c) {
        const double top = (1.0 - wx) * src.at(x0, y0, c) + wx * src.at(x1, y0, c);
        const double bot = (1.0 - wx) * src.at(x0, y1, c) + wx * src.at(x1, y1, c);
        out.at(x, y, c) = static_cast<float>((1.0 - wy) * top + wy * bot);
      }
    }
  }
  return out;
}

Image crop(const Image& src, const PixelBox& box) {
  FACEFORGE_CHECK(box.x0 >= 0 && box.y0 >= 0 && box.x1 <= src.width && box.y1 <= src.height &&
                      box.width() > 0 && box.height() > 0,
                  ErrorKind::InvalidArgument, "crop box outside image");
  Image out(box.width(), box.height(), src.channels);
  for (int y = 0; y < box.height(); ++y) {
    const float* row = &src.data[(static_cast<std::size_t>(y + box.y0) * src.width + box.x0) * src.channels];
    std::copy(row, row + static_cast<std::size_t>(box.width()) * src.channels,
              &out.data[static_cast<std::size_t>(y) * box.width() * src.channels]);
  }
  return out;
}

Image flip_horizontal(const Image& src) {
  Image out(src.width, src.height, src.channels);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x)
      for (int c = 0; c < src.channels; ++c) out.at(x, y, c) = src.at(src.width - 1 - x, y, c);
  return out;
}

namespace {

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  std::longjmp(err->jump, 1);
}

}  // namespace

Image jpeg_roundtrip(const Image& src, int quality) {
  FACEFORGE_CHECK(src.channels == 3, ErrorKind::InvalidArgument, "jpeg_roundtrip expects RGB");
  FACEFORGE_CHECK(quality >= 1 && quality <= 100, ErrorKind::InvalidArgument,
                  "JPEG quality must lie in [1, 100], got " + std::to_string(quality));
  std::vector<std::uint8_t> pixels(src.data.size());
  std::transform(src.data.begin(), src.data.end(), pixels.begin(), to_byte);

  unsigned char* encoded = nullptr;
  unsigned long encoded_size = 0;
  {
    jpeg_compress_struct cinfo{};
    JpegErrorManager jerr{};
    cinfo.err = jpeg_std_error(&jerr.base);
    jerr.base.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jump)) {
      jpeg_destroy_compress(&cinfo);
      std::free(encoded);
      throw Error(ErrorKind::Format, "JPEG encode failed");
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &encoded, &encoded_size);
    cinfo.image_width = static_cast<JDIMENSION>(src.width);
    cinfo.image_height = static_cast<JDIMENSION>(src.height);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
      JSAMPROW row = &pixels[static_cast<std::size_t>(cinfo.next_scanline) * src.width * 3];
      jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
  }

  Image out(src.width, src.height, 3);
  {
    jpeg_decompress_struct dinfo{};
    JpegErrorManager jerr{};
    dinfo.err = jpeg_std_error(&jerr.base);
    jerr.base.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jump)) {
      jpeg_destroy_decompress(&dinfo);
      std::free(encoded);
      throw Error(ErrorKind::Format, "JPEG decode failed");
    }
    jpeg_create_decompress(&dinfo);
    jpeg_mem_src(&dinfo, encoded, encoded_size);
    jpeg_read_header(&dinfo, TRUE);
    dinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&dinfo);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(dinfo.output_width) * 3);
    while (dinfo.output_scanline < dinfo.output_height) {
      const auto y = dinfo.output_scanline;
      JSAMPROW ptr = row.data();
      jpeg_read_scanlines(&dinfo, &ptr, 1);
      for (std::size_t i = 0; i < row.size(); ++i)
        out.data[static_cast<std::size_t>(y) * row.size() + i] = static_cast<float>(row[i]) / 255.0f;
    }
    jpeg_finish_decompress(&dinfo);
    jpeg_destroy_decompress(&dinfo);
  }
  std::free(encoded);
  return out;
}

double mean_abs_diff(const Image& a, const Image& b) {
  FACEFORGE_CHECK(a.data.size() == b.data.size() && !a.empty(), ErrorKind::ShapeMismatch,
                  "mean_abs_diff: image sizes differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) sum += std::abs(static_cast<double>(a.data[i]) - b.data[i]);
  return sum / static_cast<double>(a.data.size());
}

}  // namespace faceforge
