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

#include "faceforge/attnviz.hpp"

#include <algorithm>
#include <cmath>

#include "faceforge/error.hpp"

namespace faceforge {

namespace {

// Viridis sampled at t = i / 16.
constexpr std::array<std::array<float, 3>, 17> kViridis = {{
    {0.267004f, 0.004874f, 0.329415f}, {0.282327f, 0.094955f, 0.417331f}, {0.278826f, 0.175490f, 0.483397f},
    {0.258965f, 0.251537f, 0.524736f}, {0.229739f, 0.322361f, 0.545706f}, {0.199430f, 0.387607f, 0.554642f},
    {0.172719f, 0.448791f, 0.557885f}, {0.149039f, 0.508051f, 0.557250f}, {0.127568f, 0.566949f, 0.550556f},
    {0.120638f, 0.625828f, 0.533488f}, {0.157851f, 0.683765f, 0.501686f}, {0.246070f, 0.738910f, 0.452024f},
    {0.369214f, 0.788888f, 0.382914f}, {0.515992f, 0.831158f, 0.294279f}, {0.678489f, 0.863742f, 0.189503f},
    {0.845561f, 0.887322f, 0.099702f}, {0.993248f, 0.906157f, 0.143936f},
}};

double source_coord(int i, int out, int in) {
  return out > 1 ? static_cast<double>(i) * (in - 1) / (out - 1) : 0.0;
}

}  // namespace

AttentionMap upscale_map(const AttentionMap& map, int side) {
  FACEFORGE_CHECK(map.height > 0 && map.width > 0 && map.values.size() == static_cast<std::size_t>(map.height) * map.width,
                  ErrorKind::ShapeMismatch, "attention map is empty or malformed");
  FACEFORGE_CHECK(side >= map.height && side >= map.width, ErrorKind::InvalidArgument,
                  "upscale side " + std::to_string(side) + " is smaller than the map");
  AttentionMap out(side, side);
  for (int y = 0; y < side; ++y) {
    const double sy = source_coord(y, side, map.height);
    const int y0 = std::min(static_cast<int>(sy), map.height - 1);
    const int y1 = std::min(y0 + 1, map.height - 1);
    const double fy = sy - y0;
    for (int x = 0; x < side; ++x) {
      const double sx = source_coord(x, side, map.width);
      const int x0 = std::min(static_cast<int>(sx), map.width - 1);
      const int x1 = std::min(x0 + 1, map.width - 1);
      const double fx = sx - x0;
      const double top = map.at(y0, x0) + fx * (map.at(y0, x1) - map.at(y0, x0));
      const double bottom = map.at(y1, x0) + fx * (map.at(y1, x1) - map.at(y1, x0));
      out.at(y, x) = top + fy * (bottom - top);
    }
  }
  return out;
}

std::array<float, 3> viridis(double t) {
  t = std::clamp(std::isnan(t) ? 0.0 : t, 0.0, 1.0);
  const double s = t * 16.0;
  const int i = std::min(static_cast<int>(s), 15);
  const double f = s - i;
  std::array<float, 3> rgb{};
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<float>(kViridis[i][c] + f * (kViridis[i + 1][c] - kViridis[i][c]));
  return rgb;
}

AttentionOverlay make_overlay(const FaceCrop& face, const AttentionMap& map, double blend_alpha) {
  FACEFORGE_CHECK(blend_alpha >= 0.0 && blend_alpha <= 1.0, ErrorKind::InvalidArgument,
                  "blend alpha must lie in [0, 1], got " + std::to_string(blend_alpha));
  validate_face(face);
  for (double v : map.values)
    FACEFORGE_CHECK(v > 0.0 && v < 1.0, ErrorKind::InvalidArgument, "attention map values must lie in (0, 1)");
  return AttentionOverlay{face, map, upscale_map(map, face.side()), blend_alpha};
}

Image render_overlay(const AttentionOverlay& overlay) {
  const int side = overlay.base.side();
  const auto a = static_cast<float>(overlay.blend_alpha);
  Image out(side, side, 3);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const auto rgb = viridis(overlay.upscaled_map.at(y, x));
      for (int c = 0; c < 3; ++c) {
        const float base = overlay.base.pixels.at(x, y, c);
        out.at(x, y, c) = a == 0.0f ? base : a == 1.0f ? rgb[c] : (1.0f - a) * base + a * rgb[c];
      }
    }
  }
  return out;
}

Image render_overlay(const FaceCrop& face, const AttentionMap& map, double blend_alpha) {
  return render_overlay(make_overlay(face, map, blend_alpha));
}

std::vector<AttentionMap> attention_maps(const Model<float>& model, std::span<const FaceCrop> faces) {
  const Tensor<float> maps = model.attention_map(faces);
  std::vector<AttentionMap> out;
  out.reserve(static_cast<std::size_t>(maps.n));
  for (int i = 0; i < maps.n; ++i) {
    AttentionMap m(maps.h, maps.w);
    std::copy(maps.sample(i), maps.sample(i) + maps.plane(), m.values.begin());
    out.push_back(std::move(m));
  }
  return out;
}

MaskContrast mask_contrast(const AttentionMap& upscaled, const Image& mask) {
  FACEFORGE_CHECK(mask.channels == 1 && mask.width == upscaled.width && mask.height == upscaled.height,
                  ErrorKind::ShapeMismatch, "mask must be single-channel and match the map size");
  MaskContrast r;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y, 0) > 0.5f) {
        r.inside += upscaled.at(y, x);
        ++r.inside_pixels;
      } else {
        r.outside += upscaled.at(y, x);
        ++r.outside_pixels;
      }
    }
  }
  if (r.inside_pixels) r.inside /= static_cast<double>(r.inside_pixels);
  if (r.outside_pixels) r.outside /= static_cast<double>(r.outside_pixels);
  return r;
}

Image face_mask(const Image& frame_mask, const FaceCrop& face) {
  return resize_bilinear(crop(frame_mask, face.source_box), face.side(), face.side());
}

}  // namespace faceforge
