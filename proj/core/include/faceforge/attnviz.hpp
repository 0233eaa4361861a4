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

#include <array>
#include <filesystem>
#include <vector>

#include "faceforge/corpus.hpp"
#include "faceforge/image.hpp"
#include "faceforge/model.hpp"

namespace faceforge {

/// Single-channel spatial map, row-major.
struct AttentionMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  AttentionMap() = default;
  AttentionMap(int h, int w, double fill = 0.0)
      : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}

  double& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Bilinear upscale with aligned corners, so the four corner values carry
/// over unchanged. Requires side >= max(height, width).
AttentionMap upscale_map(const AttentionMap& map, int side);

/// Viridis colormap; t is clamped to [0, 1].
std::array<float, 3> viridis(double t);

struct AttentionOverlay {
  FaceCrop base;
  AttentionMap map;
  AttentionMap upscaled_map;
  double blend_alpha = 0.5;
};

/// Validates alpha and map range, and upscales the map to the face side.
AttentionOverlay make_overlay(const FaceCrop& face, const AttentionMap& map, double blend_alpha = 0.5);

/// (1 - alpha) * face + alpha * viridis(upscaled map), RGB.
Image render_overlay(const AttentionOverlay& overlay);
Image render_overlay(const FaceCrop& face, const AttentionMap& map, double blend_alpha = 0.5);

/// Attention maps of a model with the attention block, one per face.
std::vector<AttentionMap> attention_maps(const Model<float>& model, std::span<const FaceCrop> faces);

struct MaskContrast {
  double inside = 0.0;
  double outside = 0.0;
  std::size_t inside_pixels = 0;
  std::size_t outside_pixels = 0;
};

/// Mean of an upscaled map over pixels where mask > 0.5 and elsewhere.
MaskContrast mask_contrast(const AttentionMap& upscaled, const Image& mask);

/// Crops a frame-sized mask to the face box and resizes it to the face side.
Image face_mask(const Image& frame_mask, const FaceCrop& face);

}  // namespace faceforge
