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
#include <map>
#include <optional>
#include <set>
#include <string>

#include "faceforge/corpus.hpp"
#include "faceforge/image.hpp"

namespace faceforge {

enum class FacialRegion { Eyes, Mouth, Nose };

std::string_view to_string(FacialRegion region);
FacialRegion parse_region(std::string_view text);

struct SyntheticConfig {
  int n_real_videos = 20;
  int n_fake_per_real = 1;
  int frames_per_video = 8;
  int image_side = 64;
  double artifact_strength = 0.5;  ///< in [0, 1]; 0 makes fakes identical to sources
  std::set<FacialRegion> artifact_regions{FacialRegion::Eyes, FacialRegion::Mouth, FacialRegion::Nose};
  std::uint64_t seed = 0;
  /// Real-video split sizes; unset means 70/15/15 of n_real_videos.
  std::optional<std::size_t> n_train, n_val, n_test;

  void validate() const;
};

/// Per-frame render geometry of one procedural face.
struct FaceGeometry {
  double cx = 0, cy = 0, rx = 0, ry = 0;  ///< head ellipse
  Detection box() const { return {cx - rx, cy - ry, cx + rx, cy + ry, 1.0}; }
};

struct SyntheticFrame {
  Image image;
  Image artifact_mask;  ///< 1 channel, 1 inside perturbed regions (fakes only)
  FaceGeometry geometry;
};

/// Renders frame `frame_index` of real video `video_index` (deterministic in
/// the config seed).
SyntheticFrame render_real_frame(const SyntheticConfig& config, int video_index, int frame_index);

/// Applies the fake perturbation `fake_index` of `video_index` to a rendered
/// real frame. Pixels outside the region mask are untouched.
SyntheticFrame make_fake_frame(const SyntheticConfig& config, const SyntheticFrame& real, int video_index,
                               int fake_index);

/// Writes frames/, masks/, faces.jsonl and manifest.jsonl under `out_dir`
/// and returns the split manifest.
SplitManifest generate_synthetic_corpus(const SyntheticConfig& config, const std::filesystem::path& out_dir);

/// Lookup of the artifact masks recorded in faces.jsonl.
class ArtifactMasks {
 public:
  explicit ArtifactMasks(const std::filesystem::path& faces_jsonl);
  /// Mask image for a fake frame; nullopt for reals and unknown frames.
  std::optional<Image> mask_for(const std::filesystem::path& frame_path) const;

 private:
  std::map<std::string, std::filesystem::path> masks_;
};

}  // namespace faceforge
