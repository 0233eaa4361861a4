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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "faceforge/augment.hpp"
#include "faceforge/corpus.hpp"
#include "faceforge/model.hpp"
#include "faceforge/synthetic.hpp"
#include "faceforge/training.hpp"

namespace faceforge {

struct EvaluationSettings {
  int frames_per_video = 32;
  /// Empty means every non-empty subset of the supplied models.
  std::vector<std::vector<std::string>> subsets;
};

struct AttnSettings {
  int n_faces = 16;
  double blend_alpha = 0.5;
  std::string colormap = "viridis";
};

struct ProjectSettings {
  int n_samples = 200;
};

/// Everything one pipeline run needs. All randomness derives from `seed`
/// through named sub-streams (see stream_seed).
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path data_dir = "data";
  std::filesystem::path out_dir = "runs";
  std::string detector = "oracle";  ///< "oracle" (faces.jsonl) or "full_frame"

  SyntheticConfig synthetic;
  BackboneConfig backbone = BackboneConfig::toy(64, 64, false);
  int attention_stage = 2;  ///< used by the attention variants
  TrainConfig train;        ///< end-to-end training
  TrainConfig siamese;      ///< triplet phase of the siamese variants
  TrainConfig finetune;     ///< classifier phase of the siamese variants
  AugmentConfig augment;
  EvaluationSettings evaluation;
  AttnSettings attn;
  ProjectSettings project;
  std::vector<int> fpv_list{4, 8, 15, 32};

  /// Parses JSON. `seed` is mandatory; unknown keys are errors. The siamese
  /// and finetune sections start as copies of `train` and override it.
  static RunConfig from_json(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);
  std::string to_json() const;

  /// Derived seed of a named sub-stream ("corpus", "model", "train", ...).
  std::uint64_t stream_seed(std::string_view name) const;

  /// The backbone with the attention block toggled for `variant`.
  BackboneConfig backbone_for(Variant variant) const;

  /// Re-derives the per-stage seeds from `seed`. Called after overrides.
  void apply_seed(std::uint64_t new_seed);

  std::filesystem::path manifest_path() const { return data_dir / "manifest.jsonl"; }
  std::filesystem::path faces_path() const { return data_dir / "faces.jsonl"; }
};

std::shared_ptr<const FaceDetector> make_detector(const RunConfig& config);

}  // namespace faceforge
