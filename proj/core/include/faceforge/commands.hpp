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

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "faceforge/evaluation.hpp"
#include "faceforge/run_config.hpp"
#include "faceforge/synthetic.hpp"

namespace faceforge {

struct GenDataResult {
  std::filesystem::path manifest;
  std::size_t n_videos = 0;
};

/// Generates the synthetic corpus into config.data_dir, which must exist.
GenDataResult cmd_gen_data(const RunConfig& config, std::ostream& log);

struct TrainOutput {
  std::filesystem::path checkpoint;
  std::vector<std::filesystem::path> histories;
};

/// B and BAtt train end to end; BST and BAttST train the encoder with triplets
/// and then the classifier alone.
TrainOutput cmd_train(const RunConfig& config, Variant variant, std::ostream& log);

struct EvaluateOutput {
  std::filesystem::path scores;
  std::filesystem::path results;
  std::vector<EnsembleResult> rows;
};

/// Scores the test split with every checkpoint and evaluates the configured
/// ensembles. Model ids are the checkpoints' variant names.
EvaluateOutput cmd_evaluate(const RunConfig& config, const std::vector<std::filesystem::path>& checkpoints,
                            std::ostream& log);

struct LocalizationStats {
  double inside = 0.0;   ///< mean over fakes of the mean map value inside the artifact mask
  double outside = 0.0;  ///< same, outside the mask
  std::size_t n_faces = 0;

  double relative_contrast() const { return (inside - outside) / outside; }
};

/// Compares upscaled attention inside and outside the synthetic artifact
/// masks over the fakes of `split`.
LocalizationStats measure_localization(const Model<float>& model, const FaceLoader& loader,
                                       const ArtifactMasks& masks, Split split, int frames_per_video);

struct AttnOutput {
  std::vector<std::filesystem::path> overlays;
  LocalizationStats localization;
};

/// Writes one overlay PNG per requested test face. Errors on a checkpoint
/// without the attention block.
AttnOutput cmd_attn(const RunConfig& config, const std::filesystem::path& checkpoint, std::ostream& log);

struct ProjectOutput {
  std::filesystem::path csv;
  double silhouette = 0.0;
};

/// 2-D projection of test-split features, written as x,y,label rows.
ProjectOutput cmd_project(const RunConfig& config, const std::filesystem::path& checkpoint, std::ostream& log);

struct FpvRun {
  int fpv = 0;
  std::filesystem::path history;
  double final_train_loss = 0.0;  ///< mean of the last 10% of iterations
  double best_val_loss = 0.0;
};

/// Trains variant B end to end once per frames-per-video value.
std::vector<FpvRun> cmd_fpv_sweep(const RunConfig& config, const std::vector<int>& fpv_list, std::ostream& log);

/// First `limit` loadable faces of `split` in manifest order, up to
/// `frames_per_video` planned frames per video, optionally restricted to one label.
std::vector<FaceCrop> load_split_faces(const FaceLoader& loader, Split split, int frames_per_video,
                                       std::size_t limit, std::optional<Label> label = std::nullopt);

}  // namespace faceforge
