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
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "faceforge/corpus.hpp"
#include "faceforge/model.hpp"
#include "faceforge/nn.hpp"

namespace faceforge {

struct ScoreRow {
  std::string video_id;
  int frame_index = 0;
  std::string model_id;
  double logit = 0.0;
};

/// Per-frame raw scores of several models plus each video's label.
class ScoreTable {
 public:
  /// Throws on a duplicate (video, frame, model) key or a label conflict.
  void add(ScoreRow row, Label label);

  const std::vector<ScoreRow>& rows() const { return rows_; }
  Label label_of(const std::string& video_id) const;
  std::set<std::string> model_ids() const;
  std::size_t size() const { return rows_.size(); }

  void write_csv(const std::filesystem::path& path) const;
  static ScoreTable read_csv(const std::filesystem::path& path);

 private:
  std::vector<ScoreRow> rows_;
  std::map<std::string, Label> labels_;
  std::set<std::tuple<std::string, int, std::string>> keys_;
};

struct ScoredModel {
  std::string model_id;
  const Model<float>* model = nullptr;
};

/// Scores `frames_per_video` sampled frames of every video in `split` with
/// every model (no augmentation). Videos without any detectable face are
/// skipped with a warning.
ScoreTable score_frames(std::span<const ScoredModel> models, const FaceLoader& loader, Split split,
                        int frames_per_video = 32);

struct FusedScore {
  std::string video_id;
  int frame_index = 0;
  Label label = Label::Real;
  double probability = 0.0;
};

/// Mean of sigmoid(logit) over `subset`, per frame, clamped to
/// [1e-15, 1 - 1e-15]. Sorted by (video_id, frame_index).
std::vector<FusedScore> ensemble_scores(const ScoreTable& table, const std::vector<std::string>& subset);

/// Mann-Whitney AUC via midrank summation: P(fake > real) + 0.5 P(tie).
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct EnsembleResult {
  std::vector<std::string> subset;  ///< sorted model ids
  double auc = 0.0;
  double logloss = 0.0;

  std::string subset_name() const;  ///< '+'-joined
};

/// All non-empty subsets ordered by size, then lexicographically.
std::vector<std::vector<std::string>> all_subsets(std::vector<std::string> model_ids);

std::vector<EnsembleResult> evaluate_subsets(const ScoreTable& table, const std::vector<std::vector<std::string>>& subsets);

void write_results_csv(const std::filesystem::path& path, const std::vector<EnsembleResult>& results);

struct PairwiseRow {
  double p_a = 0.0;
  double p_b = 0.0;
  Label label = Label::Real;
};

std::vector<PairwiseRow> export_pairwise_scores(const ScoreTable& table, const std::string& model_a,
                                                const std::string& model_b);
void write_pairwise_csv(const std::filesystem::path& path, const std::string& model_a, const std::string& model_b,
                        const std::vector<PairwiseRow>& rows);

/// Principal-component projection of [n x dim] row-major features to [n x 2].
/// Each axis is sign-fixed so its largest-magnitude loading is positive.
std::vector<double> project_features(std::span<const double> features, int dim);

/// Mean silhouette coefficient (Euclidean) of labelled points.
double silhouette_score(std::span<const double> points, int dim, std::span<const int> labels);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace faceforge
