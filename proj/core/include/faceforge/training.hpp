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
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "faceforge/augment.hpp"
#include "faceforge/corpus.hpp"
#include "faceforge/model.hpp"

namespace faceforge {

struct TrainConfig {
  int max_iterations = 20000;
  int val_every = 500;
  int val_samples = 6000;
  int batch_per_class = 16;     ///< end-to-end batch is 2k faces
  int triplets_per_batch = 12;  ///< half REAL-anchored, half FAKE-anchored
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double initial_lr = 1e-5;
  int plateau_patience = 10;
  double lr_factor = 0.1;
  double min_lr = 1e-10;
  double margin = 1.0;
  int frames_per_video = 32;      ///< training frames per video
  int val_frames_per_video = 32;  ///< validation frames per video
  std::uint64_t seed = 0;

  void validate() const;
};

struct HistoryEntry {
  int iteration = 0;
  double train_loss = 0.0;
  std::optional<double> val_loss;
  double lr = 0.0;
  bool operator==(const HistoryEntry&) const = default;
};

/// Optimizer schedule state for the reduce-on-plateau policy.
struct TrainState {
  int iteration = 0;
  double current_lr = 0.0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  int validations_since_improvement = 0;
  bool stopped = false;
  std::vector<HistoryEntry> history;

  static TrainState initial(const TrainConfig& config);
};

/// Pure plateau step: strict improvement resets the counter; `patience`
/// stale validations multiply the rate by `lr_factor`; stops below `min_lr`.
TrainState lr_schedule_step(TrainState state, double val_loss, const TrainConfig& config);

/// Adam over a subset of a model's parameters.
class Adam {
 public:
  Adam(std::vector<Parameter<float>*> params, double beta1, double beta2, double epsilon);
  void step(double lr);
  long steps() const { return t_; }

 private:
  std::vector<Parameter<float>*> params_;
  std::vector<std::vector<double>> m_, v_;
  double beta1_, beta2_, eps_;
  long t_ = 0;
};

struct TrainResult {
  Model<float> best;  ///< weights at the minimum validation loss
  TrainState state;
};

/// Balanced batches -> augment -> logits -> LogLoss -> Adam.
TrainResult train_end_to_end(Model<float> model, const FaceLoader& loader, const TrainConfig& config,
                             const AugmentConfig& augment);

/// Triplet batches -> features -> triplet margin loss -> Adam. Validation is
/// the triplet loss on a fixed set of validation triplets.
TrainResult train_siamese(Model<float> model, const FaceLoader& loader, const TrainConfig& config,
                          const AugmentConfig& augment);

/// End-to-end procedure with every parameter except the classifier frozen.
TrainResult finetune_classifier(Model<float> encoder, const FaceLoader& loader, const TrainConfig& config,
                                const AugmentConfig& augment);

void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryEntry>& history);
std::vector<HistoryEntry> read_history_csv(const std::filesystem::path& path);

}  // namespace faceforge
