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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faceforge/corpus.hpp"
#include "faceforge/nn.hpp"

namespace faceforge {

/// Toy analogues of EfficientNetB4 / B4Att / B4ST / B4AttST.
enum class Variant { B, BAtt, BST, BAttST };
enum class TrainingMode { EndToEnd, Siamese };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);
std::string_view to_string(TrainingMode m);
TrainingMode parse_training_mode(std::string_view text);
bool has_attention(Variant v);
bool is_siamese(Variant v);

struct StageConfig {
  int n_blocks = 1;
  int out_channels = 16;
  int stride = 1;
  double expansion_ratio = 4.0;
  bool operator==(const StageConfig&) const = default;
};

/// Scalable MBConv backbone description.
struct BackboneConfig {
  int input_side = 64;
  int stem_channels = 16;
  int stem_stride = 1;
  std::vector<StageConfig> stages{{2, 16, 2, 1.0}, {2, 24, 2, 4.0}, {2, 56, 2, 4.0}, {2, 112, 2, 4.0}};
  std::optional<int> attention_stage;  ///< 0-based stage after which the attention block runs
  int feature_dim = 64;
  int n_classes = 1;

  void validate() const;
  int stem_output_side() const { return input_side / stem_stride; }
  /// Spatial side of stage `stage`'s output.
  int stage_output_side(int stage) const;
  int stage_input_channels(int stage) const;

  std::string to_json() const;
  static BackboneConfig from_json(std::string_view text);
  /// FNV-1a of the canonical JSON form.
  std::uint64_t hash() const;

  /// The default toy stage layout with attention after the third stage.
  static BackboneConfig toy(int input_side = 64, int feature_dim = 64, bool attention = true);
  /// EfficientNetB4-like shapes: 224 input, 28x28x56 after the third stage,
  /// 1792 features.
  static BackboneConfig paper_scale(bool attention = true);

  bool operator==(const BackboneConfig&) const = default;
};

/// MBConv backbone + optional attention gate + head + linear classifier.
///
/// Forward/backward are explicit: `forward` records what `backward` needs in a
/// Tape. Parameter gradients accumulate until `zero_grad`.
template <typename T>
class Model {
 public:
  struct BlockCache {
    Tensor<T> in, expand_pre, expand_act, dw_pre, dw_act;
  };
  struct Tape {
    Tensor<T> input, stem_pre;
    std::vector<BlockCache> blocks;
    Tensor<T> attention_in, attention_pre, attention_map;
    Tensor<T> head_in, head_pre, head_act;
  };

  Model(BackboneConfig config, std::uint64_t seed);

  const BackboneConfig& config() const { return config_; }
  bool has_attention() const { return config_.attention_stage.has_value(); }

  std::vector<Parameter<T>>& parameters() { return params_; }
  const std::vector<Parameter<T>>& parameters() const { return params_; }
  Parameter<T>& parameter(std::string_view name);
  const Parameter<T>& parameter(std::string_view name) const;
  void zero_grad();

  /// Images are raw [0, 1] NCHW. Returns pooled features [n, D, 1, 1].
  Tensor<T> forward(const Tensor<T>& images, Tape* tape = nullptr) const;
  /// Accumulates parameter gradients given dL/dfeatures.
  void backward(const Tape& tape, const Tensor<T>& dfeatures);

  /// Raw score per row of `features`, higher meaning more likely FAKE.
  std::vector<T> classify(const Tensor<T>& features) const;
  /// Accumulates classifier gradients; writes dL/dfeatures when requested.
  void backward_classifier(const Tensor<T>& features, std::span<const T> dlogits, Tensor<T>* dfeatures);

  /// Sigmoid attention map [n, 1, h, w]. Throws on a model without attention.
  Tensor<T> attention_map(const Tensor<T>& images) const;

  Tensor<T> forward_features(std::span<const FaceCrop> faces) const;
  std::vector<T> forward_logit(std::span<const FaceCrop> faces) const;
  Tensor<T> attention_map(std::span<const FaceCrop> faces) const;

  /// Same architecture and values in another precision.
  template <typename U>
  Model<U> cast() const;

 private:
  struct BlockLayout {
    int stage, index, cin, cexp, cout, stride;
    bool expand, residual;
    int expand_w = -1, expand_b = -1, dw_w, dw_b, proj_w, proj_b;
  };

  int add_parameter(const std::string& name, std::vector<int> shape, double stddev, std::uint64_t seed);
  Tensor<T> run_stages(const Tensor<T>& stem_out, Tape* tape, bool stop_at_attention, Tensor<T>* map_out) const;

  BackboneConfig config_;
  std::vector<Parameter<T>> params_;
  std::vector<BlockLayout> blocks_;
  int stem_w_ = -1, stem_b_ = -1, attn_w_ = -1, attn_b_ = -1;
  int head_w_ = -1, head_b_ = -1, cls_w_ = -1, cls_b_ = -1;

  template <typename U>
  friend class Model;
};

/// Faces to raw NCHW input; throws if any face side differs from `side`.
template <typename T>
Tensor<T> to_input(std::span<const FaceCrop> faces, int side);

/// A trained model with its variant tag.
struct ModelVariant {
  Variant name = Variant::B;
  TrainingMode training_mode = TrainingMode::EndToEnd;
  Model<float> model;
};

/// Single-file checkpoint: magic, format version, config JSON with its hash,
/// then named float64 tensors.
void save_checkpoint(const std::filesystem::path& path, const ModelVariant& model);
ModelVariant load_checkpoint(const std::filesystem::path& path);

inline constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace faceforge
