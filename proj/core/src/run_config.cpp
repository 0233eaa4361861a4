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

#include "faceforge/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "faceforge/error.hpp"
#include <nlohmann/json.hpp>

namespace faceforge {

using json = nlohmann::json;

namespace {

void check_keys(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
  FACEFORGE_CHECK(j.is_object(), ErrorKind::Format, std::string(section) + " must be a JSON object");
  const std::set<std::string_view> ok(allowed);
  for (const auto& [key, value] : j.items()) {
    FACEFORGE_CHECK(ok.count(key), ErrorKind::Format,
                    "unknown key '" + key + "' in " + std::string(section) + " section");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_range(const json& j, const char* key, Range& out) {
  if (!j.contains(key)) return;
  const auto& r = j.at(key);
  FACEFORGE_CHECK(r.is_array() && r.size() == 2, ErrorKind::Format, std::string(key) + " must be [lo, hi]");
  out = Range{r[0].get<double>(), r[1].get<double>()};
}

void read_train(const json& j, const char* section, TrainConfig& c) {
  check_keys(j, section,
             {"max_iterations", "val_every", "val_samples", "batch_per_class", "triplets_per_batch", "beta1", "beta2",
              "adam_epsilon", "initial_lr", "plateau_patience", "lr_factor", "min_lr", "margin", "frames_per_video",
              "val_frames_per_video"});
  read(j, "max_iterations", c.max_iterations);
  read(j, "val_every", c.val_every);
  read(j, "val_samples", c.val_samples);
  read(j, "batch_per_class", c.batch_per_class);
  read(j, "triplets_per_batch", c.triplets_per_batch);
  read(j, "beta1", c.beta1);
  read(j, "beta2", c.beta2);
  read(j, "adam_epsilon", c.adam_epsilon);
  read(j, "initial_lr", c.initial_lr);
  read(j, "plateau_patience", c.plateau_patience);
  read(j, "lr_factor", c.lr_factor);
  read(j, "min_lr", c.min_lr);
  read(j, "margin", c.margin);
  read(j, "frames_per_video", c.frames_per_video);
  read(j, "val_frames_per_video", c.val_frames_per_video);
}

json train_json(const TrainConfig& c) {
  return json{{"max_iterations", c.max_iterations},
              {"val_every", c.val_every},
              {"val_samples", c.val_samples},
              {"batch_per_class", c.batch_per_class},
              {"triplets_per_batch", c.triplets_per_batch},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"adam_epsilon", c.adam_epsilon},
              {"initial_lr", c.initial_lr},
              {"plateau_patience", c.plateau_patience},
              {"lr_factor", c.lr_factor},
              {"min_lr", c.min_lr},
              {"margin", c.margin},
              {"frames_per_video", c.frames_per_video},
              {"val_frames_per_video", c.val_frames_per_video}};
}

void read_synthetic(const json& j, SyntheticConfig& c) {
  check_keys(j, "synthetic",
             {"n_real_videos", "n_fake_per_real", "frames_per_video", "image_side", "artifact_strength",
              "artifact_regions", "n_train", "n_val", "n_test"});
  read(j, "n_real_videos", c.n_real_videos);
  read(j, "n_fake_per_real", c.n_fake_per_real);
  read(j, "frames_per_video", c.frames_per_video);
  read(j, "image_side", c.image_side);
  read(j, "artifact_strength", c.artifact_strength);
  if (j.contains("artifact_regions")) {
    c.artifact_regions.clear();
    for (const auto& r : j.at("artifact_regions")) c.artifact_regions.insert(parse_region(r.get<std::string>()));
  }
  if (j.contains("n_train")) c.n_train = j.at("n_train").get<std::size_t>();
  if (j.contains("n_val")) c.n_val = j.at("n_val").get<std::size_t>();
  if (j.contains("n_test")) c.n_test = j.at("n_test").get<std::size_t>();
}

void read_augment(const json& j, AugmentConfig& c) {
  if (j.is_string()) {
    FACEFORGE_CHECK(j.get<std::string>() == "identity", ErrorKind::Format,
                    "augment must be an object or \"identity\"");
    c = AugmentConfig::identity();
    return;
  }
  check_keys(j, "augment",
             {"p_downscale", "downscale", "p_flip", "p_brightness_contrast", "brightness", "contrast",
              "p_hue_saturation", "hue", "saturation", "p_noise", "noise_sigma", "p_jpeg", "jpeg_quality"});
  read(j, "p_downscale", c.p_downscale);
  read_range(j, "downscale", c.downscale);
  read(j, "p_flip", c.p_flip);
  read(j, "p_brightness_contrast", c.p_brightness_contrast);
  read_range(j, "brightness", c.brightness);
  read_range(j, "contrast", c.contrast);
  read(j, "p_hue_saturation", c.p_hue_saturation);
  read_range(j, "hue", c.hue);
  read_range(j, "saturation", c.saturation);
  read(j, "p_noise", c.p_noise);
  read_range(j, "noise_sigma", c.noise_sigma);
  read(j, "p_jpeg", c.p_jpeg);
  read_range(j, "jpeg_quality", c.jpeg_quality);
}

json augment_json(const AugmentConfig& c) {
  auto r = [](const Range& x) { return json::array({x.lo, x.hi}); };
  return json{{"p_downscale", c.p_downscale},
              {"downscale", r(c.downscale)},
              {"p_flip", c.p_flip},
              {"p_brightness_contrast", c.p_brightness_contrast},
              {"brightness", r(c.brightness)},
              {"contrast", r(c.contrast)},
              {"p_hue_saturation", c.p_hue_saturation},
              {"hue", r(c.hue)},
              {"saturation", r(c.saturation)},
              {"p_noise", c.p_noise},
              {"noise_sigma", r(c.noise_sigma)},
              {"p_jpeg", c.p_jpeg},
              {"jpeg_quality", r(c.jpeg_quality)}};
}

}  // namespace

std::uint64_t RunConfig::stream_seed(std::string_view name) const {
  return splitmix64(seed ^ hash_string(name));
}

void RunConfig::apply_seed(std::uint64_t new_seed) {
  seed = new_seed;
  synthetic.seed = stream_seed("corpus");
  train.seed = stream_seed("train");
  siamese.seed = stream_seed("train.siamese");
  finetune.seed = stream_seed("train.finetune");
}

BackboneConfig RunConfig::backbone_for(Variant variant) const {
  BackboneConfig c = backbone;
  if (has_attention(variant)) {
    c.attention_stage = attention_stage;
  } else {
    c.attention_stage.reset();
  }
  c.validate();
  return c;
}

RunConfig RunConfig::from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    check_keys(j, "top-level",
               {"seed", "data_dir", "out_dir", "detector", "synthetic", "backbone", "attention_stage", "train",
                "siamese", "finetune", "augment", "evaluation", "attn", "project", "fpv_list"});
    FACEFORGE_CHECK(j.contains("seed"), ErrorKind::InvalidArgument, "run config must set 'seed'");
    RunConfig c;
    if (j.contains("data_dir")) c.data_dir = j.at("data_dir").get<std::string>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    read(j, "detector", c.detector);
    FACEFORGE_CHECK(c.detector == "oracle" || c.detector == "full_frame", ErrorKind::InvalidArgument,
                    "detector must be 'oracle' or 'full_frame', got '" + c.detector + "'");
    if (j.contains("synthetic")) read_synthetic(j.at("synthetic"), c.synthetic);
    if (j.contains("backbone")) {
      json b = j.at("backbone");
      FACEFORGE_CHECK(!b.contains("attention_stage"), ErrorKind::Format,
                      "set attention_stage at the top level; the variant decides whether it is used");
      c.backbone = BackboneConfig::from_json(b.dump());
    }
    read(j, "attention_stage", c.attention_stage);
    if (j.contains("train")) read_train(j.at("train"), "train", c.train);
    c.siamese = c.train;
    c.finetune = c.train;
    if (j.contains("siamese")) read_train(j.at("siamese"), "siamese", c.siamese);
    if (j.contains("finetune")) read_train(j.at("finetune"), "finetune", c.finetune);
    if (j.contains("augment")) read_augment(j.at("augment"), c.augment);
    if (j.contains("evaluation")) {
      const json& e = j.at("evaluation");
      check_keys(e, "evaluation", {"frames_per_video", "subsets"});
      read(e, "frames_per_video", c.evaluation.frames_per_video);
      if (e.contains("subsets") && !(e.at("subsets").is_string() && e.at("subsets") == "all")) {
        c.evaluation.subsets = e.at("subsets").get<std::vector<std::vector<std::string>>>();
      }
    }
    if (j.contains("attn")) {
      const json& a = j.at("attn");
      check_keys(a, "attn", {"n_faces", "blend_alpha", "colormap"});
      read(a, "n_faces", c.attn.n_faces);
      read(a, "blend_alpha", c.attn.blend_alpha);
      read(a, "colormap", c.attn.colormap);
      FACEFORGE_CHECK(c.attn.colormap == "viridis", ErrorKind::InvalidArgument,
                      "unsupported colormap '" + c.attn.colormap + "' (available: viridis)");
    }
    if (j.contains("project")) {
      const json& p = j.at("project");
      check_keys(p, "project", {"n_samples"});
      read(p, "n_samples", c.project.n_samples);
    }
    read(j, "fpv_list", c.fpv_list);
    c.apply_seed(j.at("seed").get<std::uint64_t>());
    c.synthetic.validate();
    c.train.validate();
    c.siamese.validate();
    c.finetune.validate();
    c.augment.validate();
    c.backbone_for(Variant::BAtt);
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, std::string("invalid run config: ") + e.what());
  }
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  FACEFORGE_CHECK(in.good(), ErrorKind::Io, "cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string RunConfig::to_json() const {
  json synth{{"n_real_videos", synthetic.n_real_videos},
             {"n_fake_per_real", synthetic.n_fake_per_real},
             {"frames_per_video", synthetic.frames_per_video},
             {"image_side", synthetic.image_side},
             {"artifact_strength", synthetic.artifact_strength}};
  json regions = json::array();
  for (auto r : synthetic.artifact_regions) regions.push_back(std::string(to_string(r)));
  synth["artifact_regions"] = regions;
  if (synthetic.n_train) synth["n_train"] = *synthetic.n_train;
  if (synthetic.n_val) synth["n_val"] = *synthetic.n_val;
  if (synthetic.n_test) synth["n_test"] = *synthetic.n_test;
  json backbone_json = json::parse(backbone.to_json());
  backbone_json.erase("attention_stage");
  json subsets = evaluation.subsets.empty() ? json("all") : json(evaluation.subsets);
  json j{{"seed", seed},
         {"data_dir", data_dir.string()},
         {"out_dir", out_dir.string()},
         {"detector", detector},
         {"synthetic", synth},
         {"backbone", backbone_json},
         {"attention_stage", attention_stage},
         {"train", train_json(train)},
         {"siamese", train_json(siamese)},
         {"finetune", train_json(finetune)},
         {"augment", augment_json(augment)},
         {"evaluation", {{"frames_per_video", evaluation.frames_per_video}, {"subsets", subsets}}},
         {"attn", {{"n_faces", attn.n_faces}, {"blend_alpha", attn.blend_alpha}, {"colormap", attn.colormap}}},
         {"project", {{"n_samples", project.n_samples}}},
         {"fpv_list", fpv_list}};
  return j.dump(2);
}

std::shared_ptr<const FaceDetector> make_detector(const RunConfig& config) {
  if (config.detector == "full_frame") return std::make_shared<FullFrameDetector>();
  FACEFORGE_CHECK(std::filesystem::exists(config.faces_path()), ErrorKind::Io,
                  "face sidecar '" + config.faces_path().string() + "' not found; run gen-data first");
  return std::make_shared<SyntheticOracleDetector>(config.faces_path());
}

}  // namespace faceforge
