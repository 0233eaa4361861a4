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

#include <gtest/gtest.h>

#include <fstream>

#include "faceforge/error.hpp"
#include "faceforge/run_config.hpp"
#include "temp_dir.hpp"

namespace faceforge {
namespace {

TEST(RunConfig, MinimalConfigUsesDefaults) {
  const auto c = RunConfig::from_json(R"({"seed": 7})");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.detector, "oracle");
  EXPECT_EQ(c.attention_stage, 2);
  EXPECT_FALSE(c.backbone.attention_stage.has_value());
  EXPECT_EQ(c.fpv_list, (std::vector<int>{4, 8, 15, 32}));
  EXPECT_TRUE(c.evaluation.subsets.empty());
}

TEST(RunConfig, SeedIsMandatoryAndUnknownKeysFail) {
  EXPECT_THROW(RunConfig::from_json("{}"), Error);
  EXPECT_THROW(RunConfig::from_json(R"({"seed": 1, "sede": 2})"), Error);
  EXPECT_THROW(RunConfig::from_json(R"({"seed": 1, "train": {"lr": 1}})"), Error);
  EXPECT_THROW(RunConfig::from_json(R"({"seed": 1, "backbone": {"attention_stage": 2}})"), Error);
  EXPECT_THROW(RunConfig::from_json(R"({"seed": 1, "detector": "haar"})"), Error);
  EXPECT_THROW(RunConfig::from_json(R"({"seed": 1, "attn": {"colormap": "jet"}})"), Error);
  EXPECT_THROW(RunConfig::from_json("not json"), Error);
}

TEST(RunConfig, SiameseAndFinetuneInheritFromTrain) {
  const auto c = RunConfig::from_json(
      R"({"seed": 1, "train": {"max_iterations": 50, "initial_lr": 0.001}, "finetune": {"max_iterations": 5}})");
  EXPECT_EQ(c.train.max_iterations, 50);
  EXPECT_EQ(c.siamese.max_iterations, 50);
  EXPECT_DOUBLE_EQ(c.siamese.initial_lr, 0.001);
  EXPECT_EQ(c.finetune.max_iterations, 5);
  EXPECT_DOUBLE_EQ(c.finetune.initial_lr, 0.001);
}

TEST(RunConfig, SeedsDeriveFromTheGlobalSeed) {
  auto a = RunConfig::from_json(R"({"seed": 1})");
  const auto b = RunConfig::from_json(R"({"seed": 1})");
  const auto c = RunConfig::from_json(R"({"seed": 2})");
  EXPECT_EQ(a.train.seed, b.train.seed);
  EXPECT_EQ(a.synthetic.seed, b.synthetic.seed);
  EXPECT_NE(a.train.seed, c.train.seed);
  EXPECT_NE(a.train.seed, a.siamese.seed);
  EXPECT_NE(a.stream_seed("model"), a.stream_seed("corpus"));
  a.apply_seed(2);
  EXPECT_EQ(a.train.seed, c.train.seed);
  EXPECT_EQ(a.synthetic.seed, c.synthetic.seed);
}

TEST(RunConfig, BackboneForTogglesAttention) {
  const auto c = RunConfig::from_json(R"({"seed": 1, "attention_stage": 1})");
  EXPECT_FALSE(c.backbone_for(Variant::B).attention_stage.has_value());
  EXPECT_FALSE(c.backbone_for(Variant::BST).attention_stage.has_value());
  EXPECT_EQ(c.backbone_for(Variant::BAtt).attention_stage, 1);
  EXPECT_EQ(c.backbone_for(Variant::BAttST).attention_stage, 1);
  EXPECT_THROW(RunConfig::from_json(R"({"seed": 1, "attention_stage": 9})"), Error);
}

TEST(RunConfig, SubsetsAndAugmentForms) {
  const auto c = RunConfig::from_json(
      R"({"seed": 1, "augment": "identity", "evaluation": {"subsets": [["B"], ["B", "BAtt"]]}})");
  EXPECT_EQ(c.augment.p_flip, 0.0);
  EXPECT_EQ(c.augment.p_jpeg, 0.0);
  ASSERT_EQ(c.evaluation.subsets.size(), 2u);
  EXPECT_EQ(c.evaluation.subsets[1], (std::vector<std::string>{"B", "BAtt"}));
  EXPECT_TRUE(RunConfig::from_json(R"({"seed": 1, "evaluation": {"subsets": "all"}})").evaluation.subsets.empty());
  EXPECT_THROW(RunConfig::from_json(R"({"seed": 1, "augment": "none"})"), Error);
}

TEST(RunConfig, JsonRoundTrip) {
  const auto c = RunConfig::from_json(R"({
    "seed": 99, "data_dir": "d", "out_dir": "o", "detector": "full_frame",
    "synthetic": {"n_real_videos": 12, "artifact_strength": 0.25, "artifact_regions": ["eyes"], "n_train": 8,
                  "n_val": 2, "n_test": 2},
    "backbone": {"input_side": 32, "feature_dim": 16},
    "train": {"max_iterations": 10, "val_every": 5},
    "siamese": {"margin": 2.0},
    "augment": {"p_flip": 1.0, "jpeg_quality": [60, 90]},
    "evaluation": {"frames_per_video": 4, "subsets": [["B"]]},
    "attn": {"n_faces": 3, "blend_alpha": 0.4},
    "project": {"n_samples": 50},
    "fpv_list": [2, 4]
  })");
  const auto back = RunConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.synthetic.artifact_regions, std::set<FacialRegion>{FacialRegion::Eyes});
  EXPECT_EQ(back.backbone.input_side, 32);
  EXPECT_DOUBLE_EQ(back.siamese.margin, 2.0);
  EXPECT_DOUBLE_EQ(back.augment.jpeg_quality.lo, 60.0);
  EXPECT_EQ(back.attn.n_faces, 3);
  EXPECT_EQ(back.project.n_samples, 50);
  EXPECT_EQ(back.fpv_list, (std::vector<int>{2, 4}));
}

TEST(RunConfig, LoadFromFileAndDetectorSelection) {
  testing::TempDir dir;
  {
    std::ofstream out(dir / "run.json");
    out << R"({"seed": 3, "detector": "full_frame"})";
  }
  const auto c = RunConfig::load(dir / "run.json");
  EXPECT_EQ(c.seed, 3u);
  EXPECT_NE(make_detector(c), nullptr);
  EXPECT_THROW(RunConfig::load(dir / "missing.json"), Error);

  auto oracle = c;
  oracle.detector = "oracle";
  oracle.data_dir = dir / "nowhere";
  EXPECT_THROW(make_detector(oracle), Error);
}

}  // namespace
}  // namespace faceforge
