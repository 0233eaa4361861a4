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

#include <cmath>
#include <memory>

#include "faceforge/error.hpp"
#include "faceforge/synthetic.hpp"
#include "faceforge/training.hpp"
#include "temp_dir.hpp"

namespace faceforge {
namespace {

TrainConfig schedule_config() {
  TrainConfig c;
  c.initial_lr = 1e-5;
  c.plateau_patience = 10;
  c.lr_factor = 0.1;
  c.min_lr = 1e-10;
  return c;
}

TEST(Schedule, TenStaleValidationsDivideTheRateByTen) {
  const auto c = schedule_config();
  auto s = TrainState::initial(c);
  s = lr_schedule_step(s, 1.0, c);
  for (int i = 0; i < 9; ++i) {
    s = lr_schedule_step(s, 1.0, c);
    EXPECT_DOUBLE_EQ(s.current_lr, 1e-5);
  }
  s = lr_schedule_step(s, 1.5, c);
  EXPECT_NEAR(s.current_lr, 1e-6, 1e-20);
  EXPECT_EQ(s.validations_since_improvement, 0);
  EXPECT_FALSE(s.stopped);
}

TEST(Schedule, StrictImprovementResetsTheCounter) {
  const auto c = schedule_config();
  auto s = TrainState::initial(c);
  s = lr_schedule_step(s, 1.0, c);
  for (int i = 0; i < 9; ++i) s = lr_schedule_step(s, 1.0, c);
  EXPECT_EQ(s.validations_since_improvement, 9);
  s = lr_schedule_step(s, 0.999, c);
  EXPECT_EQ(s.validations_since_improvement, 0);
  EXPECT_DOUBLE_EQ(s.best_val_loss, 0.999);
  for (int i = 0; i < 9; ++i) s = lr_schedule_step(s, 2.0, c);
  EXPECT_DOUBLE_EQ(s.current_lr, 1e-5);
}

TEST(Schedule, StopsOnceTheRateFallsBelowTheFloor) {
  const auto c = schedule_config();
  auto s = TrainState::initial(c);
  s = lr_schedule_step(s, 1.0, c);
  int steps = 1;
  while (!s.stopped && steps < 1000) {
    s = lr_schedule_step(s, 1.0, c);
    ++steps;
  }
  ASSERT_TRUE(s.stopped);
  EXPECT_LT(s.current_lr, 1e-10);
  // Five reductions reach the floor itself; the sixth crosses it.
  EXPECT_GE(steps, 51);
  EXPECT_LE(steps, 61);
}

TEST(Schedule, NaNIsAnError) {
  const auto c = schedule_config();
  EXPECT_THROW(lr_schedule_step(TrainState::initial(c), std::nan(""), c), Error);
}

TEST(Adam, FirstStepMovesEachCoordinateByTheRate) {
  Parameter<float> p{"w", {3}, {1.0f, -2.0f, 0.5f}, {0.3f, -7.0f, 0.0f}};
  Adam adam({&p}, 0.9, 0.999, 1e-8);
  adam.step(0.01);
  EXPECT_NEAR(p.value[0], 0.99f, 1e-6);
  EXPECT_NEAR(p.value[1], -1.99f, 1e-6);
  EXPECT_FLOAT_EQ(p.value[2], 0.5f);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Adam, MinimisesAQuadratic) {
  Parameter<float> p{"w", {2}, {3.0f, -4.0f}, {0.0f, 0.0f}};
  Adam adam({&p}, 0.9, 0.999, 1e-8);
  for (int i = 0; i < 3000; ++i) {
    for (int k = 0; k < 2; ++k) p.grad[k] = 2.0f * p.value[k];
    adam.step(0.01);
  }
  EXPECT_NEAR(p.value[0], 0.0f, 1e-2);
  EXPECT_NEAR(p.value[1], 0.0f, 1e-2);
}

TEST(History, CsvRoundTrip) {
  testing::TempDir dir;
  std::vector<HistoryEntry> h{{1, 0.693147180559945, std::nullopt, 1e-5},
                              {2, 0.5 + 1e-16, 0.123456789012345678, 1e-6},
                              {3, 1e-300, std::nullopt, 1e-10}};
  write_history_csv(dir / "h.csv", h);
  EXPECT_EQ(read_history_csv(dir / "h.csv"), h);
  EXPECT_THROW(read_history_csv(dir / "none.csv"), Error);
}

TEST(TrainConfigValidation, RejectsBadValues) {
  TrainConfig c;
  c.triplets_per_batch = 3;
  EXPECT_THROW(c.validate(), Error);
  c = TrainConfig{};
  c.min_lr = 1e-3;
  EXPECT_THROW(c.validate(), Error);
  c = TrainConfig{};
  c.val_every = 0;
  EXPECT_THROW(c.validate(), Error);
}

class TinyTraining : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("faceforge_training");
    SyntheticConfig s;
    s.n_real_videos = 8;
    s.frames_per_video = 4;
    s.image_side = 48;
    s.seed = 3;
    s.n_train = 4;
    s.n_val = 2;
    s.n_test = 2;
    manifest_ = new SplitManifest(generate_synthetic_corpus(s, dir_->path()));
  }
  static void TearDownTestSuite() {
    delete manifest_;
    delete dir_;
  }

  static TrainConfig config() {
    TrainConfig c;
    c.max_iterations = 4;
    c.val_every = 2;
    c.val_samples = 12;
    c.batch_per_class = 2;
    c.triplets_per_batch = 2;
    c.initial_lr = 1e-3;
    c.frames_per_video = 2;
    c.val_frames_per_video = 2;
    c.seed = 42;
    return c;
  }
  static FaceLoader loader() {
    return FaceLoader(*manifest_, 32, std::make_shared<SyntheticOracleDetector>(dir_->path() / "faces.jsonl"));
  }
  static Model<float> model(bool attention) { return Model<float>(BackboneConfig::toy(32, 16, attention), 7); }

  static testing::TempDir* dir_;
  static SplitManifest* manifest_;
};

testing::TempDir* TinyTraining::dir_ = nullptr;
SplitManifest* TinyTraining::manifest_ = nullptr;

TEST_F(TinyTraining, EndToEndIsDeterministicAndRecordsHistory) {
  const auto l1 = loader();
  const auto l2 = loader();
  const auto a = train_end_to_end(model(true), l1, config(), AugmentConfig{});
  const auto b = train_end_to_end(model(true), l2, config(), AugmentConfig{});
  ASSERT_EQ(a.state.history.size(), 4u);
  EXPECT_EQ(a.state.history, b.state.history);
  EXPECT_TRUE(a.state.history[1].val_loss.has_value());
  EXPECT_FALSE(a.state.history[0].val_loss.has_value());
  EXPECT_TRUE(a.state.stopped);
  for (std::size_t k = 0; k < a.best.parameters().size(); ++k)
    EXPECT_EQ(a.best.parameters()[k].value, b.best.parameters()[k].value);
  // The model actually moved away from its initialisation.
  EXPECT_NE(a.best.parameter("head.weight").value, model(true).parameter("head.weight").value);
}

TEST_F(TinyTraining, SiameseProducesFiniteTripletLosses) {
  const auto l = loader();
  const auto r = train_siamese(model(false), l, config(), AugmentConfig::identity());
  ASSERT_EQ(r.state.history.size(), 4u);
  for (const auto& h : r.state.history) {
    EXPECT_TRUE(std::isfinite(h.train_loss));
    EXPECT_GE(h.train_loss, 0.0);
  }
  // The classifier takes no part in the triplet objective.
  EXPECT_EQ(r.best.parameter("classifier.weight").value, model(false).parameter("classifier.weight").value);
}

TEST_F(TinyTraining, FinetuneTouchesOnlyTheClassifier) {
  const auto l = loader();
  const auto encoder = model(true);
  const auto r = finetune_classifier(encoder, l, config(), AugmentConfig{});
  for (const auto& p : encoder.parameters()) {
    const auto& after = r.best.parameter(p.name).value;
    if (p.name.rfind("classifier.", 0) == 0)
      EXPECT_NE(after, p.value) << p.name;
    else
      EXPECT_EQ(after, p.value) << p.name;
  }
}

TEST_F(TinyTraining, ZeroIterationsReturnsTheInitialModel) {
  auto c = config();
  c.max_iterations = 0;
  const auto l = loader();
  const auto r = train_end_to_end(model(false), l, c, AugmentConfig{});
  EXPECT_TRUE(r.state.history.empty());
  EXPECT_EQ(r.best.parameter("head.weight").value, model(false).parameter("head.weight").value);
}

}  // namespace
}  // namespace faceforge
