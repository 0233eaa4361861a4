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
#include <sstream>

#include "faceforge/corpus.hpp"
#include "faceforge/error.hpp"
#include "faceforge/synthetic.hpp"
#include "temp_dir.hpp"

namespace faceforge {
namespace {

SyntheticConfig small_config() {
  SyntheticConfig c;
  c.n_real_videos = 10;
  c.n_fake_per_real = 1;
  c.frames_per_video = 8;
  c.image_side = 48;
  c.seed = 17;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Synthetic, RealFramesAreValidAndDeterministic) {
  const auto c = small_config();
  const auto a = render_real_frame(c, 3, 2);
  const auto b = render_real_frame(c, 3, 2);
  EXPECT_EQ(a.image, b.image);
  EXPECT_NE(a.image, render_real_frame(c, 3, 3).image);
  EXPECT_NE(a.image, render_real_frame(c, 4, 2).image);
  ASSERT_EQ(a.image.width, 48);
  for (float v : a.image.data) {
    ASSERT_GE(v, 0.0f);
    ASSERT_LE(v, 1.0f);
  }
  const Detection box = a.geometry.box();
  EXPECT_GT(box.x1 - box.x0, 10.0);
}

TEST(Synthetic, ZeroStrengthFakeEqualsSource) {
  auto c = small_config();
  c.artifact_strength = 0.0;
  for (int v = 0; v < 4; ++v) {
    const auto real = render_real_frame(c, v, 1);
    EXPECT_EQ(make_fake_frame(c, real, v, 0).image, real.image);
  }
}

TEST(Synthetic, FakeDifferencesAreConfinedToTheMask) {
  for (double strength : {0.1, 0.5, 1.0}) {
    auto c = small_config();
    c.artifact_strength = strength;
    for (int v = 0; v < 5; ++v) {
      const auto real = render_real_frame(c, v, 0);
      const auto fake = make_fake_frame(c, real, v, 0);
      int changed = 0;
      for (int y = 0; y < c.image_side; ++y)
        for (int x = 0; x < c.image_side; ++x)
          for (int k = 0; k < 3; ++k) {
            if (fake.image.at(x, y, k) != real.image.at(x, y, k)) {
              ++changed;
              ASSERT_EQ(fake.artifact_mask.at(x, y, 0), 1.0f) << "pixel " << x << "," << y;
            }
          }
      EXPECT_GT(changed, 0);
    }
  }
}

TEST(Synthetic, RegionSubsetShrinksMask) {
  auto all = small_config();
  auto eyes = small_config();
  eyes.artifact_regions = {FacialRegion::Eyes};
  const auto real = render_real_frame(all, 2, 0);
  auto area = [](const Image& m) {
    double s = 0;
    for (float v : m.data) s += v;
    return s;
  };
  const double a_all = area(make_fake_frame(all, real, 2, 0).artifact_mask);
  const double a_eyes = area(make_fake_frame(eyes, real, 2, 0).artifact_mask);
  EXPECT_GT(a_eyes, 0.0);
  EXPECT_LT(a_eyes, a_all);
}

TEST(Synthetic, ConfigValidation) {
  auto c = small_config();
  c.artifact_regions.clear();
  EXPECT_THROW(c.validate(), Error);
  c = small_config();
  c.artifact_strength = 1.5;
  EXPECT_THROW(c.validate(), Error);
  c = small_config();
  c.n_real_videos = 0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_EQ(parse_region("Mouth"), FacialRegion::Mouth);
  EXPECT_THROW(parse_region("ears"), Error);
}

TEST(Synthetic, CorpusCountsFilesAndSplits) {
  testing::TempDir dir;
  const auto m = generate_synthetic_corpus(small_config(), dir.path());
  EXPECT_EQ(m.records.size(), 20u);
  std::size_t frames = 0;
  for (const auto& r : m.records) {
    frames += r.frame_paths.size();
    for (const auto& f : r.frame_paths) EXPECT_TRUE(std::filesystem::exists(m.resolve(f)));
  }
  EXPECT_EQ(frames, 160u);
  m.validate();
  const auto back = read_manifest(dir / "manifest.jsonl");
  EXPECT_EQ(back.records.size(), 20u);
  back.validate();
}

TEST(Synthetic, CorpusIsReproducible) {
  testing::TempDir a, b;
  generate_synthetic_corpus(small_config(), a.path());
  generate_synthetic_corpus(small_config(), b.path());
  EXPECT_EQ(slurp(a / "manifest.jsonl"), slurp(b / "manifest.jsonl"));
  EXPECT_EQ(slurp(a / "frames/fake_0003_0/005.png"), slurp(b / "frames/fake_0003_0/005.png"));
  EXPECT_EQ(slurp(a / "frames/real_0007/000.png"), slurp(b / "frames/real_0007/000.png"));
}

TEST(Synthetic, OracleDetectorAndMasksFindKnownFrames) {
  testing::TempDir dir;
  const auto m = generate_synthetic_corpus(small_config(), dir.path());
  SyntheticOracleDetector detector(dir / "faces.jsonl");
  ArtifactMasks masks(dir / "faces.jsonl");
  const auto& fake = m.find("fake_0001_0");
  const auto& real = m.find("real_0001");
  const auto fake_path = m.resolve(fake.frame_paths[2]);
  ASSERT_EQ(detector.detect(Image(), fake_path).size(), 1u);
  const auto mask = masks.mask_for(fake_path);
  ASSERT_TRUE(mask);
  EXPECT_EQ(mask->channels, 1);
  EXPECT_FALSE(masks.mask_for(m.resolve(real.frame_paths[2])).has_value());

  // The crop is centred on the generator's stored face box.
  const auto face = load_face(m, real, 2, 32, detector);
  ASSERT_TRUE(face);
  const Detection box = detector.detect(Image(), m.resolve(real.frame_paths[2]))[0];
  EXPECT_NEAR((face->source_box.x0 + face->source_box.x1) / 2.0, (box.x0 + box.x1) / 2.0, 1.0);
  EXPECT_NEAR((face->source_box.y0 + face->source_box.y1) / 2.0, (box.y0 + box.y1) / 2.0, 1.0);
}

}  // namespace
}  // namespace faceforge
