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

#include "faceforge/augment.hpp"
#include "faceforge/error.hpp"
#include "faceforge/image.hpp"

namespace faceforge {
namespace {

FaceCrop random_face(std::uint64_t seed, int side = 32) {
  Rng rng(seed);
  FaceCrop f;
  f.pixels = Image(side, side, 3);
  // Smooth gradient plus mild texture, roughly what a face crop looks like.
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      for (int c = 0; c < 3; ++c)
        f.pixels.at(x, y, c) = static_cast<float>(0.2 + 0.5 * (x + y) / (2.0 * side) + 0.1 * c + 0.05 * rng.uniform());
  f.pixels = quantize8(f.pixels);
  f.video_id = "v";
  f.source_box = {0, 0, side, side};
  return f;
}

TEST(Augment, IdentityIsByteExact) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto face = random_face(s);
    Rng rng(s);
    EXPECT_EQ(augment(face, AugmentConfig::identity(), rng).pixels, face.pixels);
  }
}

TEST(Augment, DoubleFlipRestoresInput) {
  const auto face = random_face(3);
  EXPECT_EQ(flip_horizontal(flip_horizontal(face.pixels)), face.pixels);
  EXPECT_NE(flip_horizontal(face.pixels), face.pixels);
}

TEST(Augment, OutputsStayValidUnderAggressiveSettings) {
  AugmentConfig c;
  c.p_downscale = c.p_flip = c.p_brightness_contrast = c.p_hue_saturation = c.p_noise = c.p_jpeg = 1.0;
  c.brightness = {-1.0, 1.0};
  c.contrast = {-1.0, 1.0};
  c.hue = {-0.5, 0.5};
  c.saturation = {-1.0, 1.0};
  c.noise_sigma = {0.0, 0.5};
  c.jpeg_quality = {1, 100};
  c.validate();
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    const auto face = random_face(static_cast<std::uint64_t>(i));
    const auto out = augment(face, c, rng);
    ASSERT_NO_THROW(validate_face(out));
    EXPECT_EQ(out.side(), face.side());
    EXPECT_EQ(out.label, face.label);
  }
}

TEST(Augment, DeterministicForASeed) {
  const AugmentConfig c;
  const auto face = random_face(1);
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng a(s), b(s);
    EXPECT_EQ(augment(face, c, a).pixels, augment(face, c, b).pixels);
  }
}

TEST(Augment, StreamPositionIndependentOfProbabilities) {
  AugmentConfig on;
  AugmentConfig off = AugmentConfig::identity();
  Rng a(5), b(5);
  augment(random_face(0), on, a);
  augment(random_face(0), off, b);
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Augment, HighQualityJpegIsNearlyLossless) {
  const auto face = random_face(8, 64);
  EXPECT_LT(mean_abs_diff(jpeg_roundtrip(face.pixels, 95), face.pixels), 0.02);
  EXPECT_GT(mean_abs_diff(jpeg_roundtrip(face.pixels, 5), face.pixels),
            mean_abs_diff(jpeg_roundtrip(face.pixels, 95), face.pixels));
}

TEST(Augment, IndividualTransforms) {
  const auto face = random_face(2);
  EXPECT_EQ(adjust_brightness_contrast(face.pixels, 0.0, 0.0), face.pixels);
  const auto bright = adjust_brightness_contrast(face.pixels, 0.1, 0.0);
  for (std::size_t i = 0; i < bright.data.size(); ++i)
    EXPECT_NEAR(bright.data[i], std::min(1.0f, face.pixels.data[i] + 0.1f), 1e-6);

  const auto hs = shift_hue_saturation(face.pixels, 0.0, 0.0);
  for (std::size_t i = 0; i < hs.data.size(); ++i) EXPECT_NEAR(hs.data[i], face.pixels.data[i], 1e-5);
  // A full turn of the hue circle is the identity.
  const auto turned = shift_hue_saturation(shift_hue_saturation(face.pixels, 0.5, 0.0), 0.5, 0.0);
  for (std::size_t i = 0; i < turned.data.size(); ++i) EXPECT_NEAR(turned.data[i], face.pixels.data[i], 1e-4);

  Rng rng(1);
  EXPECT_EQ(add_gaussian_noise(face.pixels, 0.0, rng), face.pixels);
  EXPECT_LT(mean_abs_diff(downscale_upscale(face.pixels, 1.0), face.pixels), 1e-6);
}

TEST(Augment, ValidationRejectsBadRanges) {
  AugmentConfig c;
  c.p_flip = 1.5;
  EXPECT_THROW(c.validate(), Error);
  c = AugmentConfig{};
  c.downscale = {0.0, 0.5};
  EXPECT_THROW(c.validate(), Error);
  c = AugmentConfig{};
  c.jpeg_quality = {90, 50};
  EXPECT_THROW(c.validate(), Error);
}

}  // namespace
}  // namespace faceforge
