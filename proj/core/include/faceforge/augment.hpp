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

#include "faceforge/corpus.hpp"
#include "faceforge/rng.hpp"

namespace faceforge {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Training-time augmentation. Transforms run in declaration order, each with
/// its own apply-probability; JPEG always runs last.
struct AugmentConfig {
  double p_downscale = 0.5;
  Range downscale{0.5, 0.9};  ///< scale factor, re-upscaled to the original side
  double p_flip = 0.5;
  double p_brightness_contrast = 0.5;
  Range brightness{-0.2, 0.2};
  Range contrast{-0.2, 0.2};
  double p_hue_saturation = 0.5;
  Range hue{-0.1, 0.1};  ///< fraction of the hue circle
  Range saturation{-0.1, 0.1};
  double p_noise = 0.5;
  Range noise_sigma{0.01, 0.05};
  double p_jpeg = 0.5;
  Range jpeg_quality{50, 99};

  static AugmentConfig identity();
  void validate() const;
};

FaceCrop augment(const FaceCrop& face, const AugmentConfig& config, Rng& rng);

// Individual transforms, exposed for testing.
Image adjust_brightness_contrast(const Image& img, double brightness, double contrast);
Image shift_hue_saturation(const Image& img, double hue_shift, double saturation_shift);
Image add_gaussian_noise(const Image& img, double sigma, Rng& rng);
Image downscale_upscale(const Image& img, double factor);

}  // namespace faceforge
