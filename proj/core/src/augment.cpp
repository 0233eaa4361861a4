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

#include "faceforge/augment.hpp"

#include <algorithm>
#include <cmath>

#include "faceforge/error.hpp"

namespace faceforge {

AugmentConfig AugmentConfig::identity() {
  AugmentConfig c;
  c.p_downscale = c.p_flip = c.p_brightness_contrast = c.p_hue_saturation = c.p_noise = c.p_jpeg = 0.0;
  return c;
}

void AugmentConfig::validate() const {
  for (double p : {p_downscale, p_flip, p_brightness_contrast, p_hue_saturation, p_noise, p_jpeg}) {
    FACEFORGE_CHECK(p >= 0.0 && p <= 1.0, ErrorKind::InvalidArgument, "augment probabilities must lie in [0, 1]");
  }
  auto ordered = [](const Range& r) { return r.lo <= r.hi; };
  FACEFORGE_CHECK(ordered(downscale) && downscale.lo > 0.0 && downscale.hi <= 1.0, ErrorKind::InvalidArgument,
                  "downscale range must lie in (0, 1]");
  FACEFORGE_CHECK(ordered(brightness) && brightness.lo >= -1.0 && brightness.hi <= 1.0, ErrorKind::InvalidArgument,
                  "brightness range must lie in [-1, 1]");
  FACEFORGE_CHECK(ordered(contrast) && contrast.lo >= -1.0 && contrast.hi <= 1.0, ErrorKind::InvalidArgument,
                  "contrast range must lie in [-1, 1]");
  FACEFORGE_CHECK(ordered(hue) && hue.lo >= -0.5 && hue.hi <= 0.5, ErrorKind::InvalidArgument,
                  "hue range must lie in [-0.5, 0.5]");
  FACEFORGE_CHECK(ordered(saturation) && saturation.lo >= -1.0 && saturation.hi <= 1.0,
                  ErrorKind::InvalidArgument, "saturation range must lie in [-1, 1]");
  FACEFORGE_CHECK(ordered(noise_sigma) && noise_sigma.lo >= 0.0, ErrorKind::InvalidArgument,
                  "noise sigma range must be non-negative");
  FACEFORGE_CHECK(ordered(jpeg_quality) && jpeg_quality.lo >= 1.0 && jpeg_quality.hi <= 100.0,
                  ErrorKind::InvalidArgument, "jpeg quality range must lie in [1, 100]");
}

Image adjust_brightness_contrast(const Image& img, double brightness, double contrast) {
  Image out = img;
  const double alpha = 1.0 + contrast;
  for (auto& v : out.data) v = static_cast<float>(std::clamp(alpha * v + brightness, 0.0, 1.0));
  return out;
}

namespace {

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  const double d = mx - mn;
  v = mx;
  s = mx > 0.0 ? d / mx : 0.0;
  if (d <= 0.0) {
    h = 0.0;
    return;
  }
  if (mx == r) h = (g - b) / d;
  else if (mx == g) h = 2.0 + (b - r) / d;
  else h = 4.0 + (r - g) / d;
  h /= 6.0;
  if (h < 0.0) h += 1.0;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
  const double hh = 6.0 * (h - std::floor(h));
  const int i = static_cast<int>(hh) % 6;
  const double f = hh - std::floor(hh);
  const double p = v * (1.0 - s), q = v * (1.0 - s * f), t = v * (1.0 - s * (1.0 - f));
  switch (i) {
    case 0: r = v, g = t, b = p; break;
    case 1: r = q, g = v, b = p; break;
    case 2: r = p, g = v, b = t; break;
    case 3: r = p, g = q, b = v; break;
    case 4: r = t, g = p, b = v; break;
    default: r = v, g = p, b = q; break;
  }
}

}  // namespace

Image shift_hue_saturation(const Image& img, double hue_shift, double saturation_shift) {
  Image out = img;
  for (std::size_t i = 0; i + 2 < out.data.size(); i += 3) {
    double h, s, v;
    rgb_to_hsv(out.data[i], out.data[i + 1], out.data[i + 2], h, s, v);
    h += hue_shift;
    h -= std::floor(h);
    s = std::clamp(s + saturation_shift, 0.0, 1.0);
    double r, g, b;
    hsv_to_rgb(h, s, v, r, g, b);
    out.data[i] = static_cast<float>(std::clamp(r, 0.0, 1.0));
    out.data[i + 1] = static_cast<float>(std::clamp(g, 0.0, 1.0));
    out.data[i + 2] = static_cast<float>(std::clamp(b, 0.0, 1.0));
  }
  return out;
}

Image add_gaussian_noise(const Image& img, double sigma, Rng& rng) {
  Image out = img;
  for (auto& v : out.data) v = static_cast<float>(std::clamp(v + sigma * rng.normal(), 0.0, 1.0));
  return out;
}

Image downscale_upscale(const Image& img, double factor) {
  const int w = std::max(1, static_cast<int>(std::lround(img.width * factor)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height * factor)));
  return resize_bilinear(resize_bilinear(img, w, h), img.width, img.height);
}

FaceCrop augment(const FaceCrop& face, const AugmentConfig& config, Rng& rng) {
  FaceCrop out = face;
  auto clamp_to = [](double v, const Range& r) { return std::clamp(v, r.lo, r.hi); };
  // Every decision and parameter is drawn unconditionally so the stream
  // position does not depend on which transforms fired.
  const bool do_down = rng.bernoulli(config.p_downscale);
  const double factor = clamp_to(rng.uniform(config.downscale.lo, config.downscale.hi), config.downscale);
  const bool do_flip = rng.bernoulli(config.p_flip);
  const bool do_bc = rng.bernoulli(config.p_brightness_contrast);
  const double brightness = clamp_to(rng.uniform(config.brightness.lo, config.brightness.hi), config.brightness);
  const double contrast = clamp_to(rng.uniform(config.contrast.lo, config.contrast.hi), config.contrast);
  const bool do_hs = rng.bernoulli(config.p_hue_saturation);
  const double hue = clamp_to(rng.uniform(config.hue.lo, config.hue.hi), config.hue);
  const double sat = clamp_to(rng.uniform(config.saturation.lo, config.saturation.hi), config.saturation);
  const bool do_noise = rng.bernoulli(config.p_noise);
  const double sigma = clamp_to(rng.uniform(config.noise_sigma.lo, config.noise_sigma.hi), config.noise_sigma);
  const std::uint64_t noise_seed = rng.next_u64();
  const bool do_jpeg = rng.bernoulli(config.p_jpeg);
  const int quality = static_cast<int>(
      std::lround(clamp_to(rng.uniform(config.jpeg_quality.lo, config.jpeg_quality.hi), config.jpeg_quality)));

  if (do_down) out.pixels = downscale_upscale(out.pixels, factor);
  if (do_flip) out.pixels = flip_horizontal(out.pixels);
  if (do_bc) out.pixels = adjust_brightness_contrast(out.pixels, brightness, contrast);
  if (do_hs) out.pixels = shift_hue_saturation(out.pixels, hue, sat);
  if (do_noise) {
    Rng noise(noise_seed);
    out.pixels = add_gaussian_noise(out.pixels, sigma, noise);
  }
  if (do_jpeg) out.pixels = jpeg_roundtrip(out.pixels, quality);
  return out;
}

}  // namespace faceforge
