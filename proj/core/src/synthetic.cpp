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

#include "faceforge/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "faceforge/error.hpp"
#include "faceforge/rng.hpp"

namespace faceforge {

using nlohmann::json;

std::string_view to_string(FacialRegion region) {
  switch (region) {
    case FacialRegion::Eyes: return "eyes";
    case FacialRegion::Mouth: return "mouth";
    case FacialRegion::Nose: return "nose";
  }
  return "?";
}

FacialRegion parse_region(std::string_view text) {
  std::string low(text);
  std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
  if (low == "eyes") return FacialRegion::Eyes;
  if (low == "mouth") return FacialRegion::Mouth;
  if (low == "nose") return FacialRegion::Nose;
  throw Error(ErrorKind::InvalidArgument, "unknown facial region '" + std::string(text) + "'");
}

void SyntheticConfig::validate() const {
  FACEFORGE_CHECK(n_real_videos > 0 && n_fake_per_real > 0 && frames_per_video > 0 && image_side > 0,
                  ErrorKind::InvalidArgument, "synthetic counts must be positive");
  FACEFORGE_CHECK(image_side >= 16, ErrorKind::InvalidArgument, "image_side must be at least 16");
  FACEFORGE_CHECK(artifact_strength >= 0.0 && artifact_strength <= 1.0, ErrorKind::InvalidArgument,
                  "artifact_strength must lie in [0, 1]");
  FACEFORGE_CHECK(!artifact_regions.empty(), ErrorKind::InvalidArgument, "artifact_regions must not be empty");
}

namespace {

using Rgb = std::array<double, 3>;

// Per-video appearance, fixed across frames.
struct FaceStyle {
  Rgb bg_top, bg_bottom, skin, iris, lips, sclera, teeth;
  double cx, cy, rx, ry;
  double eye_dx, eye_dy, eye_rx, eye_ry;
  double nose_dy, nose_rx, nose_ry;
  double mouth_dy, mouth_rx, mouth_ry;
  std::array<double, 9> waves;  // 3 x (kx, ky, phase)
  std::vector<float> pores;     // fine skin texture, side*side
};

FaceStyle make_style(const SyntheticConfig& cfg, int video_index) {
  Rng rng = Rng::stream(cfg.seed, "corpus.style", static_cast<std::uint64_t>(video_index));
  const double s = cfg.image_side;
  FaceStyle st{};
  for (auto& c : st.bg_top) c = rng.uniform(0.1, 0.9);
  for (auto& c : st.bg_bottom) c = rng.uniform(0.1, 0.9);
  const double tone = rng.uniform(0.45, 0.92);
  st.skin = {tone, tone * rng.uniform(0.68, 0.86), tone * rng.uniform(0.52, 0.74)};
  st.iris = {rng.uniform(0.05, 0.45), rng.uniform(0.05, 0.45), rng.uniform(0.05, 0.45)};
  st.lips = {rng.uniform(0.55, 0.85), rng.uniform(0.15, 0.35), rng.uniform(0.2, 0.4)};
  st.cx = s * rng.uniform(0.47, 0.53);
  st.cy = s * rng.uniform(0.47, 0.53);
  st.rx = s * rng.uniform(0.25, 0.28);
  st.ry = s * rng.uniform(0.31, 0.34);
  st.eye_dx = rng.uniform(0.36, 0.42);
  st.eye_dy = rng.uniform(0.22, 0.28);
  st.eye_rx = rng.uniform(0.17, 0.21);
  st.eye_ry = rng.uniform(0.08, 0.11);
  st.nose_dy = rng.uniform(0.02, 0.08);
  st.nose_rx = rng.uniform(0.09, 0.12);
  st.nose_ry = rng.uniform(0.17, 0.22);
  st.mouth_dy = rng.uniform(0.45, 0.52);
  st.mouth_rx = rng.uniform(0.3, 0.38);
  st.mouth_ry = rng.uniform(0.07, 0.1);
  for (int k = 0; k < 3; ++k) {
    st.waves[3 * k] = rng.uniform(-3.0, 3.0) * 2.0 * std::numbers::pi / s;
    st.waves[3 * k + 1] = rng.uniform(-3.0, 3.0) * 2.0 * std::numbers::pi / s;
    st.waves[3 * k + 2] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  st.pores.resize(static_cast<std::size_t>(cfg.image_side) * cfg.image_side);
  for (auto& p : st.pores) p = static_cast<float>(0.025 * rng.normal());
  // Eye whites and teeth differ per person in brightness and tint.
  for (Rgb* r : {&st.sclera, &st.teeth}) {
    const double b = rng.uniform(0.68, 0.96);
    for (auto& c : *r) c = b * rng.uniform(0.86, 1.0);
  }
  return st;
}

double ellipse(double x, double y, double cx, double cy, double rx, double ry) {
  const double dx = (x - cx) / rx, dy = (y - cy) / ry;
  return dx * dx + dy * dy;
}

struct RegionEllipse {
  double cx, cy, rx, ry;
};

std::vector<RegionEllipse> region_ellipses(const FaceStyle& st, const FaceGeometry& g,
                                           const std::set<FacialRegion>& regions) {
  const double grow = 1.45;
  std::vector<RegionEllipse> out;
  if (regions.count(FacialRegion::Eyes)) {
    for (double side : {-1.0, 1.0}) {
      out.push_back({g.cx + side * st.eye_dx * g.rx, g.cy - st.eye_dy * g.ry, grow * st.eye_rx * g.rx,
                     grow * 1.6 * st.eye_ry * g.ry});
    }
  }
  if (regions.count(FacialRegion::Nose)) {
    out.push_back({g.cx, g.cy + st.nose_dy * g.ry, grow * st.nose_rx * g.rx, grow * st.nose_ry * g.ry});
  }
  if (regions.count(FacialRegion::Mouth)) {
    out.push_back({g.cx, g.cy + st.mouth_dy * g.ry, grow * st.mouth_rx * g.rx, grow * 1.8 * st.mouth_ry * g.ry});
  }
  return out;
}

Image box_blur(const Image& src) {
  Image out(src.width, src.height, src.channels);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      for (int c = 0; c < src.channels; ++c) {
        double sum = 0.0;
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = x + dx, yy = y + dy;
            if (xx < 0 || yy < 0 || xx >= src.width || yy >= src.height) continue;
            sum += src.at(xx, yy, c);
            ++n;
          }
        }
        out.at(x, y, c) = static_cast<float>(sum / n);
      }
    }
  }
  return out;
}

}  // namespace

SyntheticFrame render_real_frame(const SyntheticConfig& cfg, int video_index, int frame_index) {
  const FaceStyle st = make_style(cfg, video_index);
  Rng rng = Rng::stream(cfg.seed, "corpus.frame", static_cast<std::uint64_t>(video_index),
                        static_cast<std::uint64_t>(frame_index));
  const int n = cfg.image_side;
  const double unit = n / 64.0;
  SyntheticFrame frame;
  frame.geometry = {st.cx + rng.uniform(-2.0, 2.0) * unit, st.cy + rng.uniform(-2.0, 2.0) * unit, st.rx, st.ry};
  const auto& g = frame.geometry;
  const double gain = rng.uniform(0.97, 1.03);
  frame.image = Image(n, n, 3);
  frame.artifact_mask = Image(n, n, 1);

  const double eye_y = g.cy - st.eye_dy * g.ry;
  const double nose_y = g.cy + st.nose_dy * g.ry;
  const double mouth_y = g.cy + st.mouth_dy * g.ry;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const double t = py / n;
      Rgb c;
      for (int k = 0; k < 3; ++k) c[k] = (1.0 - t) * st.bg_top[k] + t * st.bg_bottom[k];
      if (ellipse(px, py, g.cx, g.cy, g.rx, g.ry) <= 1.0) {
        // Skin tint follows the face, so texture coordinates are face-relative.
        const double fx = px - g.cx + st.cx, fy = py - g.cy + st.cy;
        double shade = 0.0;
        for (int k = 0; k < 3; ++k)
          shade += 0.03 * std::sin(st.waves[3 * k] * fx + st.waves[3 * k + 1] * fy + st.waves[3 * k + 2]);
        const int tx = std::clamp(static_cast<int>(fx), 0, n - 1), ty = std::clamp(static_cast<int>(fy), 0, n - 1);
        shade += st.pores[static_cast<std::size_t>(ty) * n + tx];
        for (int k = 0; k < 3; ++k) c[k] = st.skin[k] + shade;

        for (double side : {-1.0, 1.0}) {
          const double ex = g.cx + side * st.eye_dx * g.rx;
          const double d = ellipse(px, py, ex, eye_y, st.eye_rx * g.rx, st.eye_ry * g.ry);
          if (d <= 1.0) {
            c = st.sclera;
            const double di = ellipse(px, py, ex, eye_y, 0.45 * st.eye_rx * g.rx, st.eye_ry * g.ry);
            if (di <= 1.0) c = st.iris;
            if (ellipse(px, py, ex, eye_y, 0.2 * st.eye_rx * g.rx, 0.5 * st.eye_ry * g.ry) <= 1.0)
              c = {0.03, 0.03, 0.03};
          }
        }
        const double dn = ellipse(px, py, g.cx, nose_y, st.nose_rx * g.rx, st.nose_ry * g.ry);
        if (dn <= 1.0) {
          const double k = 0.75 + 0.2 * dn;
          for (auto& v : c) v *= k;
        }
        const double dm = ellipse(px, py, g.cx, mouth_y, st.mouth_rx * g.rx, st.mouth_ry * g.ry);
        if (dm <= 1.0) {
          c = st.lips;
          if (std::abs(py - mouth_y) < 0.35 * st.mouth_ry * g.ry && dm <= 0.6) c = st.teeth;
        }
      }
      for (int k = 0; k < 3; ++k) {
        const double v = gain * c[k] + 0.01 * rng.normal();
        frame.image.at(x, y, k) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  frame.image = quantize8(frame.image);
  return frame;
}

SyntheticFrame make_fake_frame(const SyntheticConfig& cfg, const SyntheticFrame& real, int video_index,
                               int fake_index) {
  const FaceStyle st = make_style(cfg, video_index);
  Rng rng = Rng::stream(cfg.seed, "corpus.fake", static_cast<std::uint64_t>(video_index),
                        static_cast<std::uint64_t>(fake_index));
  // Fake-video constants: colour shift direction and seam polarity.
  Rgb shift;
  double norm = 0.0;
  for (auto& v : shift) {
    v = rng.normal();
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (auto& v : shift) v = 0.3 * v / norm;
  const double seam = rng.bernoulli(0.5) ? 0.3 : -0.3;

  const int n = cfg.image_side;
  SyntheticFrame fake;
  fake.geometry = real.geometry;
  fake.image = real.image;
  fake.artifact_mask = Image(n, n, 1);
  const auto regions = region_ellipses(st, real.geometry, cfg.artifact_regions);
  auto inside = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= n || y >= n) return false;
    for (const auto& r : regions)
      if (ellipse(x + 0.5, y + 0.5, r.cx, r.cy, r.rx, r.ry) <= 1.0) return true;
    return false;
  };
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) fake.artifact_mask.at(x, y, 0) = inside(x, y) ? 1.0f : 0.0f;

  const float strength = static_cast<float>(cfg.artifact_strength);
  const Image blurred = box_blur(box_blur(real.image));
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (fake.artifact_mask.at(x, y, 0) == 0.0f) continue;
      const bool boundary = !inside(x - 1, y) || !inside(x + 1, y) || !inside(x, y - 1) || !inside(x, y + 1);
      for (int k = 0; k < 3; ++k) {
        const float src = real.image.at(x, y, k);
        const double delta = (blurred.at(x, y, k) - src) + shift[k] + (boundary ? seam : 0.0);
        fake.image.at(x, y, k) = std::clamp(src + strength * static_cast<float>(delta), 0.0f, 1.0f);
      }
    }
  }
  fake.image = quantize8(fake.image);
  return fake;
}

namespace {

std::string padded(int v, int width) {
  std::ostringstream os;
  os << std::setw(width) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

SplitManifest generate_synthetic_corpus(const SyntheticConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir / "frames", ec);
  FACEFORGE_CHECK(!ec && fs::is_directory(out_dir), ErrorKind::Io,
                  "cannot create output directory '" + out_dir.string() + "'");
  fs::create_directories(out_dir / "masks", ec);

  std::ofstream faces(out_dir / "faces.jsonl");
  FACEFORGE_CHECK(faces.good(), ErrorKind::Io, "cannot write '" + (out_dir / "faces.jsonl").string() + "'");

  std::vector<VideoRecord> records;
  for (int v = 0; v < config.n_real_videos; ++v) {
    VideoRecord real;
    real.video_id = "real_" + padded(v, 4);
    real.label = Label::Real;
    std::vector<VideoRecord> fakes(static_cast<std::size_t>(config.n_fake_per_real));
    for (int j = 0; j < config.n_fake_per_real; ++j) {
      auto& fk = fakes[static_cast<std::size_t>(j)];
      fk.video_id = "fake_" + padded(v, 4) + "_" + std::to_string(j);
      fk.label = Label::Fake;
      fk.source_id = real.video_id;
      fs::create_directories(out_dir / "frames" / fk.video_id);
      fs::create_directories(out_dir / "masks" / fk.video_id);
    }
    fs::create_directories(out_dir / "frames" / real.video_id);
    for (int f = 0; f < config.frames_per_video; ++f) {
      const std::string name = padded(f, 3) + ".png";
      const SyntheticFrame frame = render_real_frame(config, v, f);
      const std::string rel = "frames/" + real.video_id + "/" + name;
      write_png(out_dir / rel, frame.image);
      real.frame_paths.push_back(rel);
      const Detection box = frame.geometry.box();
      faces << json{{"frame", rel}, {"box", {box.x0, box.y0, box.x1, box.y1}}}.dump() << '\n';
      for (int j = 0; j < config.n_fake_per_real; ++j) {
        auto& fk = fakes[static_cast<std::size_t>(j)];
        const SyntheticFrame fake = make_fake_frame(config, frame, v, j);
        const std::string frel = "frames/" + fk.video_id + "/" + name;
        const std::string mrel = "masks/" + fk.video_id + "/" + name;
        write_png(out_dir / frel, fake.image);
        write_png(out_dir / mrel, fake.artifact_mask);
        fk.frame_paths.push_back(frel);
        faces << json{{"frame", frel}, {"box", {box.x0, box.y0, box.x1, box.y1}}, {"mask", mrel}}.dump() << '\n';
      }
    }
    records.push_back(std::move(real));
    for (auto& fk : fakes) records.push_back(std::move(fk));
  }
  FACEFORGE_CHECK(faces.good(), ErrorKind::Io, "error writing faces.jsonl");

  const auto n = static_cast<std::size_t>(config.n_real_videos);
  std::size_t n_train, n_val, n_test;
  if (config.n_train || config.n_val || config.n_test) {
    n_train = config.n_train.value_or(0);
    n_val = config.n_val.value_or(0);
    n_test = config.n_test.value_or(0);
  } else {
    n_val = std::max<std::size_t>(1, (n * 15) / 100);
    n_test = std::max<std::size_t>(1, (n * 15) / 100);
    FACEFORGE_CHECK(n >= n_val + n_test + 1, ErrorKind::InvalidArgument,
                    "need at least 3 real videos for a train/val/test split");
    n_train = n - n_val - n_test;
  }
  SplitManifest manifest = split_records(std::move(records), n_train, n_val, n_test, config.seed);
  manifest.root = out_dir;
  write_manifest(out_dir / "manifest.jsonl", manifest);
  return manifest;
}

ArtifactMasks::ArtifactMasks(const std::filesystem::path& faces_jsonl) {
  std::ifstream in(faces_jsonl);
  FACEFORGE_CHECK(in.good(), ErrorKind::Io, "cannot open '" + faces_jsonl.string() + "'");
  const auto root = faces_jsonl.parent_path();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (!j.contains("mask")) continue;
    masks_[std::filesystem::weakly_canonical(root / j.at("frame").get<std::string>()).string()] =
        root / j.at("mask").get<std::string>();
  }
}

std::optional<Image> ArtifactMasks::mask_for(const std::filesystem::path& frame_path) const {
  auto it = masks_.find(std::filesystem::weakly_canonical(frame_path).string());
  if (it == masks_.end()) return std::nullopt;
  Image rgb = read_png(it->second);
  Image mask(rgb.width, rgb.height, 1);
  for (int y = 0; y < rgb.height; ++y)
    for (int x = 0; x < rgb.width; ++x) mask.at(x, y, 0) = rgb.at(x, y, 0);
  return mask;
}

}  // namespace faceforge
