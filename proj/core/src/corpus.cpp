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

#include "faceforge/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "faceforge/error.hpp"

namespace faceforge {

using nlohmann::json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "TRAIN";
    case Split::Val: return "VAL";
    case Split::Test: return "TEST";
  }
  return "?";
}

Split parse_split(std::string_view text) {
  std::string up(text);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "TRAIN") return Split::Train;
  if (up == "VAL") return Split::Val;
  if (up == "TEST") return Split::Test;
  throw Error(ErrorKind::Format, "unknown split '" + std::string(text) + "'");
}

std::size_t SplitManifest::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const VideoRecord& r) { return r.split == split; }));
}

std::size_t SplitManifest::count(Split split, Label label) const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [&](const VideoRecord& r) {
    return r.split == split && r.label == label;
  }));
}

std::vector<std::size_t> SplitManifest::indices(Split split, std::optional<Label> label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].split == split && (!label || records[i].label == *label)) out.push_back(i);
  }
  return out;
}

const VideoRecord& SplitManifest::find(std::string_view video_id) const {
  for (const auto& r : records)
    if (r.video_id == video_id) return r;
  throw Error(ErrorKind::InvalidArgument, "unknown video '" + std::string(video_id) + "'");
}

std::filesystem::path SplitManifest::resolve(const std::string& frame_path) const {
  std::filesystem::path p(frame_path);
  return p.is_absolute() ? p : root / p;
}

void SplitManifest::validate() const {
  std::map<std::string, const VideoRecord*> by_id;
  for (const auto& r : records) {
    FACEFORGE_CHECK(by_id.emplace(r.video_id, &r).second, ErrorKind::Format,
                    "duplicate video_id '" + r.video_id + "'");
    FACEFORGE_CHECK(r.split.has_value(), ErrorKind::Format, "video '" + r.video_id + "' has no split");
    FACEFORGE_CHECK(r.num_frames() > 0, ErrorKind::Format, "video '" + r.video_id + "' has no frames");
    if (r.label == Label::Real) {
      FACEFORGE_CHECK(!r.source_id, ErrorKind::Format, "real video '" + r.video_id + "' carries a source_id");
    }
  }
  for (const auto& r : records) {
    if (r.label != Label::Fake || !r.source_id) continue;
    auto it = by_id.find(*r.source_id);
    FACEFORGE_CHECK(it != by_id.end(), ErrorKind::Format,
                    "fake '" + r.video_id + "' references missing source '" + *r.source_id + "'");
    FACEFORGE_CHECK(it->second->split == r.split, ErrorKind::Format,
                    "fake '" + r.video_id + "' is not in its source's split");
  }
  for (Split s : {Split::Train, Split::Val, Split::Test}) {
    FACEFORGE_CHECK(count(s) > 0, ErrorKind::Format, std::string("split ") + std::string(to_string(s)) + " is empty");
  }
}

void write_manifest(const std::filesystem::path& path, const SplitManifest& manifest) {
  std::ofstream out(path);
  FACEFORGE_CHECK(out.good(), ErrorKind::Io, "cannot write manifest '" + path.string() + "'");
  for (const auto& r : manifest.records) {
    json j;
    j["video_id"] = r.video_id;
    j["label"] = static_cast<int>(r.label);
    j["split"] = r.split ? json(std::string(to_string(*r.split))) : json(nullptr);
    j["source_id"] = r.source_id ? json(*r.source_id) : json(nullptr);
    j["frames"] = r.frame_paths;
    out << j.dump() << '\n';
  }
  FACEFORGE_CHECK(out.good(), ErrorKind::Io, "error writing manifest '" + path.string() + "'");
}

SplitManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  FACEFORGE_CHECK(in.good(), ErrorKind::Io, "cannot open manifest '" + path.string() + "'");
  SplitManifest manifest;
  manifest.root = path.parent_path();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      VideoRecord r;
      r.video_id = j.at("video_id").get<std::string>();
      const int label = j.at("label").get<int>();
      FACEFORGE_CHECK(label == 0 || label == 1, ErrorKind::Format, "label must be 0 or 1");
      r.label = static_cast<Label>(label);
      if (j.contains("split") && !j["split"].is_null()) r.split = parse_split(j["split"].get<std::string>());
      if (j.contains("source_id") && !j["source_id"].is_null()) r.source_id = j["source_id"].get<std::string>();
      r.frame_paths = j.at("frames").get<std::vector<std::string>>();
      manifest.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Format,
                  "manifest '" + path.string() + "' line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return manifest;
}

namespace {

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

// Assigns each fake the split of its source; unassigned sources drop the fake.
std::vector<VideoRecord> inherit_source_splits(std::vector<VideoRecord> records,
                                               const std::set<std::string>& dropped_reals) {
  std::map<std::string, std::optional<Split>> real_split;
  for (const auto& r : records)
    if (r.label == Label::Real) real_split[r.video_id] = r.split;

  std::vector<VideoRecord> out;
  for (auto& r : records) {
    if (r.label == Label::Real) {
      if (r.split) out.push_back(std::move(r));
      continue;
    }
    FACEFORGE_CHECK(r.source_id.has_value(), ErrorKind::InvalidArgument,
                    "fake '" + r.video_id + "' has no source_id");
    auto it = real_split.find(*r.source_id);
    if (dropped_reals.count(*r.source_id)) continue;
    FACEFORGE_CHECK(it != real_split.end() && it->second.has_value(), ErrorKind::InvalidArgument,
                    "fake '" + r.video_id + "' has source '" + *r.source_id + "' in no split");
    r.split = it->second;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

SplitManifest split_records(std::vector<VideoRecord> records, std::size_t n_train, std::size_t n_val,
                            std::size_t n_test, std::uint64_t seed) {
  std::vector<std::size_t> reals;
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].split.reset();
    if (records[i].label == Label::Real) reals.push_back(i);
  }
  FACEFORGE_CHECK(n_train + n_val + n_test <= reals.size(), ErrorKind::InvalidArgument,
                  "insufficient real videos: need " + std::to_string(n_train + n_val + n_test) + ", have " +
                      std::to_string(reals.size()));
  Rng rng = Rng::stream(seed, "split");
  shuffle(reals, rng);
  std::set<std::string> dropped;
  for (std::size_t k = 0; k < reals.size(); ++k) {
    auto& r = records[reals[k]];
    if (k < n_train) r.split = Split::Train;
    else if (k < n_train + n_val) r.split = Split::Val;
    else if (k < n_train + n_val + n_test) r.split = Split::Test;
    else dropped.insert(r.video_id);
  }
  SplitManifest m;
  m.records = inherit_source_splits(std::move(records), dropped);
  m.seed = seed;
  return m;
}

int folder_index_from_path(const VideoRecord& record) {
  FACEFORGE_CHECK(!record.frame_paths.empty(), ErrorKind::InvalidArgument,
                  "video '" + record.video_id + "' has no frames");
  // Walk up from the frame, returning the first directory ending in digits.
  std::filesystem::path p = std::filesystem::path(record.frame_paths.front()).parent_path();
  while (!p.empty()) {
    const std::string name = p.filename().string();
    std::size_t end = name.size();
    std::size_t begin = end;
    while (begin > 0 && std::isdigit(static_cast<unsigned char>(name[begin - 1]))) --begin;
    if (begin < end) return std::stoi(name.substr(begin));
    if (p == p.parent_path()) break;
    p = p.parent_path();
  }
  throw Error(ErrorKind::Format, "no numbered folder in path of video '" + record.video_id + "'");
}

SplitManifest split_by_folder(std::vector<VideoRecord> records, const FolderRanges& ranges,
                              const std::function<int(const VideoRecord&)>& folder_of) {
  auto in = [](int v, int b, int e) { return v >= b && v < e; };
  for (auto& r : records) {
    r.split.reset();
    const int folder = folder_of(r);
    if (in(folder, ranges.train_begin, ranges.train_end)) r.split = Split::Train;
    else if (in(folder, ranges.val_begin, ranges.val_end)) r.split = Split::Val;
    else if (in(folder, ranges.test_begin, ranges.test_end)) r.split = Split::Test;
  }
  // Fakes keep their folder's split; a fake whose folder disagrees with its
  // source would break co-location, so sources win when present.
  std::map<std::string, std::optional<Split>> real_split;
  for (const auto& r : records)
    if (r.label == Label::Real) real_split[r.video_id] = r.split;
  SplitManifest m;
  for (auto& r : records) {
    if (r.label == Label::Fake && r.source_id) {
      auto it = real_split.find(*r.source_id);
      if (it != real_split.end()) r.split = it->second;
    }
    if (r.split) m.records.push_back(std::move(r));
  }
  return m;
}

std::vector<int> sample_frames(const VideoRecord& record, int n, std::uint64_t seed) {
  FACEFORGE_CHECK(n >= 1, ErrorKind::InvalidArgument, "sample_frames: n must be >= 1");
  const int total = record.num_frames();
  std::vector<int> out;
  if (n >= total) {
    out.resize(static_cast<std::size_t>(total));
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  if (n == 1) {
    out.push_back(static_cast<int>(std::lround((total - 1) / 2.0)));
    return out;
  }
  std::set<int> chosen;
  for (int i = 0; i < n; ++i) {
    chosen.insert(static_cast<int>(std::lround(static_cast<double>(i) * (total - 1) / (n - 1))));
  }
  if (static_cast<int>(chosen.size()) < n) {
    Rng rng = Rng::stream(seed, "frames", hash_string(record.video_id));
    std::vector<int> rest;
    for (int i = 0; i < total; ++i)
      if (!chosen.count(i)) rest.push_back(i);
    shuffle(rest, rng);
    for (std::size_t k = 0; static_cast<int>(chosen.size()) < n; ++k) chosen.insert(rest[k]);
  }
  out.assign(chosen.begin(), chosen.end());
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Detection> FullFrameDetector::detect(const Image& frame, const std::filesystem::path&) const {
  return {Detection{0, 0, static_cast<double>(frame.width), static_cast<double>(frame.height), 1.0}};
}

SyntheticOracleDetector::SyntheticOracleDetector(const std::filesystem::path& faces_jsonl) {
  std::ifstream in(faces_jsonl);
  FACEFORGE_CHECK(in.good(), ErrorKind::Io, "cannot open face boxes '" + faces_jsonl.string() + "'");
  const auto root = faces_jsonl.parent_path();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const auto box = j.at("box").get<std::array<double, 4>>();
    const auto key = std::filesystem::weakly_canonical(root / j.at("frame").get<std::string>()).string();
    boxes_[key] = Detection{box[0], box[1], box[2], box[3], 1.0};
  }
}

std::vector<Detection> SyntheticOracleDetector::detect(const Image&, const std::filesystem::path& frame_path) const {
  auto it = boxes_.find(std::filesystem::weakly_canonical(frame_path).string());
  if (it == boxes_.end()) return {};
  return {it->second};
}

std::optional<Detection> best_detection(const std::vector<Detection>& detections) {
  if (detections.empty()) return std::nullopt;
  return *std::max_element(detections.begin(), detections.end(), [](const Detection& a, const Detection& b) {
    if (a.confidence != b.confidence) return a.confidence < b.confidence;
    return a.area() < b.area();
  });
}

PixelBox square_crop_box(const Detection& det, int frame_width, int frame_height, double margin) {
  const double side_f = margin * std::max(det.x1 - det.x0, det.y1 - det.y0);
  const int side = std::clamp(static_cast<int>(std::lround(side_f)), 1, std::min(frame_width, frame_height));
  const double cx = 0.5 * (det.x0 + det.x1);
  const double cy = 0.5 * (det.y0 + det.y1);
  int x0 = static_cast<int>(std::lround(cx - side / 2.0));
  int y0 = static_cast<int>(std::lround(cy - side / 2.0));
  x0 = std::clamp(x0, 0, frame_width - side);
  y0 = std::clamp(y0, 0, frame_height - side);
  return PixelBox{x0, y0, x0 + side, y0 + side};
}

void validate_face(const FaceCrop& face) {
  const auto& p = face.pixels;
  FACEFORGE_CHECK(p.width > 0 && p.width == p.height && p.channels == 3 &&
                      p.data.size() == static_cast<std::size_t>(p.width) * p.height * 3,
                  ErrorKind::Format, "face crop must be a square RGB image");
  for (float v : p.data) {
    FACEFORGE_CHECK(v >= 0.0f && v <= 1.0f, ErrorKind::Format, "face crop value outside [0, 1]");
  }
}

std::optional<FaceCrop> load_face(const SplitManifest& manifest, const VideoRecord& record, int frame_index,
                                  int side, const FaceDetector& detector) {
  FACEFORGE_CHECK(frame_index >= 0 && frame_index < record.num_frames(), ErrorKind::InvalidArgument,
                  "frame " + std::to_string(frame_index) + " out of range for '" + record.video_id + "'");
  const auto path = manifest.resolve(record.frame_paths[static_cast<std::size_t>(frame_index)]);
  const Image frame = read_png(path);
  const auto det = best_detection(detector.detect(frame, path));
  if (!det) {
    std::cerr << "warning: no face in " << path.string() << ", frame skipped\n";
    return std::nullopt;
  }
  FaceCrop face;
  face.source_box = square_crop_box(*det, frame.width, frame.height);
  face.pixels = resize_bilinear(crop(frame, face.source_box), side, side);
  face.label = record.label;
  face.video_id = record.video_id;
  face.frame_index = frame_index;
  return face;
}

FaceLoader::FaceLoader(const SplitManifest& manifest, int side, std::shared_ptr<const FaceDetector> detector)
    : manifest_(manifest), side_(side), detector_(std::move(detector)) {
  FACEFORGE_CHECK(side_ > 0, ErrorKind::InvalidArgument, "face side must be positive");
  FACEFORGE_CHECK(detector_ != nullptr, ErrorKind::InvalidArgument, "face detector required");
}

std::optional<FaceCrop> FaceLoader::load(std::size_t record_index, int frame_index) const {
  const auto key = std::make_pair(record_index, frame_index);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto face = load_face(manifest_, manifest_.records.at(record_index), frame_index, side_, *detector_);
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, std::move(face)).first->second;
}

// ---------------------------------------------------------------------------

FramePlan::FramePlan(const SplitManifest& manifest, int frames_per_video) : fpv_(frames_per_video) {
  frames_.reserve(manifest.records.size());
  for (const auto& r : manifest.records) frames_.push_back(sample_frames(r, frames_per_video, manifest.seed));
}

namespace {

FrameRef draw_frame(const FramePlan& plan, std::size_t record, Label label, Rng& rng) {
  const auto& frames = plan.frames(record);
  return FrameRef{record, frames[rng.below(frames.size())], label};
}

}  // namespace

std::vector<FrameRef> plan_balanced_batch(const SplitManifest& manifest, const FramePlan& plan, Split split,
                                          int k, Rng& rng) {
  FACEFORGE_CHECK(k >= 1, ErrorKind::InvalidArgument, "batch needs k >= 1");
  const auto reals = manifest.indices(split, Label::Real);
  const auto fakes = manifest.indices(split, Label::Fake);
  FACEFORGE_CHECK(!reals.empty() && !fakes.empty(), ErrorKind::InvalidArgument,
                  std::string("split ") + std::string(to_string(split)) + " does not contain both classes");
  std::vector<FrameRef> out;
  out.reserve(static_cast<std::size_t>(2 * k));
  for (int i = 0; i < k; ++i) out.push_back(draw_frame(plan, reals[rng.below(reals.size())], Label::Real, rng));
  for (int i = 0; i < k; ++i) out.push_back(draw_frame(plan, fakes[rng.below(fakes.size())], Label::Fake, rng));
  return out;
}

std::vector<TripletRef> plan_triplet_batch(const SplitManifest& manifest, const FramePlan& plan, Split split,
                                           int n_triplets, Rng& rng) {
  FACEFORGE_CHECK(n_triplets >= 2 && n_triplets % 2 == 0, ErrorKind::InvalidArgument,
                  "triplet batch size must be a positive even number");
  const auto reals = manifest.indices(split, Label::Real);
  const auto fakes = manifest.indices(split, Label::Fake);
  FACEFORGE_CHECK(reals.size() >= 2 && fakes.size() >= 2, ErrorKind::InvalidArgument,
                  "triplets need at least 2 videos per class in split " + std::string(to_string(split)));
  std::vector<TripletRef> out;
  out.reserve(static_cast<std::size_t>(n_triplets));
  for (Label anchor_label : {Label::Real, Label::Fake}) {
    const auto& same = anchor_label == Label::Real ? reals : fakes;
    const auto& other = anchor_label == Label::Real ? fakes : reals;
    const Label other_label = anchor_label == Label::Real ? Label::Fake : Label::Real;
    for (int i = 0; i < n_triplets / 2; ++i) {
      const std::size_t a = rng.below(same.size());
      std::size_t p = rng.below(same.size() - 1);
      if (p >= a) ++p;
      const std::size_t n = rng.below(other.size());
      out.push_back(TripletRef{draw_frame(plan, same[a], anchor_label, rng), draw_frame(plan, same[p], anchor_label, rng),
                               draw_frame(plan, other[n], other_label, rng)});
    }
  }
  return out;
}

namespace {

// Redraws from the same video class when a frame has no detectable face.
FaceCrop load_or_redraw(const FaceLoader& loader, const FramePlan& plan, FrameRef ref, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    if (auto face = loader.load(ref.record, ref.frame_index)) return std::move(*face);
    ref = draw_frame(plan, ref.record, ref.label, rng);
  }
  throw Error(ErrorKind::State, "no loadable face in video '" + loader.manifest().records[ref.record].video_id + "'");
}

}  // namespace

BalancedBatch compose_balanced_batch(const FaceLoader& loader, const FramePlan& plan, Split split, int k, Rng& rng) {
  BalancedBatch batch;
  for (const auto& ref : plan_balanced_batch(loader.manifest(), plan, split, k, rng)) {
    batch.faces.push_back(load_or_redraw(loader, plan, ref, rng));
    batch.labels.push_back(ref.label);
  }
  return batch;
}

TripletBatch compose_triplet_batch(const FaceLoader& loader, const FramePlan& plan, Split split, int n_triplets,
                                   Rng& rng) {
  TripletBatch batch;
  for (const auto& t : plan_triplet_batch(loader.manifest(), plan, split, n_triplets, rng)) {
    batch.triplets.push_back(Triplet{load_or_redraw(loader, plan, t.anchor, rng),
                                     load_or_redraw(loader, plan, t.positive, rng),
                                     load_or_redraw(loader, plan, t.negative, rng)});
  }
  return batch;
}

int num_workers() {
  if (const char* env = std::getenv("FACEFORGE_NUM_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(num_workers()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace faceforge
