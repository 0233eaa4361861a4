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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faceforge/image.hpp"
#include "faceforge/rng.hpp"

namespace faceforge {

enum class Label : int { Real = 0, Fake = 1 };
enum class Split { Train, Val, Test };

std::string_view to_string(Split split);
Split parse_split(std::string_view text);

/// One source sequence: an ordered list of frame images with a class label.
struct VideoRecord {
  std::string video_id;
  Label label = Label::Real;
  std::optional<Split> split;
  std::optional<std::string> source_id;  ///< pristine video a fake derives from
  std::vector<std::string> frame_paths;

  int num_frames() const { return static_cast<int>(frame_paths.size()); }
};

/// Videos with their train/val/test assignment. Frame paths are resolved
/// against `root` when relative.
struct SplitManifest {
  std::vector<VideoRecord> records;
  std::uint64_t seed = 0;
  std::filesystem::path root;

  std::size_t count(Split split) const;
  std::size_t count(Split split, Label label) const;
  std::vector<std::size_t> indices(Split split, std::optional<Label> label = std::nullopt) const;
  const VideoRecord& find(std::string_view video_id) const;
  std::filesystem::path resolve(const std::string& frame_path) const;
  /// Throws unless every invariant holds (disjoint non-empty splits, fakes
  /// co-located with their sources, reals without source_id).
  void validate() const;
};

/// JSON-lines: one {video_id, label, split, source_id, frames} object per line.
void write_manifest(const std::filesystem::path& path, const SplitManifest& manifest);
SplitManifest read_manifest(const std::filesystem::path& path);

/// Seeded shuffle of the REAL videos into (n_train, n_val, n_test); fakes
/// follow their source. Reals beyond the requested counts are dropped along
/// with their fakes.
SplitManifest split_records(std::vector<VideoRecord> records, std::size_t n_train, std::size_t n_val,
                            std::size_t n_test, std::uint64_t seed);

/// Folder index ranges for folder-keyed splits, half-open [begin, end).
struct FolderRanges {
  int train_begin = 0, train_end = 35;
  int val_begin = 35, val_end = 40;
  int test_begin = 40, test_end = 50;
};

/// Trailing integer of the directory holding the video's first frame,
/// e.g. ".../dfdc_train_part_12/abc/000.png" -> 12.
int folder_index_from_path(const VideoRecord& record);

SplitManifest split_by_folder(std::vector<VideoRecord> records, const FolderRanges& ranges = {},
                              const std::function<int(const VideoRecord&)>& folder_of = folder_index_from_path);

/// Up to n sorted distinct frame indices, uniformly spaced with a seeded top-up.
std::vector<int> sample_frames(const VideoRecord& record, int n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Face detection and loading

struct Detection {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double confidence = 0;
  double area() const { return (x1 - x0) * (y1 - y0); }
};

class FaceDetector {
 public:
  virtual ~FaceDetector() = default;
  /// `frame_path` identifies the frame for backends that look up known boxes.
  virtual std::vector<Detection> detect(const Image& frame, const std::filesystem::path& frame_path) const = 0;
};

/// Returns the full frame with confidence 1.
class FullFrameDetector final : public FaceDetector {
 public:
  std::vector<Detection> detect(const Image& frame, const std::filesystem::path&) const override;
};

/// Returns the face boxes recorded by the synthetic generator (faces.jsonl).
class SyntheticOracleDetector final : public FaceDetector {
 public:
  explicit SyntheticOracleDetector(const std::filesystem::path& faces_jsonl);
  std::vector<Detection> detect(const Image& frame, const std::filesystem::path& frame_path) const override;

 private:
  std::map<std::string, Detection> boxes_;
};

/// Keeps the highest-confidence detection, ties broken by larger area.
std::optional<Detection> best_detection(const std::vector<Detection>& detections);

/// Square crop of 1.3x the detection's larger side, centered on the box and
/// shifted/clamped to lie inside the frame.
PixelBox square_crop_box(const Detection& det, int frame_width, int frame_height, double margin = 1.3);

struct FaceCrop {
  Image pixels;  ///< side x side x 3, values in [0, 1]
  Label label = Label::Real;
  std::string video_id;
  int frame_index = 0;
  PixelBox source_box;  ///< crop rectangle in frame coordinates

  int side() const { return pixels.width; }
};

/// Throws unless the crop is square RGB with all values in [0, 1].
void validate_face(const FaceCrop& face);

std::optional<FaceCrop> load_face(const SplitManifest& manifest, const VideoRecord& record, int frame_index,
                                  int side, const FaceDetector& detector);

/// Thread-safe memoizing wrapper around load_face.
class FaceLoader {
 public:
  FaceLoader(const SplitManifest& manifest, int side, std::shared_ptr<const FaceDetector> detector);

  std::optional<FaceCrop> load(std::size_t record_index, int frame_index) const;
  const SplitManifest& manifest() const { return manifest_; }
  int side() const { return side_; }

 private:
  const SplitManifest& manifest_;
  int side_;
  std::shared_ptr<const FaceDetector> detector_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::size_t, int>, std::optional<FaceCrop>> cache_;
};

// ---------------------------------------------------------------------------
// Batch composition

struct FrameRef {
  std::size_t record = 0;  ///< index into manifest.records
  int frame_index = 0;
  Label label = Label::Real;
  bool operator==(const FrameRef&) const = default;
};

struct BalancedBatch {
  std::vector<FaceCrop> faces;
  std::vector<Label> labels;
};

struct Triplet {
  FaceCrop anchor, positive, negative;
};

struct TripletBatch {
  std::vector<Triplet> triplets;
};

struct TripletRef {
  FrameRef anchor, positive, negative;
};

/// Per-video frame index sets fixed once per manifest (sample_frames with the
/// manifest seed).
class FramePlan {
 public:
  FramePlan(const SplitManifest& manifest, int frames_per_video);
  const std::vector<int>& frames(std::size_t record) const { return frames_[record]; }
  int frames_per_video() const { return fpv_; }

 private:
  std::vector<std::vector<int>> frames_;
  int fpv_;
};

/// k REAL then k FAKE refs; videos drawn uniformly, then a frame uniformly
/// from that video's planned frames.
std::vector<FrameRef> plan_balanced_batch(const SplitManifest& manifest, const FramePlan& plan, Split split,
                                          int k, Rng& rng);

/// n/2 REAL-anchored triplets followed by n/2 FAKE-anchored ones; anchor and
/// positive always come from different videos.
std::vector<TripletRef> plan_triplet_batch(const SplitManifest& manifest, const FramePlan& plan, Split split,
                                           int n_triplets, Rng& rng);

BalancedBatch compose_balanced_batch(const FaceLoader& loader, const FramePlan& plan, Split split, int k,
                                     Rng& rng);
TripletBatch compose_triplet_batch(const FaceLoader& loader, const FramePlan& plan, Split split,
                                   int n_triplets, Rng& rng);

/// Worker count for data loading, from FACEFORGE_NUM_WORKERS (default 1).
int num_workers();

/// Runs fn(i) for i in [0, n) on up to num_workers() threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace faceforge
