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

#include "faceforge/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "faceforge/attnviz.hpp"
#include "faceforge/error.hpp"

namespace faceforge {

namespace fs = std::filesystem;

namespace {

void require_dir(const fs::path& dir, std::string_view what) {
  FACEFORGE_CHECK(fs::is_directory(dir), ErrorKind::Io,
                  std::string(what) + " '" + dir.string() + "' does not exist; create it or pass --out");
}

SplitManifest load_manifest(const RunConfig& config) {
  FACEFORGE_CHECK(fs::exists(config.manifest_path()), ErrorKind::Io,
                  "manifest '" + config.manifest_path().string() + "' not found; run gen-data first");
  SplitManifest m = read_manifest(config.manifest_path());
  m.validate();
  return m;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

GenDataResult cmd_gen_data(const RunConfig& config, std::ostream& log) {
  require_dir(config.data_dir, "data directory");
  const SplitManifest manifest = generate_synthetic_corpus(config.synthetic, config.data_dir);
  for (Split s : {Split::Train, Split::Val, Split::Test}) {
    log << to_string(s) << ": " << manifest.count(s, Label::Real) << " real, " << manifest.count(s, Label::Fake)
        << " fake videos\n";
  }
  log << "manifest: " << config.manifest_path().string() << " (" << manifest.records.size() << " videos)\n";
  return {config.manifest_path(), manifest.records.size()};
}

TrainOutput cmd_train(const RunConfig& config, Variant variant, std::ostream& log) {
  require_dir(config.out_dir, "output directory");
  const SplitManifest manifest = load_manifest(config);
  const FaceLoader loader(manifest, config.backbone.input_side, make_detector(config));
  Model<float> model(config.backbone_for(variant), config.stream_seed("model"));
  const std::string name(to_string(variant));
  TrainOutput out;
  out.checkpoint = config.out_dir / (name + ".ckpt");
  std::optional<Model<float>> best;
  if (is_siamese(variant)) {
    TrainResult encoder = train_siamese(std::move(model), loader, config.siamese, config.augment);
    out.histories.push_back(config.out_dir / (name + "_siamese_history.csv"));
    write_history_csv(out.histories.back(), encoder.state.history);
    log << name << " siamese: " << encoder.state.history.size() << " iterations, best val loss "
        << encoder.state.best_val_loss << '\n';
    TrainResult head = finetune_classifier(std::move(encoder.best), loader, config.finetune, config.augment);
    out.histories.push_back(config.out_dir / (name + "_finetune_history.csv"));
    write_history_csv(out.histories.back(), head.state.history);
    log << name << " finetune: " << head.state.history.size() << " iterations, best val loss "
        << head.state.best_val_loss << '\n';
    best = std::move(head.best);
  } else {
    TrainResult result = train_end_to_end(std::move(model), loader, config.train, config.augment);
    out.histories.push_back(config.out_dir / (name + "_history.csv"));
    write_history_csv(out.histories.back(), result.state.history);
    log << name << ": " << result.state.history.size() << " iterations, best val loss "
        << result.state.best_val_loss << '\n';
    best = std::move(result.best);
  }
  save_checkpoint(out.checkpoint, ModelVariant{variant,
                                               is_siamese(variant) ? TrainingMode::Siamese : TrainingMode::EndToEnd,
                                               std::move(*best)});
  log << "checkpoint: " << out.checkpoint.string() << '\n';
  return out;
}

EvaluateOutput cmd_evaluate(const RunConfig& config, const std::vector<fs::path>& checkpoints, std::ostream& log) {
  FACEFORGE_CHECK(!checkpoints.empty(), ErrorKind::InvalidArgument, "evaluate needs at least one checkpoint");
  require_dir(config.out_dir, "output directory");
  // Keyed by model id so the argument order cannot leak into the outputs.
  std::map<std::string, ModelVariant> models;
  for (const auto& path : checkpoints) {
    ModelVariant m = load_checkpoint(path);
    const std::string id(to_string(m.name));
    FACEFORGE_CHECK(!models.count(id), ErrorKind::InvalidArgument,
                    "two checkpoints hold variant " + id + " ('" + path.string() + "')");
    models.emplace(id, std::move(m));
  }
  const SplitManifest manifest = load_manifest(config);
  int side = models.begin()->second.model.config().input_side;
  for (const auto& [id, m] : models) {
    FACEFORGE_CHECK(m.model.config().input_side == side, ErrorKind::ShapeMismatch,
                    "checkpoints disagree on input side");
  }
  const FaceLoader loader(manifest, side, make_detector(config));
  std::vector<ScoredModel> scored;
  std::vector<std::string> ids;
  for (const auto& [id, m] : models) {
    scored.push_back({id, &m.model});
    ids.push_back(id);
  }
  const ScoreTable table = score_frames(scored, loader, Split::Test, config.evaluation.frames_per_video);
  EvaluateOutput out;
  out.scores = config.out_dir / "scores.csv";
  out.results = config.out_dir / "results.csv";
  table.write_csv(out.scores);
  const auto subsets = config.evaluation.subsets.empty() ? all_subsets(ids) : config.evaluation.subsets;
  out.rows = evaluate_subsets(table, subsets);
  write_results_csv(out.results, out.rows);
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      write_pairwise_csv(config.out_dir / ("pairwise_" + ids[a] + "_" + ids[b] + ".csv"), ids[a], ids[b],
                         export_pairwise_scores(table, ids[a], ids[b]));
    }
  }
  for (const auto& r : out.rows) log << r.subset_name() << ": AUC " << r.auc << ", LogLoss " << r.logloss << '\n';
  return out;
}

std::vector<FaceCrop> load_split_faces(const FaceLoader& loader, Split split, int frames_per_video,
                                       std::size_t limit, std::optional<Label> label) {
  const SplitManifest& manifest = loader.manifest();
  const FramePlan plan(manifest, frames_per_video);
  std::vector<FaceCrop> faces;
  for (std::size_t v : manifest.indices(split, label)) {
    for (int f : plan.frames(v)) {
      if (faces.size() >= limit) return faces;
      if (auto face = loader.load(v, f)) faces.push_back(std::move(*face));
    }
  }
  return faces;
}

LocalizationStats measure_localization(const Model<float>& model, const FaceLoader& loader,
                                       const ArtifactMasks& masks, Split split, int frames_per_video) {
  FACEFORGE_CHECK(model.config().attention_stage.has_value(), ErrorKind::State,
                  "model has no attention block to localize");
  const SplitManifest& manifest = loader.manifest();
  const auto faces = load_split_faces(loader, split, frames_per_video, SIZE_MAX, Label::Fake);
  const auto maps = attention_maps(model, faces);
  LocalizationStats stats;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const VideoRecord& record = manifest.find(faces[i].video_id);
    const auto mask = masks.mask_for(manifest.resolve(record.frame_paths[static_cast<std::size_t>(faces[i].frame_index)]));
    if (!mask) continue;
    const MaskContrast c = mask_contrast(upscale_map(maps[i], faces[i].side()), face_mask(*mask, faces[i]));
    if (c.inside_pixels == 0 || c.outside_pixels == 0) continue;
    stats.inside += c.inside;
    stats.outside += c.outside;
    ++stats.n_faces;
  }
  FACEFORGE_CHECK(stats.n_faces > 0, ErrorKind::InvalidArgument, "no fake faces with artifact masks found");
  stats.inside /= static_cast<double>(stats.n_faces);
  stats.outside /= static_cast<double>(stats.n_faces);
  return stats;
}

AttnOutput cmd_attn(const RunConfig& config, const fs::path& checkpoint, std::ostream& log) {
  require_dir(config.out_dir, "output directory");
  FACEFORGE_CHECK(config.attn.blend_alpha >= 0.0 && config.attn.blend_alpha <= 1.0, ErrorKind::InvalidArgument,
                  "attn.blend_alpha must lie in [0, 1]");
  const ModelVariant m = load_checkpoint(checkpoint);
  FACEFORGE_CHECK(m.model.config().attention_stage.has_value(), ErrorKind::InvalidArgument,
                  "checkpoint '" + checkpoint.string() + "' (variant " + std::string(to_string(m.name)) +
                      ") has no attention block");
  const SplitManifest manifest = load_manifest(config);
  const FaceLoader loader(manifest, m.model.config().input_side, make_detector(config));
  // One middle frame per test video until n_faces are collected.
  const auto faces =
      load_split_faces(loader, Split::Test, 1, static_cast<std::size_t>(std::max(0, config.attn.n_faces)));
  const auto maps = attention_maps(m.model, faces);
  AttnOutput out;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "_%03d.png", faces[i].frame_index);
    out.overlays.push_back(config.out_dir / ("attn_" + faces[i].video_id + name));
    write_png(out.overlays.back(), render_overlay(faces[i], maps[i], config.attn.blend_alpha));
  }
  log << "wrote " << out.overlays.size() << " overlays to " << config.out_dir.string() << '\n';
  if (fs::exists(config.faces_path())) {
    const ArtifactMasks masks(config.faces_path());
    try {
      out.localization = measure_localization(m.model, loader, masks, Split::Test, config.evaluation.frames_per_video);
      log << "attention inside artifact regions " << out.localization.inside << ", outside "
          << out.localization.outside << " over " << out.localization.n_faces << " fakes\n";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InvalidArgument) throw;
    }
  }
  return out;
}

ProjectOutput cmd_project(const RunConfig& config, const fs::path& checkpoint, std::ostream& log) {
  require_dir(config.out_dir, "output directory");
  FACEFORGE_CHECK(config.project.n_samples >= 3, ErrorKind::InvalidArgument,
                  "project needs n_samples >= 3, got " + std::to_string(config.project.n_samples));
  const ModelVariant m = load_checkpoint(checkpoint);
  const SplitManifest manifest = load_manifest(config);
  const FaceLoader loader(manifest, m.model.config().input_side, make_detector(config));
  const auto n = static_cast<std::size_t>(config.project.n_samples);
  const int fpv = config.evaluation.frames_per_video;
  auto faces = load_split_faces(loader, Split::Test, fpv, n / 2, Label::Real);
  auto fakes = load_split_faces(loader, Split::Test, fpv, n - faces.size(), Label::Fake);
  faces.insert(faces.end(), std::make_move_iterator(fakes.begin()), std::make_move_iterator(fakes.end()));
  FACEFORGE_CHECK(faces.size() >= 3, ErrorKind::InvalidArgument, "fewer than 3 test faces available to project");
  const Tensor<float> features = m.model.forward_features(faces);
  const std::vector<double> flat(features.data.begin(), features.data.end());
  const auto points = project_features(flat, features.c);
  std::vector<int> labels;
  for (const auto& f : faces) labels.push_back(static_cast<int>(f.label));
  ProjectOutput out;
  out.csv = config.out_dir / ("projection_" + std::string(to_string(m.name)) + ".csv");
  std::ofstream csv(out.csv);
  FACEFORGE_CHECK(csv.good(), ErrorKind::Io, "cannot write '" + out.csv.string() + "'");
  csv << "video_id,frame_index,label,x,y\n";
  for (std::size_t i = 0; i < faces.size(); ++i) {
    csv << faces[i].video_id << ',' << faces[i].frame_index << ',' << labels[i] << ',' << g17(points[2 * i]) << ','
        << g17(points[2 * i + 1]) << '\n';
  }
  const bool both = std::count(labels.begin(), labels.end(), 1) > 0 && std::count(labels.begin(), labels.end(), 0) > 0;
  out.silhouette = both ? silhouette_score(flat, features.c, labels) : 0.0;
  log << "projected " << faces.size() << " faces to " << out.csv.string() << "; feature silhouette "
      << out.silhouette << '\n';
  return out;
}

std::vector<FpvRun> cmd_fpv_sweep(const RunConfig& config, const std::vector<int>& fpv_list, std::ostream& log) {
  FACEFORGE_CHECK(!fpv_list.empty(), ErrorKind::InvalidArgument, "fpv list is empty");
  for (int fpv : fpv_list)
    FACEFORGE_CHECK(fpv >= 1, ErrorKind::InvalidArgument, "frames per video must be positive, got " + std::to_string(fpv));
  require_dir(config.out_dir, "output directory");
  const SplitManifest manifest = load_manifest(config);
  const FaceLoader loader(manifest, config.backbone.input_side, make_detector(config));
  std::vector<FpvRun> runs;
  for (int fpv : fpv_list) {
    TrainConfig train = config.train;
    train.frames_per_video = fpv;
    TrainResult result =
        train_end_to_end(Model<float>(config.backbone_for(Variant::B), config.stream_seed("model")), loader, train,
                         config.augment);
    FpvRun run;
    run.fpv = fpv;
    run.history = config.out_dir / ("fpv_" + std::to_string(fpv) + "_history.csv");
    write_history_csv(run.history, result.state.history);
    const auto& h = result.state.history;
    const std::size_t tail = std::max<std::size_t>(1, h.size() / 10);
    for (std::size_t i = h.size() - tail; i < h.size(); ++i) run.final_train_loss += h[i].train_loss;
    run.final_train_loss /= static_cast<double>(tail);
    run.best_val_loss = result.state.best_val_loss;
    log << "fpv " << fpv << ": final train loss " << run.final_train_loss << ", best val loss " << run.best_val_loss
        << '\n';
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace faceforge
