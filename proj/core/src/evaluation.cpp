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

#include "faceforge/evaluation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "faceforge/error.hpp"
#include "faceforge/losses.hpp"

namespace faceforge {

void ScoreTable::add(ScoreRow row, Label label) {
  auto key = std::make_tuple(row.video_id, row.frame_index, row.model_id);
  FACEFORGE_CHECK(!keys_.count(key), ErrorKind::InvalidArgument,
                  "duplicate score for video '" + row.video_id + "' frame " + std::to_string(row.frame_index) +
                      " model '" + row.model_id + "'");
  auto [it, inserted] = labels_.emplace(row.video_id, label);
  FACEFORGE_CHECK(inserted || it->second == label, ErrorKind::InvalidArgument,
                  "conflicting labels for video '" + row.video_id + "'");
  keys_.insert(std::move(key));
  rows_.push_back(std::move(row));
}

Label ScoreTable::label_of(const std::string& video_id) const {
  auto it = labels_.find(video_id);
  FACEFORGE_CHECK(it != labels_.end(), ErrorKind::InvalidArgument, "no label for video '" + video_id + "'");
  return it->second;
}

std::set<std::string> ScoreTable::model_ids() const {
  std::set<std::string> ids;
  for (const auto& r : rows_) ids.insert(r.model_id);
  return ids;
}

void ScoreTable::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  FACEFORGE_CHECK(out.good(), ErrorKind::Io, "cannot write scores '" + path.string() + "'");
  out << "video_id,frame_index,model_id,logit,label\n";
  char buf[64];
  for (const auto& r : rows_) {
    std::snprintf(buf, sizeof buf, "%.17g", r.logit);
    out << r.video_id << ',' << r.frame_index << ',' << r.model_id << ',' << buf << ','
        << static_cast<int>(label_of(r.video_id)) << '\n';
  }
  FACEFORGE_CHECK(out.good(), ErrorKind::Io, "error writing scores '" + path.string() + "'");
}

ScoreTable ScoreTable::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  FACEFORGE_CHECK(in.good(), ErrorKind::Io, "cannot open scores '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  FACEFORGE_CHECK(line == "video_id,frame_index,model_id,logit,label", ErrorKind::Format, "unexpected score header");
  ScoreTable t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string vid, frame, model, logit, label;
    std::getline(ss, vid, ',');
    std::getline(ss, frame, ',');
    std::getline(ss, model, ',');
    std::getline(ss, logit, ',');
    std::getline(ss, label, ',');
    try {
      t.add(ScoreRow{vid, std::stoi(frame), model, std::stod(logit)}, static_cast<Label>(std::stoi(label)));
    } catch (const std::logic_error& e) {
      throw Error(ErrorKind::Format, "bad score row '" + line + "'");
    }
  }
  return t;
}

ScoreTable score_frames(std::span<const ScoredModel> models, const FaceLoader& loader, Split split,
                        int frames_per_video) {
  std::set<std::string> ids;
  for (const auto& m : models) {
    FACEFORGE_CHECK(m.model != nullptr, ErrorKind::InvalidArgument, "null model '" + m.model_id + "'");
    FACEFORGE_CHECK(ids.insert(m.model_id).second, ErrorKind::InvalidArgument,
                    "model '" + m.model_id + "' listed twice");
  }
  const SplitManifest& manifest = loader.manifest();
  const auto videos = manifest.indices(split);
  FACEFORGE_CHECK(!videos.empty(), ErrorKind::InvalidArgument,
                  std::string("split ") + std::string(to_string(split)) + " is empty");
  const FramePlan plan(manifest, frames_per_video);

  // Load in parallel, score in order.
  std::vector<std::vector<FaceCrop>> faces(videos.size());
  parallel_for(videos.size(), [&](std::size_t v) {
    for (int f : plan.frames(videos[v])) {
      if (auto face = loader.load(videos[v], f)) faces[v].push_back(std::move(*face));
    }
  });
  ScoreTable table;
  for (std::size_t v = 0; v < videos.size(); ++v) {
    const VideoRecord& record = manifest.records[videos[v]];
    if (faces[v].empty()) {
      std::cerr << "warning: no face found in any frame of '" << record.video_id << "', video skipped\n";
      continue;
    }
    for (const auto& m : models) {
      const auto logits = m.model->forward_logit(faces[v]);
      for (std::size_t k = 0; k < faces[v].size(); ++k) {
        table.add(ScoreRow{record.video_id, faces[v][k].frame_index, m.model_id, static_cast<double>(logits[k])},
                  record.label);
      }
    }
  }
  return table;
}

std::vector<FusedScore> ensemble_scores(const ScoreTable& table, const std::vector<std::string>& subset) {
  FACEFORGE_CHECK(!subset.empty(), ErrorKind::InvalidArgument, "ensemble subset must not be empty");
  const std::set<std::string> members(subset.begin(), subset.end());
  FACEFORGE_CHECK(members.size() == subset.size(), ErrorKind::InvalidArgument, "ensemble subset has duplicates");
  std::map<std::pair<std::string, int>, std::pair<double, std::size_t>> acc;
  std::set<std::pair<std::string, int>> frames;
  for (const auto& r : table.rows()) {
    auto key = std::make_pair(r.video_id, r.frame_index);
    frames.insert(key);
    if (!members.count(r.model_id)) continue;
    auto& [sum, n] = acc[key];
    sum += sigmoid(r.logit);
    ++n;
  }
  std::vector<FusedScore> out;
  out.reserve(frames.size());
  for (const auto& key : frames) {
    auto it = acc.find(key);
    FACEFORGE_CHECK(it != acc.end() && it->second.second == members.size(), ErrorKind::InvalidArgument,
                    "frame " + std::to_string(key.second) + " of '" + key.first + "' lacks a score for some model");
    const double p = it->second.first / static_cast<double>(members.size());
    out.push_back(FusedScore{key.first, key.second, table.label_of(key.first),
                             std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon)});
  }
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  FACEFORGE_CHECK(scores.size() == labels.size(), ErrorKind::ShapeMismatch, "roc_auc: scores and labels differ");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Doubled midranks keep the statistic integral.
  std::int64_t rank_sum2 = 0, n_fake = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const auto midrank2 = static_cast<std::int64_t>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      const int y = labels[order[k]];
      FACEFORGE_CHECK(y == 0 || y == 1, ErrorKind::InvalidArgument, "labels must be 0 or 1");
      if (y == 1) {
        rank_sum2 += midrank2;
        ++n_fake;
      }
    }
    i = j;
  }
  const std::int64_t n_real = static_cast<std::int64_t>(n) - n_fake;
  FACEFORGE_CHECK(n_fake > 0 && n_real > 0, ErrorKind::InvalidArgument, "roc_auc needs both classes");
  const std::int64_t u2 = rank_sum2 - n_fake * (n_fake + 1);
  return static_cast<double>(u2) / (2.0 * static_cast<double>(n_fake) * static_cast<double>(n_real));
}

std::string EnsembleResult::subset_name() const {
  std::string s;
  for (const auto& id : subset) s += (s.empty() ? "" : "+") + id;
  return s;
}

std::vector<std::vector<std::string>> all_subsets(std::vector<std::string> model_ids) {
  std::sort(model_ids.begin(), model_ids.end());
  FACEFORGE_CHECK(std::adjacent_find(model_ids.begin(), model_ids.end()) == model_ids.end(),
                  ErrorKind::InvalidArgument, "duplicate model id in subset enumeration");
  FACEFORGE_CHECK(!model_ids.empty() && model_ids.size() < 24, ErrorKind::InvalidArgument,
                  "all_subsets needs between 1 and 23 models");
  std::vector<std::vector<std::string>> out;
  const std::uint32_t n = static_cast<std::uint32_t>(model_ids.size());
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::string> s;
    for (std::uint32_t k = 0; k < n; ++k)
      if (mask & (1u << k)) s.push_back(model_ids[k]);
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

std::vector<EnsembleResult> evaluate_subsets(const ScoreTable& table, const std::vector<std::vector<std::string>>& subsets) {
  std::vector<EnsembleResult> out;
  for (auto subset : subsets) {
    std::sort(subset.begin(), subset.end());
    const auto fused = ensemble_scores(table, subset);
    std::vector<double> p;
    std::vector<int> y;
    for (const auto& f : fused) {
      p.push_back(f.probability);
      y.push_back(static_cast<int>(f.label));
    }
    out.push_back(EnsembleResult{subset, roc_auc(p, y), logloss_from_probabilities(p, y)});
  }
  return out;
}

void write_results_csv(const std::filesystem::path& path, const std::vector<EnsembleResult>& results) {
  std::ofstream out(path);
  FACEFORGE_CHECK(out.good(), ErrorKind::Io, "cannot write results '" + path.string() + "'");
  out << "subset,auc,logloss\n";
  char buf[96];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.auc, r.logloss);
    out << r.subset_name() << ',' << buf << '\n';
  }
}

std::vector<PairwiseRow> export_pairwise_scores(const ScoreTable& table, const std::string& model_a,
                                                const std::string& model_b) {
  const auto a = ensemble_scores(table, {model_a});
  const auto b = ensemble_scores(table, {model_b});
  std::vector<PairwiseRow> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(PairwiseRow{a[i].probability, b[i].probability, a[i].label});
  return out;
}

void write_pairwise_csv(const std::filesystem::path& path, const std::string& model_a, const std::string& model_b,
                        const std::vector<PairwiseRow>& rows) {
  std::ofstream out(path);
  FACEFORGE_CHECK(out.good(), ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << "p_" << model_a << ",p_" << model_b << ",label\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.p_a, r.p_b);
    out << buf << ',' << static_cast<int>(r.label) << '\n';
  }
}

std::vector<double> project_features(std::span<const double> features, int dim) {
  FACEFORGE_CHECK(dim >= 1 && features.size() % static_cast<std::size_t>(dim) == 0, ErrorKind::ShapeMismatch,
                  "features are not a whole number of rows");
  const auto n = static_cast<Eigen::Index>(features.size() / static_cast<std::size_t>(dim));
  FACEFORGE_CHECK(n >= 3, ErrorKind::InvalidArgument, "projection needs at least 3 samples");
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat x = Eigen::Map<const RowMat>(features.data(), n, dim);
  x.rowwise() -= x.colwise().mean();
  FACEFORGE_CHECK(x.cwiseAbs().maxCoeff() > 0.0, ErrorKind::InvalidArgument,
                  "features have zero variance; projection undefined");
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  // Eigenvalues ascend; take the last two columns.
  Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(dim, 2);
  for (int k = 0; k < std::min(2, dim); ++k) {
    Eigen::VectorXd v = eig.eigenvectors().col(dim - 1 - k);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    axes.col(k) = v;
  }
  const Eigen::MatrixXd coords = x * axes;
  std::vector<double> out(static_cast<std::size_t>(n) * 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(2 * i)] = coords(i, 0);
    out[static_cast<std::size_t>(2 * i + 1)] = coords(i, 1);
  }
  return out;
}

double silhouette_score(std::span<const double> points, int dim, std::span<const int> labels) {
  const std::size_t d = static_cast<std::size_t>(dim);
  const std::size_t n = labels.size();
  FACEFORGE_CHECK(points.size() == n * d && n >= 2, ErrorKind::ShapeMismatch, "silhouette: bad input shape");
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double t = points[i * d + k] - points[j * d + k];
      s += t * t;
    }
    return std::sqrt(s);
  };
  std::map<int, std::size_t> sizes;
  for (int y : labels) ++sizes[y];
  FACEFORGE_CHECK(sizes.size() >= 2, ErrorKind::InvalidArgument, "silhouette needs at least two clusters");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::map<int, double> sum;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) sum[labels[j]] += dist(i, j);
    const std::size_t own = sizes[labels[i]];
    if (own <= 1) continue;  // singleton clusters score 0
    const double a = sum[labels[i]] / static_cast<double>(own - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, count] : sizes)
      if (label != labels[i]) b = std::min(b, sum[label] / static_cast<double>(count));
    const double m = std::max(a, b);
    total += m > 0.0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(n);
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  FACEFORGE_CHECK(a.size() == b.size() && a.size() >= 2, ErrorKind::ShapeMismatch, "correlation: bad input");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  FACEFORGE_CHECK(saa > 0.0 && sbb > 0.0, ErrorKind::Numeric, "correlation undefined for constant input");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace faceforge
