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

#include "faceforge/training.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "faceforge/error.hpp"
#include "faceforge/losses.hpp"

namespace faceforge {

void TrainConfig::validate() const {
  FACEFORGE_CHECK(max_iterations >= 0, ErrorKind::InvalidArgument, "max_iterations must be >= 0");
  FACEFORGE_CHECK(val_every > 0 && val_samples > 0 && batch_per_class > 0 && triplets_per_batch > 0,
                  ErrorKind::InvalidArgument, "validation and batch sizes must be positive");
  FACEFORGE_CHECK(triplets_per_batch % 2 == 0, ErrorKind::InvalidArgument, "triplets_per_batch must be even");
  FACEFORGE_CHECK(initial_lr >= 0.0 && min_lr > 0.0 && min_lr < initial_lr, ErrorKind::InvalidArgument,
                  "learning rates must satisfy 0 < min_lr < initial_lr");
  FACEFORGE_CHECK(lr_factor > 0.0 && lr_factor < 1.0, ErrorKind::InvalidArgument, "lr_factor must lie in (0, 1)");
  FACEFORGE_CHECK(plateau_patience > 0, ErrorKind::InvalidArgument, "plateau_patience must be positive");
  FACEFORGE_CHECK(margin > 0.0, ErrorKind::InvalidArgument, "margin must be positive");
  FACEFORGE_CHECK(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && adam_epsilon > 0.0,
                  ErrorKind::InvalidArgument, "invalid Adam hyperparameters");
  FACEFORGE_CHECK(frames_per_video > 0 && val_frames_per_video > 0, ErrorKind::InvalidArgument,
                  "frames per video must be positive");
}

TrainState TrainState::initial(const TrainConfig& config) {
  TrainState s;
  s.current_lr = config.initial_lr;
  return s;
}

TrainState lr_schedule_step(TrainState state, double val_loss, const TrainConfig& config) {
  FACEFORGE_CHECK(!std::isnan(val_loss), ErrorKind::Numeric, "validation loss is NaN");
  if (val_loss < state.best_val_loss) {
    state.best_val_loss = val_loss;
    state.validations_since_improvement = 0;
  } else if (++state.validations_since_improvement >= config.plateau_patience) {
    state.current_lr *= config.lr_factor;
    state.validations_since_improvement = 0;
  }
  if (state.current_lr < config.min_lr) state.stopped = true;
  return state;
}

Adam::Adam(std::vector<Parameter<float>*> params, double beta1, double beta2, double epsilon)
    : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  for (auto* p : params_) {
    m_.emplace_back(p->size(), 0.0);
    v_.emplace_back(p->size(), 0.0);
  }
}

void Adam::step(double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto& p = *params_[k];
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grad[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
      const double update = lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps_);
      p.value[i] = static_cast<float>(p.value[i] - update);
    }
  }
}

namespace {

std::vector<FaceCrop> load_augmented(const FaceLoader& loader, const FramePlan& plan, const std::vector<FrameRef>& refs,
                                     const AugmentConfig& aug_config, std::uint64_t seed, std::string_view stream,
                                     std::uint64_t index) {
  std::vector<FaceCrop> faces(refs.size());
  parallel_for(refs.size(), [&](std::size_t i) {
    Rng rng = Rng::stream(seed, stream, index, i);
    FrameRef ref = refs[i];
    std::optional<FaceCrop> face = loader.load(ref.record, ref.frame_index);
    for (int attempt = 0; !face && attempt < 64; ++attempt) {
      const auto& frames = plan.frames(ref.record);
      ref.frame_index = frames[rng.below(frames.size())];
      face = loader.load(ref.record, ref.frame_index);
    }
    FACEFORGE_CHECK(face.has_value(), ErrorKind::State,
                    "no loadable face in video '" + loader.manifest().records[ref.record].video_id + "'");
    faces[i] = augment(*face, aug_config, rng);
  });
  return faces;
}

std::vector<FrameRef> flatten(const std::vector<TripletRef>& triplets) {
  // Rows: all anchors, then all positives, then all negatives.
  std::vector<FrameRef> out;
  out.reserve(triplets.size() * 3);
  for (const auto& t : triplets) out.push_back(t.anchor);
  for (const auto& t : triplets) out.push_back(t.positive);
  for (const auto& t : triplets) out.push_back(t.negative);
  return out;
}

std::vector<int> labels_of(const std::vector<FrameRef>& refs) {
  std::vector<int> y;
  y.reserve(refs.size());
  for (const auto& r : refs) y.push_back(static_cast<int>(r.label));
  return y;
}

void require_splits(const SplitManifest& m, int per_class) {
  for (Split s : {Split::Train, Split::Val}) {
    for (Label l : {Label::Real, Label::Fake}) {
      FACEFORGE_CHECK(m.count(s, l) >= static_cast<std::size_t>(per_class), ErrorKind::InvalidArgument,
                      std::string("split ") + std::string(to_string(s)) + " needs at least " +
                          std::to_string(per_class) + (l == Label::Real ? " REAL" : " FAKE") + " video(s)");
    }
  }
}

double logloss_on(const Model<float>& model, const std::vector<FaceCrop>& faces, const std::vector<int>& labels) {
  const auto logits = model.forward_logit(faces);
  const std::vector<double> scores(logits.begin(), logits.end());
  return logloss(scores, labels);
}

double triplet_loss_on(const Model<float>& model, const std::vector<FaceCrop>& faces, double margin) {
  const Tensor<float> f = model.forward_features(faces);
  const std::size_t n = faces.size() / 3;
  const std::size_t d = static_cast<std::size_t>(f.c);
  const std::vector<double> all(f.data.begin(), f.data.end());
  const std::span<const double> s(all);
  return triplet_margin_loss_batch(s.subspan(0, n * d), s.subspan(n * d, n * d), s.subspan(2 * n * d, n * d),
                                   f.c, margin);
}

// Shared loop: step(iteration, lr) runs one optimizer update and returns the
// batch loss; validate() evaluates the fixed validation set.
TrainResult run_loop(Model<float>& model, const TrainConfig& config, const std::function<double(int, double)>& step,
                     const std::function<double()>& validate) {
  TrainResult result{model, TrainState::initial(config)};
  TrainState& state = result.state;
  for (int it = 1; it <= config.max_iterations && !state.stopped; ++it) {
    const double lr = state.current_lr;
    const double train_loss = step(it, lr);
    FACEFORGE_CHECK(std::isfinite(train_loss), ErrorKind::Numeric,
                    "non-finite training loss at iteration " + std::to_string(it));
    state.iteration = it;
    HistoryEntry entry{it, train_loss, std::nullopt, lr};
    if (it % config.val_every == 0 || it == config.max_iterations) {
      const double val_loss = validate();
      FACEFORGE_CHECK(std::isfinite(val_loss), ErrorKind::Numeric,
                      "non-finite validation loss at iteration " + std::to_string(it));
      const double previous_best = state.best_val_loss;
      state = lr_schedule_step(std::move(state), val_loss, config);
      if (val_loss < previous_best) result.best = model;
      entry.val_loss = val_loss;
    }
    state.history.push_back(entry);
  }
  if (state.iteration == config.max_iterations) state.stopped = true;
  return result;
}

struct ValidationSet {
  std::vector<FaceCrop> faces;
  std::vector<int> labels;
};

ValidationSet balanced_validation_set(const FaceLoader& loader, const TrainConfig& config,
                                      const AugmentConfig& augment) {
  const FramePlan plan(loader.manifest(), config.val_frames_per_video);
  Rng rng = Rng::stream(config.seed, "val.plan");
  const auto refs = plan_balanced_batch(loader.manifest(), plan, Split::Val, std::max(1, config.val_samples / 2), rng);
  return {load_augmented(loader, plan, refs, augment, config.seed, "val.augment", 0), labels_of(refs)};
}

// One LogLoss update; only the parameters owned by `adam` move.
double logloss_step(Model<float>& model, Adam& adam, bool backprop_encoder, const FaceLoader& loader,
                    const FramePlan& plan, const TrainConfig& config, const AugmentConfig& augment, int it,
                    double lr) {
  Rng rng = Rng::stream(config.seed, "train.batch", static_cast<std::uint64_t>(it));
  const auto refs = plan_balanced_batch(loader.manifest(), plan, Split::Train, config.batch_per_class, rng);
  const auto faces =
      load_augmented(loader, plan, refs, augment, config.seed, "train.augment", static_cast<std::uint64_t>(it));
  const auto labels = labels_of(refs);
  model.zero_grad();
  typename Model<float>::Tape tape;
  const Tensor<float> input = to_input<float>(faces, model.config().input_side);
  const Tensor<float> features = model.forward(input, backprop_encoder ? &tape : nullptr);
  const auto logits_f = model.classify(features);
  const std::vector<double> logits(logits_f.begin(), logits_f.end());
  std::vector<double> grad(logits.size());
  const double loss = logloss_with_grad(logits, labels, grad);
  const std::vector<float> grad_f(grad.begin(), grad.end());
  Tensor<float> dfeatures;
  model.backward_classifier(features, grad_f, backprop_encoder ? &dfeatures : nullptr);
  if (backprop_encoder) model.backward(tape, dfeatures);
  adam.step(lr);
  return loss;
}

}  // namespace

TrainResult train_end_to_end(Model<float> model, const FaceLoader& loader, const TrainConfig& config,
                             const AugmentConfig& augment) {
  config.validate();
  augment.validate();
  require_splits(loader.manifest(), 1);
  const FramePlan plan(loader.manifest(), config.frames_per_video);
  const ValidationSet val = balanced_validation_set(loader, config, augment);

  std::vector<Parameter<float>*> params;
  for (auto& p : model.parameters()) params.push_back(&p);
  Adam adam(params, config.beta1, config.beta2, config.adam_epsilon);
  return run_loop(
      model, config,
      [&](int it, double lr) { return logloss_step(model, adam, true, loader, plan, config, augment, it, lr); },
      [&] { return logloss_on(model, val.faces, val.labels); });
}

TrainResult finetune_classifier(Model<float> encoder, const FaceLoader& loader, const TrainConfig& config,
                                const AugmentConfig& augment) {
  config.validate();
  augment.validate();
  require_splits(loader.manifest(), 1);
  const FramePlan plan(loader.manifest(), config.frames_per_video);
  const ValidationSet val = balanced_validation_set(loader, config, augment);

  std::vector<Parameter<float>*> params{&encoder.parameter("classifier.weight"), &encoder.parameter("classifier.bias")};
  Adam adam(params, config.beta1, config.beta2, config.adam_epsilon);
  return run_loop(
      encoder, config,
      [&](int it, double lr) { return logloss_step(encoder, adam, false, loader, plan, config, augment, it, lr); },
      [&] { return logloss_on(encoder, val.faces, val.labels); });
}

TrainResult train_siamese(Model<float> model, const FaceLoader& loader, const TrainConfig& config,
                          const AugmentConfig& augment) {
  config.validate();
  augment.validate();
  const SplitManifest& manifest = loader.manifest();
  require_splits(manifest, 2);
  const FramePlan plan(manifest, config.frames_per_video);
  const FramePlan val_plan(manifest, config.val_frames_per_video);

  Rng val_rng = Rng::stream(config.seed, "val.triplets");
  const int val_triplets = std::max(2, (config.val_samples / 3) & ~1);
  const auto val_refs = flatten(plan_triplet_batch(manifest, val_plan, Split::Val, val_triplets, val_rng));
  const auto val_faces = load_augmented(loader, val_plan, val_refs, augment, config.seed, "val.augment", 1);

  std::vector<Parameter<float>*> params;
  for (auto& p : model.parameters()) {
    if (parameter_group(p.name) != "classifier") params.push_back(&p);
  }
  Adam adam(params, config.beta1, config.beta2, config.adam_epsilon);

  auto step = [&](int it, double lr) {
    Rng rng = Rng::stream(config.seed, "train.triplets", static_cast<std::uint64_t>(it));
    const auto refs = flatten(plan_triplet_batch(manifest, plan, Split::Train, config.triplets_per_batch, rng));
    const auto faces =
        load_augmented(loader, plan, refs, augment, config.seed, "train.augment", static_cast<std::uint64_t>(it));
    model.zero_grad();
    typename Model<float>::Tape tape;
    const Tensor<float> f = model.forward(to_input<float>(faces, model.config().input_side), &tape);
    const std::size_t n = refs.size() / 3;
    const std::size_t d = static_cast<std::size_t>(f.c);
    const std::vector<double> all(f.data.begin(), f.data.end());
    std::vector<double> grad(all.size());
    const std::span<const double> s(all);
    const std::span<double> g(grad);
    const double loss =
        triplet_margin_loss_batch(s.subspan(0, n * d), s.subspan(n * d, n * d), s.subspan(2 * n * d, n * d), f.c,
                                  config.margin, g.subspan(0, n * d), g.subspan(n * d, n * d), g.subspan(2 * n * d, n * d));
    Tensor<float> df(f.n, f.c, 1, 1);
    std::copy(grad.begin(), grad.end(), df.data.begin());
    model.backward(tape, df);
    adam.step(lr);
    return loss;
  };
  return run_loop(model, config, step, [&] { return triplet_loss_on(model, val_faces, config.margin); });
}

void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryEntry>& history) {
  std::ofstream out(path);
  FACEFORGE_CHECK(out.good(), ErrorKind::Io, "cannot write history '" + path.string() + "'");
  out << "iteration,train_loss,val_loss,lr\n";
  char buf[128];
  for (const auto& h : history) {
    out << h.iteration << ',';
    std::snprintf(buf, sizeof buf, "%.17g", h.train_loss);
    out << buf << ',';
    if (h.val_loss) {
      std::snprintf(buf, sizeof buf, "%.17g", *h.val_loss);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", h.lr);
    out << ',' << buf << '\n';
  }
  FACEFORGE_CHECK(out.good(), ErrorKind::Io, "error writing history '" + path.string() + "'");
}

std::vector<HistoryEntry> read_history_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  FACEFORGE_CHECK(in.good(), ErrorKind::Io, "cannot open history '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  FACEFORGE_CHECK(line == "iteration,train_loss,val_loss,lr", ErrorKind::Format, "unexpected history header");
  std::vector<HistoryEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string it, tl, vl, lr;
    std::getline(ss, it, ',');
    std::getline(ss, tl, ',');
    std::getline(ss, vl, ',');
    std::getline(ss, lr, ',');
    HistoryEntry h;
    h.iteration = std::stoi(it);
    h.train_loss = std::stod(tl);
    if (!vl.empty()) h.val_loss = std::stod(vl);
    h.lr = std::stod(lr);
    out.push_back(h);
  }
  return out;
}

}  // namespace faceforge
