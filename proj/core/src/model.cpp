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

#include "faceforge/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "faceforge/error.hpp"
#include "faceforge/rng.hpp"

namespace faceforge {

using nlohmann::json;

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::B: return "B";
    case Variant::BAtt: return "BAtt";
    case Variant::BST: return "BST";
    case Variant::BAttST: return "BAttST";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  for (Variant v : {Variant::B, Variant::BAtt, Variant::BST, Variant::BAttST})
    if (to_string(v) == text) return v;
  throw Error(ErrorKind::InvalidArgument, "unknown variant '" + std::string(text) + "' (expected B, BAtt, BST or BAttST)");
}

std::string_view to_string(TrainingMode m) { return m == TrainingMode::EndToEnd ? "end2end" : "siamese"; }

TrainingMode parse_training_mode(std::string_view text) {
  if (text == "end2end") return TrainingMode::EndToEnd;
  if (text == "siamese") return TrainingMode::Siamese;
  throw Error(ErrorKind::Format, "unknown training mode '" + std::string(text) + "'");
}

bool has_attention(Variant v) { return v == Variant::BAtt || v == Variant::BAttST; }
bool is_siamese(Variant v) { return v == Variant::BST || v == Variant::BAttST; }

// ---------------------------------------------------------------------------

void BackboneConfig::validate() const {
  FACEFORGE_CHECK(input_side > 0 && stem_channels > 0 && stem_stride > 0, ErrorKind::InvalidArgument,
                  "backbone input_side, stem_channels and stem_stride must be positive");
  FACEFORGE_CHECK(input_side % stem_stride == 0, ErrorKind::InvalidArgument,
                  "input_side must be divisible by stem_stride");
  FACEFORGE_CHECK(!stages.empty(), ErrorKind::InvalidArgument, "backbone needs at least one stage");
  int side = stem_output_side();
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const auto& st = stages[s];
    FACEFORGE_CHECK(st.n_blocks >= 1 && st.out_channels >= 1 && st.stride >= 1 && st.expansion_ratio >= 1.0,
                    ErrorKind::InvalidArgument, "stage " + std::to_string(s) + " has invalid parameters");
    FACEFORGE_CHECK(side % st.stride == 0, ErrorKind::InvalidArgument,
                    "stage " + std::to_string(s) + " stride does not divide its input side " + std::to_string(side));
    side /= st.stride;
  }
  if (attention_stage) {
    FACEFORGE_CHECK(*attention_stage >= 0 && *attention_stage < static_cast<int>(stages.size()),
                    ErrorKind::InvalidArgument, "attention_stage is not a valid stage index");
  }
  FACEFORGE_CHECK(feature_dim >= 1, ErrorKind::InvalidArgument, "feature_dim must be >= 1");
  FACEFORGE_CHECK(n_classes == 1, ErrorKind::InvalidArgument, "only a single-logit head is supported");
}

int BackboneConfig::stage_output_side(int stage) const {
  int side = stem_output_side();
  for (int s = 0; s <= stage; ++s) side /= stages.at(static_cast<std::size_t>(s)).stride;
  return side;
}

int BackboneConfig::stage_input_channels(int stage) const {
  return stage == 0 ? stem_channels : stages.at(static_cast<std::size_t>(stage - 1)).out_channels;
}

namespace {

json backbone_to_json(const BackboneConfig& c) {
  json stages = json::array();
  for (const auto& s : c.stages) {
    stages.push_back({{"n_blocks", s.n_blocks},
                      {"out_channels", s.out_channels},
                      {"stride", s.stride},
                      {"expansion_ratio", s.expansion_ratio}});
  }
  return json{{"input_side", c.input_side},
              {"stem_channels", c.stem_channels},
              {"stem_stride", c.stem_stride},
              {"stages", stages},
              {"attention_stage", c.attention_stage ? json(*c.attention_stage) : json(nullptr)},
              {"feature_dim", c.feature_dim},
              {"n_classes", c.n_classes}};
}

}  // namespace

std::string BackboneConfig::to_json() const { return backbone_to_json(*this).dump(); }

BackboneConfig BackboneConfig::from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    BackboneConfig c;
    c.input_side = j.value("input_side", c.input_side);
    c.stem_channels = j.value("stem_channels", c.stem_channels);
    c.stem_stride = j.value("stem_stride", c.stem_stride);
    if (j.contains("stages")) {
      c.stages.clear();
      for (const auto& s : j.at("stages")) {
        c.stages.push_back(StageConfig{s.at("n_blocks").get<int>(), s.at("out_channels").get<int>(),
                                       s.at("stride").get<int>(), s.value("expansion_ratio", 4.0)});
      }
    }
    if (j.contains("attention_stage") && !j["attention_stage"].is_null())
      c.attention_stage = j["attention_stage"].get<int>();
    c.feature_dim = j.value("feature_dim", c.feature_dim);
    c.n_classes = j.value("n_classes", c.n_classes);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, std::string("invalid backbone config: ") + e.what());
  }
}

std::uint64_t BackboneConfig::hash() const { return hash_string(to_json()); }

BackboneConfig BackboneConfig::toy(int input_side, int feature_dim, bool attention) {
  BackboneConfig c;
  c.input_side = input_side;
  c.feature_dim = feature_dim;
  if (attention) c.attention_stage = 2;
  c.validate();
  return c;
}

BackboneConfig BackboneConfig::paper_scale(bool attention) {
  BackboneConfig c;
  c.input_side = 224;
  c.stem_channels = 48;
  c.stem_stride = 2;
  c.stages = {{2, 24, 1, 1.0}, {4, 32, 2, 6.0}, {4, 56, 2, 6.0}, {6, 112, 2, 6.0},
              {6, 160, 1, 6.0}, {8, 272, 2, 6.0}, {2, 448, 1, 6.0}};
  if (attention) c.attention_stage = 2;
  c.feature_dim = 1792;
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------

template <typename T>
int Model<T>::add_parameter(const std::string& name, std::vector<int> shape, double stddev, std::uint64_t seed) {
  Parameter<T> p;
  p.name = name;
  p.shape = std::move(shape);
  std::size_t n = 1;
  for (int d : p.shape) n *= static_cast<std::size_t>(d);
  p.value.assign(n, T(0));
  p.grad.assign(n, T(0));
  if (stddev > 0.0) {
    // Per-name streams: adding the attention block leaves every other
    // parameter's initialization unchanged.
    Rng rng = Rng::stream(seed, name);
    for (auto& v : p.value) v = static_cast<T>(stddev * rng.normal());
  }
  params_.push_back(std::move(p));
  return static_cast<int>(params_.size() - 1);
}

template <typename T>
Model<T>::Model(BackboneConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  const int sc = config_.stem_channels;
  stem_w_ = add_parameter("stem.weight", {sc, 3, 3, 3}, std::sqrt(2.0 / 27.0), seed);
  stem_b_ = add_parameter("stem.bias", {sc}, 0.0, seed);
  int cin = sc;
  for (int s = 0; s < static_cast<int>(config_.stages.size()); ++s) {
    const auto& st = config_.stages[static_cast<std::size_t>(s)];
    for (int b = 0; b < st.n_blocks; ++b) {
      BlockLayout L{};
      L.stage = s;
      L.index = b;
      L.cin = cin;
      L.cout = st.out_channels;
      L.stride = b == 0 ? st.stride : 1;
      L.expand = st.expansion_ratio != 1.0;
      L.cexp = L.expand ? static_cast<int>(std::lround(cin * st.expansion_ratio)) : cin;
      L.residual = L.stride == 1 && L.cin == L.cout;
      const std::string prefix = "stages." + std::to_string(s) + "." + std::to_string(b) + ".";
      if (L.expand) {
        L.expand_w = add_parameter(prefix + "expand.weight", {L.cexp, cin}, std::sqrt(2.0 / cin), seed);
        L.expand_b = add_parameter(prefix + "expand.bias", {L.cexp}, 0.0, seed);
      }
      L.dw_w = add_parameter(prefix + "depthwise.weight", {L.cexp, 3, 3}, std::sqrt(2.0 / 9.0), seed);
      L.dw_b = add_parameter(prefix + "depthwise.bias", {L.cexp}, 0.0, seed);
      // Residual branches start small so deep stacks stay well scaled.
      const double proj_scale = L.residual ? 0.5 : 1.0;
      L.proj_w = add_parameter(prefix + "project.weight", {L.cout, L.cexp}, proj_scale * std::sqrt(1.0 / L.cexp), seed);
      L.proj_b = add_parameter(prefix + "project.bias", {L.cout}, 0.0, seed);
      blocks_.push_back(L);
      cin = L.cout;
    }
    if (config_.attention_stage && *config_.attention_stage == s) {
      attn_w_ = add_parameter("attention.weight", {1, cin}, 0.0, seed);
      attn_b_ = add_parameter("attention.bias", {1}, 0.0, seed);
    }
  }
  head_w_ = add_parameter("head.weight", {config_.feature_dim, cin}, std::sqrt(2.0 / cin), seed);
  head_b_ = add_parameter("head.bias", {config_.feature_dim}, 0.0, seed);
  cls_w_ = add_parameter("classifier.weight", {1, config_.feature_dim}, 0.01, seed);
  cls_b_ = add_parameter("classifier.bias", {1}, 0.0, seed);
}

template <typename T>
Parameter<T>& Model<T>::parameter(std::string_view name) {
  for (auto& p : params_)
    if (p.name == name) return p;
  throw Error(ErrorKind::InvalidArgument, "no parameter named '" + std::string(name) + "'");
}

template <typename T>
const Parameter<T>& Model<T>::parameter(std::string_view name) const {
  return const_cast<Model<T>*>(this)->parameter(name);
}

template <typename T>
void Model<T>::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

template <typename T>
Tensor<T> Model<T>::run_stages(const Tensor<T>& stem_out, Tape* tape, bool stop_at_attention,
                               Tensor<T>* map_out) const {
  Tensor<T> x = stem_out;
  std::size_t bi = 0;
  for (int s = 0; s < static_cast<int>(config_.stages.size()); ++s) {
    for (; bi < blocks_.size() && blocks_[bi].stage == s; ++bi) {
      const BlockLayout& L = blocks_[bi];
      BlockCache cache;
      Tensor<T> expand_act;
      if (L.expand) {
        Tensor<T> pre;
        nn::conv1x1_forward(params_[L.expand_w].value.data(), params_[L.expand_b].value.data(), L.cexp, x, pre);
        nn::silu_forward(pre, expand_act);
        if (tape) cache.expand_pre = std::move(pre);
      }
      const Tensor<T>& dw_in = L.expand ? expand_act : x;
      Tensor<T> dw_pre, dw_act, y;
      nn::depthwise3x3_forward(params_[L.dw_w].value.data(), params_[L.dw_b].value.data(), L.stride, dw_in, dw_pre);
      nn::silu_forward(dw_pre, dw_act);
      nn::conv1x1_forward(params_[L.proj_w].value.data(), params_[L.proj_b].value.data(), L.cout, dw_act, y);
      if (L.residual)
        for (std::size_t i = 0; i < y.size(); ++i) y.data[i] += x.data[i];
      if (tape) {
        cache.in = std::move(x);
        if (L.expand) cache.expand_act = std::move(expand_act);
        cache.dw_pre = std::move(dw_pre);
        cache.dw_act = std::move(dw_act);
        tape->blocks.push_back(std::move(cache));
      }
      x = std::move(y);
    }
    if (config_.attention_stage && *config_.attention_stage == s) {
      Tensor<T> pre;
      nn::conv1x1_forward(params_[attn_w_].value.data(), params_[attn_b_].value.data(), 1, x, pre);
      Tensor<T> map(pre.n, 1, pre.h, pre.w);
      // Saturated gates are pinned one ulp inside (0, 1) so the map never
      // fully closes or opens a location.
      const T lo = std::numeric_limits<T>::min();
      const T hi = T(1) - std::numeric_limits<T>::epsilon() / T(2);
      for (std::size_t i = 0; i < pre.size(); ++i) map.data[i] = std::clamp(nn::sigmoid(pre.data[i]), lo, hi);
      if (stop_at_attention) {
        *map_out = std::move(map);
        return {};
      }
      Tensor<T> gated = apply_attention(x, map);
      if (tape) {
        tape->attention_in = std::move(x);
        tape->attention_pre = std::move(pre);
        tape->attention_map = std::move(map);
      }
      x = std::move(gated);
    }
  }
  return x;
}

template <typename T>
Tensor<T> Model<T>::forward(const Tensor<T>& images, Tape* tape) const {
  FACEFORGE_CHECK(images.c == 3 && images.h == config_.input_side && images.w == config_.input_side,
                  ErrorKind::ShapeMismatch,
                  "input is " + std::to_string(images.h) + "x" + std::to_string(images.w) + ", model expects " +
                      std::to_string(config_.input_side));
  Tensor<T> input = images;
  for (auto& v : input.data) v = (v - T(0.5)) / T(0.25);
  Tensor<T> stem_pre, stem_act;
  nn::conv3x3_forward(params_[stem_w_].value.data(), params_[stem_b_].value.data(), config_.stem_channels,
                      config_.stem_stride, input, stem_pre);
  nn::silu_forward(stem_pre, stem_act);
  if (tape) {
    *tape = Tape{};
    tape->input = std::move(input);
    tape->stem_pre = std::move(stem_pre);
  }
  Tensor<T> x = run_stages(stem_act, tape, false, nullptr);

  Tensor<T> head_pre, head_act;
  nn::conv1x1_forward(params_[head_w_].value.data(), params_[head_b_].value.data(), config_.feature_dim, x, head_pre);
  nn::silu_forward(head_pre, head_act);
  Tensor<T> features(head_act.n, head_act.c, 1, 1);
  const std::size_t hw = head_act.plane();
  for (int i = 0; i < head_act.n; ++i) {
    for (int ch = 0; ch < head_act.c; ++ch) {
      const T* src = head_act.sample(i) + ch * hw;
      T sum = 0;
      for (std::size_t p = 0; p < hw; ++p) sum += src[p];
      features.at(i, ch, 0, 0) = sum / static_cast<T>(hw);
    }
  }
  if (tape) {
    tape->head_in = std::move(x);
    tape->head_pre = std::move(head_pre);
    tape->head_act = std::move(head_act);
  }
  return features;
}

template <typename T>
void Model<T>::backward(const Tape& tape, const Tensor<T>& dfeatures) {
  FACEFORGE_CHECK(dfeatures.n == tape.head_act.n && dfeatures.c == config_.feature_dim, ErrorKind::ShapeMismatch,
                  "feature gradient shape mismatch");
  // Global average pool.
  Tensor<T> g(tape.head_act.n, tape.head_act.c, tape.head_act.h, tape.head_act.w);
  const std::size_t hw = g.plane();
  for (int i = 0; i < g.n; ++i) {
    for (int ch = 0; ch < g.c; ++ch) {
      const T v = dfeatures.at(i, ch, 0, 0) / static_cast<T>(hw);
      std::fill(g.sample(i) + ch * hw, g.sample(i) + (ch + 1) * hw, v);
    }
  }
  nn::silu_backward(tape.head_pre, g);
  Tensor<T> dx;
  nn::conv1x1_backward(params_[head_w_].value.data(), config_.feature_dim, tape.head_in, g,
                       params_[head_w_].grad.data(), params_[head_b_].grad.data(), &dx);

  std::size_t bi = blocks_.size();
  for (int s = static_cast<int>(config_.stages.size()) - 1; s >= 0; --s) {
    if (config_.attention_stage && *config_.attention_stage == s) {
      // out = x * a, a = sigmoid(w.x + b): both operands carry gradient.
      const Tensor<T>& x = tape.attention_in;
      const Tensor<T>& a = tape.attention_map;
      const std::size_t plane = x.plane();
      Tensor<T> da_pre(x.n, 1, x.h, x.w);
      Tensor<T> dgated = apply_attention(dx, a);
      for (int i = 0; i < x.n; ++i) {
        for (std::size_t p = 0; p < plane; ++p) {
          T acc = 0;
          for (int ch = 0; ch < x.c; ++ch) acc += dx.sample(i)[ch * plane + p] * x.sample(i)[ch * plane + p];
          const T av = a.sample(i)[p];
          da_pre.sample(i)[p] = acc * av * (T(1) - av);
        }
      }
      Tensor<T> dx_attn;
      nn::conv1x1_backward(params_[attn_w_].value.data(), 1, x, da_pre, params_[attn_w_].grad.data(),
                           params_[attn_b_].grad.data(), &dx_attn);
      for (std::size_t i = 0; i < dgated.size(); ++i) dgated.data[i] += dx_attn.data[i];
      dx = std::move(dgated);
    }
    while (bi > 0 && blocks_[bi - 1].stage == s) {
      --bi;
      const BlockLayout& L = blocks_[bi];
      const BlockCache& C = tape.blocks[bi];
      Tensor<T> d_dw_act;
      nn::conv1x1_backward(params_[L.proj_w].value.data(), L.cout, C.dw_act, dx, params_[L.proj_w].grad.data(),
                           params_[L.proj_b].grad.data(), &d_dw_act);
      nn::silu_backward(C.dw_pre, d_dw_act);
      const Tensor<T>& dw_in = L.expand ? C.expand_act : C.in;
      Tensor<T> d_dw_in;
      nn::depthwise3x3_backward(params_[L.dw_w].value.data(), L.stride, dw_in, d_dw_act,
                                params_[L.dw_w].grad.data(), params_[L.dw_b].grad.data(), &d_dw_in);
      Tensor<T> d_in;
      if (L.expand) {
        nn::silu_backward(C.expand_pre, d_dw_in);
        nn::conv1x1_backward(params_[L.expand_w].value.data(), L.cexp, C.in, d_dw_in,
                             params_[L.expand_w].grad.data(), params_[L.expand_b].grad.data(), &d_in);
      } else {
        d_in = std::move(d_dw_in);
      }
      if (L.residual)
        for (std::size_t i = 0; i < d_in.size(); ++i) d_in.data[i] += dx.data[i];
      dx = std::move(d_in);
    }
  }
  nn::silu_backward(tape.stem_pre, dx);
  nn::conv3x3_backward_params(config_.stem_stride, tape.input, dx, params_[stem_w_].grad.data(),
                              params_[stem_b_].grad.data());
}

template <typename T>
std::vector<T> Model<T>::classify(const Tensor<T>& features) const {
  FACEFORGE_CHECK(features.c == config_.feature_dim, ErrorKind::ShapeMismatch, "feature dimension mismatch");
  const auto& w = params_[cls_w_].value;
  const T b = params_[cls_b_].value[0];
  std::vector<T> out(static_cast<std::size_t>(features.n));
  for (int i = 0; i < features.n; ++i) {
    T acc = b;
    const T* f = features.sample(i);
    for (int d = 0; d < features.c; ++d) acc += w[static_cast<std::size_t>(d)] * f[d];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

template <typename T>
void Model<T>::backward_classifier(const Tensor<T>& features, std::span<const T> dlogits, Tensor<T>* dfeatures) {
  FACEFORGE_CHECK(static_cast<int>(dlogits.size()) == features.n, ErrorKind::ShapeMismatch,
                  "logit gradient count mismatch");
  auto& w = params_[cls_w_];
  auto& b = params_[cls_b_];
  if (dfeatures) *dfeatures = Tensor<T>(features.n, features.c, 1, 1);
  for (int i = 0; i < features.n; ++i) {
    const T g = dlogits[static_cast<std::size_t>(i)];
    const T* f = features.sample(i);
    for (int d = 0; d < features.c; ++d) {
      w.grad[static_cast<std::size_t>(d)] += g * f[d];
      if (dfeatures) dfeatures->sample(i)[d] = g * w.value[static_cast<std::size_t>(d)];
    }
    b.grad[0] += g;
  }
}

template <typename T>
Tensor<T> Model<T>::attention_map(const Tensor<T>& images) const {
  FACEFORGE_CHECK(has_attention(), ErrorKind::State, "model has no attention block");
  FACEFORGE_CHECK(images.c == 3 && images.h == config_.input_side && images.w == config_.input_side,
                  ErrorKind::ShapeMismatch, "input side does not match the model");
  Tensor<T> input = images;
  for (auto& v : input.data) v = (v - T(0.5)) / T(0.25);
  Tensor<T> stem_pre, stem_act;
  nn::conv3x3_forward(params_[stem_w_].value.data(), params_[stem_b_].value.data(), config_.stem_channels,
                      config_.stem_stride, input, stem_pre);
  nn::silu_forward(stem_pre, stem_act);
  Tensor<T> map;
  run_stages(stem_act, nullptr, true, &map);
  return map;
}

template <typename T>
Tensor<T> to_input(std::span<const FaceCrop> faces, int side) {
  Tensor<T> out(static_cast<int>(faces.size()), 3, side, side);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const Image& img = faces[i].pixels;
    FACEFORGE_CHECK(img.width == side && img.height == side && img.channels == 3, ErrorKind::ShapeMismatch,
                    "face side " + std::to_string(img.width) + " does not match model input side " +
                        std::to_string(side));
    T* dst = out.sample(static_cast<int>(i));
    const std::size_t plane = static_cast<std::size_t>(side) * side;
    for (std::size_t p = 0; p < plane; ++p)
      for (int c = 0; c < 3; ++c) dst[c * plane + p] = static_cast<T>(img.data[p * 3 + c]);
  }
  return out;
}

namespace {
constexpr std::size_t kInferenceChunk = 64;
}

template <typename T>
Tensor<T> Model<T>::forward_features(std::span<const FaceCrop> faces) const {
  Tensor<T> out(static_cast<int>(faces.size()), config_.feature_dim, 1, 1);
  for (std::size_t begin = 0; begin < faces.size(); begin += kInferenceChunk) {
    const auto chunk = faces.subspan(begin, std::min(kInferenceChunk, faces.size() - begin));
    const Tensor<T> f = forward(to_input<T>(chunk, config_.input_side));
    std::copy(f.data.begin(), f.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(begin * config_.feature_dim));
  }
  return out;
}

template <typename T>
std::vector<T> Model<T>::forward_logit(std::span<const FaceCrop> faces) const {
  return classify(forward_features(faces));
}

template <typename T>
Tensor<T> Model<T>::attention_map(std::span<const FaceCrop> faces) const {
  FACEFORGE_CHECK(has_attention(), ErrorKind::State, "model has no attention block");
  Tensor<T> out;
  for (std::size_t begin = 0; begin < faces.size(); begin += kInferenceChunk) {
    const auto chunk = faces.subspan(begin, std::min(kInferenceChunk, faces.size() - begin));
    Tensor<T> m = attention_map(to_input<T>(chunk, config_.input_side));
    if (begin == 0) out = Tensor<T>(static_cast<int>(faces.size()), 1, m.h, m.w);
    std::copy(m.data.begin(), m.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(begin * m.plane()));
  }
  return out;
}

template <typename T>
template <typename U>
Model<U> Model<T>::cast() const {
  Model<U> out(config_, 0);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    std::transform(params_[i].value.begin(), params_[i].value.end(), out.params_[i].value.begin(),
                   [](T v) { return static_cast<U>(v); });
  }
  return out;
}

template class Model<float>;
template class Model<double>;
template Model<double> Model<float>::cast<double>() const;
template Model<float> Model<double>::cast<float>() const;
template Model<float> Model<float>::cast<float>() const;
template Model<double> Model<double>::cast<double>() const;
template Tensor<float> to_input<float>(std::span<const FaceCrop>, int);
template Tensor<double> to_input<double>(std::span<const FaceCrop>, int);

}  // namespace faceforge
