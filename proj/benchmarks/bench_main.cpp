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

#include <benchmark/benchmark.h>

#include "faceforge/augment.hpp"
#include "faceforge/evaluation.hpp"
#include "faceforge/model.hpp"
#include "faceforge/rng.hpp"

namespace {

using namespace faceforge;

Tensor<float> random_images(int n, int side, std::uint64_t seed) {
  Tensor<float> x(n, 3, side, side);
  Rng rng(seed);
  for (auto& v : x.data) v = static_cast<float>(rng.uniform());
  return x;
}

void BM_ForwardToy(benchmark::State& state) {
  const bool attention = state.range(1) != 0;
  Model<float> model(BackboneConfig::toy(64, 64, attention), 1);
  const auto x = random_images(static_cast<int>(state.range(0)), 64, 2);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardToy)->Args({32, 0})->Args({32, 1})->Unit(benchmark::kMillisecond);

void BM_ForwardBackwardToy(benchmark::State& state) {
  Model<float> model(BackboneConfig::toy(64, 64, true), 1);
  const auto x = random_images(static_cast<int>(state.range(0)), 64, 3);
  for (auto _ : state) {
    Model<float>::Tape tape;
    const auto f = model.forward(x, &tape);
    Tensor<float> df(f.n, f.c, 1, 1, 0.01f);
    model.backward(tape, df);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackwardToy)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Augment(benchmark::State& state) {
  FaceCrop face;
  face.pixels = Image(64, 64, 3, 0.5f);
  Rng fill(4);
  for (auto& v : face.pixels.data) v = static_cast<float>(fill.uniform());
  const AugmentConfig config;
  std::uint64_t i = 0;
  for (auto _ : state) {
    Rng rng = Rng::stream(5, "bench", i++);
    benchmark::DoNotOptimize(augment(face, config, rng));
  }
}
BENCHMARK(BM_Augment);

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  Rng rng(6);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(i % 2);
    scores[i] = rng.normal() + labels[i];
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(scores, labels));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RocAuc)->Range(1 << 8, 1 << 16)->Complexity(benchmark::oNLogN);

}  // namespace

BENCHMARK_MAIN();
