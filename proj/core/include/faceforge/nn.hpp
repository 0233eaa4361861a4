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

#include <cstddef>
#include <new>
#include <string>
#include <vector>

namespace faceforge {

/// Cache-line aligned storage. Vectorized kernels choose their scalar
/// prologue from the runtime address, so aligning every buffer keeps results
/// bit-identical from run to run.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlignment)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <typename T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

/// Dense NCHW tensor. Matrices are stored as [n, c, 1, 1].
template <typename T>
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  AlignedVector<T> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_, T fill = T(0))
      : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t sample_size() const { return static_cast<std::size_t>(c) * h * w; }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  T* sample(int i) { return data.data() + static_cast<std::size_t>(i) * sample_size(); }
  const T* sample(int i) const { return data.data() + static_cast<std::size_t>(i) * sample_size(); }
  T& at(int i, int ch, int y, int x) { return data[((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x]; }
  T at(int i, int ch, int y, int x) const { return data[((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x]; }
  bool same_shape(const Tensor& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
};

/// Named trainable tensor with its gradient accumulator.
template <typename T>
struct Parameter {
  std::string name;
  std::vector<int> shape;
  AlignedVector<T> value;
  AlignedVector<T> grad;

  std::size_t size() const { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }
};

/// Parameter group: the name up to its last dot ("stages.1.0.expand.weight"
/// -> "stages.1.0").
std::string parameter_group(const std::string& name);

namespace nn {

template <typename T>
T sigmoid(T x);

/// y = W x + b per sample; W is [cout, cin].
template <typename T>
void conv1x1_forward(const T* weight, const T* bias, int cout, const Tensor<T>& x, Tensor<T>& y);

/// Accumulates dW/db; writes dx when non-null.
template <typename T>
void conv1x1_backward(const T* weight, int cout, const Tensor<T>& x, const Tensor<T>& dy, T* dweight, T* dbias,
                      Tensor<T>* dx);

/// Dense 3x3 convolution, padding 1, via im2col. W is [cout, cin*9].
template <typename T>
void conv3x3_forward(const T* weight, const T* bias, int cout, int stride, const Tensor<T>& x, Tensor<T>& y);

/// Weight/bias gradients only (used where the input needs no gradient).
template <typename T>
void conv3x3_backward_params(int stride, const Tensor<T>& x, const Tensor<T>& dy, T* dweight, T* dbias);

/// Depthwise 3x3 convolution, padding 1. W is [c, 9].
template <typename T>
void depthwise3x3_forward(const T* weight, const T* bias, int stride, const Tensor<T>& x, Tensor<T>& y);

template <typename T>
void depthwise3x3_backward(const T* weight, int stride, const Tensor<T>& x, const Tensor<T>& dy, T* dweight,
                           T* dbias, Tensor<T>* dx);

template <typename T>
void silu_forward(const Tensor<T>& x, Tensor<T>& y);

/// grad *= silu'(x), in place.
template <typename T>
void silu_backward(const Tensor<T>& x, Tensor<T>& grad);

int conv_out_side(int in, int stride);

}  // namespace nn

/// out[i,c,y,x] = features[i,c,y,x] * map[i,0,y,x].
template <typename T>
Tensor<T> apply_attention(const Tensor<T>& features, const Tensor<T>& map);

}  // namespace faceforge
