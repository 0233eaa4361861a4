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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "faceforge/error.hpp"
#include "faceforge/nn.hpp"

namespace faceforge {

std::string parameter_group(const std::string& name) {
  const auto pos = name.rfind('.');
  return pos == std::string::npos ? name : name.substr(0, pos);
}

namespace nn {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using CMapMat = Eigen::Map<const RowMat<T>>;
template <typename T>
using MapVec = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>;
template <typename T>
using CMapVec = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>;

template <typename T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

int conv_out_side(int in, int stride) { return (in - 1) / stride + 1; }

template <typename T>
void conv1x1_forward(const T* weight, const T* bias, int cout, const Tensor<T>& x, Tensor<T>& y) {
  const int cin = x.c;
  const auto hw = static_cast<Eigen::Index>(x.plane());
  y = Tensor<T>(x.n, cout, x.h, x.w);
  CMapMat<T> W(weight, cout, cin);
  CMapVec<T> b(bias, cout);
  for (int i = 0; i < x.n; ++i) {
    CMapMat<T> X(x.sample(i), cin, hw);
    MapMat<T> Y(y.sample(i), cout, hw);
    Y.noalias() = W * X;
    Y.colwise() += b;
  }
}

template <typename T>
void conv1x1_backward(const T* weight, int cout, const Tensor<T>& x, const Tensor<T>& dy, T* dweight, T* dbias,
                      Tensor<T>* dx) {
  const int cin = x.c;
  const auto hw = static_cast<Eigen::Index>(x.plane());
  CMapMat<T> W(weight, cout, cin);
  MapMat<T> dW(dweight, cout, cin);
  MapVec<T> db(dbias, cout);
  if (dx) *dx = Tensor<T>(x.n, cin, x.h, x.w);
  for (int i = 0; i < x.n; ++i) {
    CMapMat<T> X(x.sample(i), cin, hw);
    CMapMat<T> dY(dy.sample(i), cout, hw);
    dW.noalias() += dY * X.transpose();
    db += dY.rowwise().sum();
    if (dx) {
      MapMat<T> dX(dx->sample(i), cin, hw);
      dX.noalias() = W.transpose() * dY;
    }
  }
}

template <typename T>
void conv3x3_im2col(const T* src, int cin, int h, int w, int stride, RowMat<T>& col) {
  const int ho = conv_out_side(h, stride), wo = conv_out_side(w, stride);
  col.resize(cin * 9, ho * wo);
  for (int ci = 0; ci < cin; ++ci) {
    const T* plane = src + static_cast<std::size_t>(ci) * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* row = col.data() + static_cast<std::size_t>(ci * 9 + ky * 3 + kx) * ho * wo;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride + ky - 1;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride + kx - 1;
            row[oy * wo + ox] = (iy >= 0 && iy < h && ix >= 0 && ix < w) ? plane[iy * w + ix] : T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void conv3x3_forward(const T* weight, const T* bias, int cout, int stride, const Tensor<T>& x, Tensor<T>& y) {
  const int ho = conv_out_side(x.h, stride), wo = conv_out_side(x.w, stride);
  y = Tensor<T>(x.n, cout, ho, wo);
  CMapMat<T> W(weight, cout, x.c * 9);
  CMapVec<T> b(bias, cout);
  RowMat<T> col;
  for (int i = 0; i < x.n; ++i) {
    conv3x3_im2col(x.sample(i), x.c, x.h, x.w, stride, col);
    MapMat<T> Y(y.sample(i), cout, ho * wo);
    Y.noalias() = W * col;
    Y.colwise() += b;
  }
}

template <typename T>
void conv3x3_backward_params(int stride, const Tensor<T>& x, const Tensor<T>& dy, T* dweight, T* dbias) {
  MapMat<T> dW(dweight, dy.c, x.c * 9);
  MapVec<T> db(dbias, dy.c);
  RowMat<T> col;
  for (int i = 0; i < x.n; ++i) {
    conv3x3_im2col(x.sample(i), x.c, x.h, x.w, stride, col);
    CMapMat<T> dY(dy.sample(i), dy.c, static_cast<Eigen::Index>(dy.plane()));
    dW.noalias() += dY * col.transpose();
    db += dY.rowwise().sum();
  }
}

// Zero-padded copy of one plane split into `stride` column phases, so that
// padded column c lives at phases[c % stride][row * pw + c / stride]. Every
// tap of a strided 3x3 window then reads a contiguous run.
template <typename T>
struct PhasedPlane {
  int stride = 1, pw = 0, rows = 0;
  std::vector<T> data;

  PhasedPlane(int h, int w, int s) : stride(s), pw((w + 2 + s - 1) / s + 1), rows(h + 2) {
    data.assign(static_cast<std::size_t>(s) * rows * pw, T(0));
  }
  T* tap(int r, int col) { return row(col % stride, r) + col / stride; }
  T* row(int phase, int r) { return data.data() + (static_cast<std::size_t>(phase) * rows + r) * pw; }
  void load(const T* src, int h, int w) {
    for (int y = 0; y < h; ++y) {
      const T* srow = src + static_cast<std::size_t>(y) * w;
      for (int p = 0; p < stride; ++p) {
        T* dst = row(p, y + 1);
        // Padded column c = p + j * stride holds source column c - 1.
        for (int j = 0, c = p; c < w + 2; ++j, c += stride) dst[j] = (c >= 1 && c <= w) ? srow[c - 1] : T(0);
      }
    }
  }
  void store_add(T* dst, int h, int w) {
    for (int y = 0; y < h; ++y) {
      T* drow = dst + static_cast<std::size_t>(y) * w;
      for (int p = 0; p < stride; ++p) {
        const T* src = row(p, y + 1);
        for (int j = 0, c = p; c < w + 2; ++j, c += stride)
          if (c >= 1 && c <= w) drow[c - 1] += src[j];
      }
    }
  }
  void clear() { std::fill(data.begin(), data.end(), T(0)); }
};

template <typename T>
void depthwise3x3_forward(const T* weight, const T* bias, int stride, const Tensor<T>& x, Tensor<T>& y) {
  const int h = x.h, w = x.w;
  const int ho = conv_out_side(h, stride), wo = conv_out_side(w, stride);
  y = Tensor<T>(x.n, x.c, ho, wo);
  PhasedPlane<T> pad(h, w, stride);
  for (int i = 0; i < x.n; ++i) {
    for (int ch = 0; ch < x.c; ++ch) {
      pad.load(x.sample(i) + static_cast<std::size_t>(ch) * h * w, h, w);
      T* dst = y.sample(i) + static_cast<std::size_t>(ch) * ho * wo;
      const T* k = weight + ch * 9;
      for (int oy = 0; oy < ho; ++oy) {
        T* drow = dst + oy * wo;
        std::fill(drow, drow + wo, bias[ch]);
        for (int ky = 0; ky < 3; ++ky) {
          for (int kx = 0; kx < 3; ++kx) {
            const T kv = k[ky * 3 + kx];
            const T* src = pad.tap(oy * stride + ky, kx);
            for (int ox = 0; ox < wo; ++ox) drow[ox] += kv * src[ox];
          }
        }
      }
    }
  }
}

template <typename T>
void depthwise3x3_backward(const T* weight, int stride, const Tensor<T>& x, const Tensor<T>& dy, T* dweight,
                           T* dbias, Tensor<T>* dx) {
  const int h = x.h, w = x.w;
  const int ho = dy.h, wo = dy.w;
  if (dx) *dx = Tensor<T>(x.n, x.c, h, w);
  PhasedPlane<T> pad(h, w, stride), dpad(h, w, stride);
  std::vector<T> partial(static_cast<std::size_t>(10) * wo);
  for (int i = 0; i < x.n; ++i) {
    for (int ch = 0; ch < x.c; ++ch) {
      pad.load(x.sample(i) + static_cast<std::size_t>(ch) * h * w, h, w);
      if (dx) dpad.clear();
      const T* g = dy.sample(i) + static_cast<std::size_t>(ch) * ho * wo;
      const T* k = weight + ch * 9;
      T* dk = dweight + ch * 9;
      // Lane-wise partial sums keep the reductions vectorizable.
      std::fill(partial.begin(), partial.end(), T(0));
      T* bpart = partial.data() + 9 * wo;
      for (int oy = 0; oy < ho; ++oy) {
        const T* grow = g + oy * wo;
        for (int ox = 0; ox < wo; ++ox) bpart[ox] += grow[ox];
        for (int ky = 0; ky < 3; ++ky) {
          for (int kx = 0; kx < 3; ++kx) {
            const T* src = pad.tap(oy * stride + ky, kx);
            T* part = partial.data() + (ky * 3 + kx) * wo;
            for (int ox = 0; ox < wo; ++ox) part[ox] += grow[ox] * src[ox];
            if (dx) {
              const T kv = k[ky * 3 + kx];
              T* dsrc = dpad.tap(oy * stride + ky, kx);
              for (int ox = 0; ox < wo; ++ox) dsrc[ox] += kv * grow[ox];
            }
          }
        }
      }
      for (int t = 0; t < 10; ++t) {
        T sum = 0;
        for (int ox = 0; ox < wo; ++ox) sum += partial[static_cast<std::size_t>(t * wo + ox)];
        if (t < 9) {
          dk[t] += sum;
        } else {
          dbias[ch] += sum;
        }
      }
      if (dx) dpad.store_add(dx->sample(i) + static_cast<std::size_t>(ch) * h * w, h, w);
    }
  }
}

// SiLU runs on fixed-size blocks so every element takes the same vectorized
// exp path, independent of its position in the buffer.
template <typename T>
constexpr int kSiluBlock = 64 / static_cast<int>(sizeof(T)) * 2;

template <typename T>
using SiluBlock = Eigen::Array<T, kSiluBlock<T>, 1>;

template <typename T>
void silu_forward(const Tensor<T>& x, Tensor<T>& y) {
  y = Tensor<T>(x.n, x.c, x.h, x.w);
  constexpr int B = kSiluBlock<T>;
  const std::size_t n = x.size();
  SiluBlock<T> a;
  for (std::size_t i = 0; i < n; i += B) {
    const std::size_t m = std::min<std::size_t>(B, n - i);
    a.setZero();
    std::copy_n(x.data.data() + i, m, a.data());
    const SiluBlock<T> out = a / (T(1) + (-a).exp());
    std::copy_n(out.data(), m, y.data.data() + i);
  }
}

template <typename T>
void silu_backward(const Tensor<T>& x, Tensor<T>& grad) {
  constexpr int B = kSiluBlock<T>;
  const std::size_t n = x.size();
  SiluBlock<T> a, g;
  for (std::size_t i = 0; i < n; i += B) {
    const std::size_t m = std::min<std::size_t>(B, n - i);
    a.setZero();
    g.setZero();
    std::copy_n(x.data.data() + i, m, a.data());
    std::copy_n(grad.data.data() + i, m, g.data());
    const SiluBlock<T> s = T(1) / (T(1) + (-a).exp());
    g *= s * (T(1) + a * (T(1) - s));
    std::copy_n(g.data(), m, grad.data.data() + i);
  }
}

#define FACEFORGE_INSTANTIATE_NN(T)                                                                    \
  template T sigmoid<T>(T);                                                                            \
  template void conv1x1_forward<T>(const T*, const T*, int, const Tensor<T>&, Tensor<T>&);              \
  template void conv1x1_backward<T>(const T*, int, const Tensor<T>&, const Tensor<T>&, T*, T*, Tensor<T>*); \
  template void conv3x3_forward<T>(const T*, const T*, int, int, const Tensor<T>&, Tensor<T>&);         \
  template void conv3x3_backward_params<T>(int, const Tensor<T>&, const Tensor<T>&, T*, T*);           \
  template void depthwise3x3_forward<T>(const T*, const T*, int, const Tensor<T>&, Tensor<T>&);         \
  template void depthwise3x3_backward<T>(const T*, int, const Tensor<T>&, const Tensor<T>&, T*, T*,     \
                                         Tensor<T>*);                                                  \
  template void silu_forward<T>(const Tensor<T>&, Tensor<T>&);                                         \
  template void silu_backward<T>(const Tensor<T>&, Tensor<T>&);

FACEFORGE_INSTANTIATE_NN(float)
FACEFORGE_INSTANTIATE_NN(double)

}  // namespace nn

template <typename T>
Tensor<T> apply_attention(const Tensor<T>& features, const Tensor<T>& map) {
  FACEFORGE_CHECK(map.n == features.n && map.c == 1 && map.h == features.h && map.w == features.w,
                  ErrorKind::ShapeMismatch, "attention map does not match the feature maps' spatial size");
  Tensor<T> out(features.n, features.c, features.h, features.w);
  const std::size_t hw = features.plane();
  for (int i = 0; i < features.n; ++i) {
    const T* m = map.sample(i);
    for (int ch = 0; ch < features.c; ++ch) {
      const T* src = features.sample(i) + ch * hw;
      T* dst = out.sample(i) + ch * hw;
      for (std::size_t p = 0; p < hw; ++p) dst[p] = src[p] * m[p];
    }
  }
  return out;
}

template Tensor<float> apply_attention<float>(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> apply_attention<double>(const Tensor<double>&, const Tensor<double>&);

}  // namespace faceforge
