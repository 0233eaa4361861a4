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

// Deliberately naive reference implementations. They share no code with the
// library beyond plain data types.

#include <algorithm>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace faceforge::oracle {

using HighPrecision = boost::multiprecision::cpp_dec_float_50;

/// Binary cross-entropy evaluated in 50-digit decimal arithmetic, with the
/// probability clamped to [1e-15, 1 - 1e-15].
inline double logloss(std::span<const double> logits, std::span<const int> labels) {
  const HighPrecision eps("1e-15");
  const HighPrecision one(1);
  HighPrecision total(0);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    HighPrecision p = one / (one + boost::multiprecision::exp(-HighPrecision(logits[i])));
    if (p < eps) p = eps;
    if (p > one - eps) p = one - eps;
    total += labels[i] == 1 ? HighPrecision(boost::multiprecision::log(p)) : HighPrecision(boost::multiprecision::log(one - p));
  }
  return static_cast<double>(-total / HighPrecision(static_cast<long>(logits.size())));
}

inline double logloss_of_probabilities(std::span<const double> probs, std::span<const int> labels) {
  const HighPrecision eps("1e-15");
  const HighPrecision one(1);
  HighPrecision total(0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    HighPrecision p(probs[i]);
    if (p < eps) p = eps;
    if (p > one - eps) p = one - eps;
    total += labels[i] == 1 ? HighPrecision(boost::multiprecision::log(p)) : HighPrecision(boost::multiprecision::log(one - p));
  }
  return static_cast<double>(-total / HighPrecision(static_cast<long>(probs.size())));
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(sum);
}

inline double triplet(std::span<const double> a, std::span<const double> p, std::span<const double> n,
                      double margin) {
  const double v = euclidean(a, p) - euclidean(a, n) + margin;
  return v > 0.0 ? v : 0.0;
}

/// O(n^2) pair count: P(fake > real) + 0.5 P(tie), as an exact fraction.
struct PairwiseAuc {
  long long twice_wins = 0;  ///< 2 * wins + ties
  long long pairs = 0;
  double value() const { return static_cast<double>(twice_wins) / (2.0 * static_cast<double>(pairs)); }
};

inline PairwiseAuc pairwise_auc(std::span<const double> scores, std::span<const int> labels) {
  PairwiseAuc r;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++r.pairs;
      if (scores[i] > scores[j]) r.twice_wins += 2;
      if (scores[i] == scores[j]) r.twice_wins += 1;
    }
  }
  return r;
}

/// out[i][c][y][x] = features[i][c][y][x] * map[i][0][y][x], NCHW flat.
inline std::vector<double> gate(std::span<const double> features, std::span<const double> map, int n, int c,
                                int h, int w) {
  std::vector<double> out(features.size());
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < c; ++ch)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const std::size_t f = ((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x;
          const std::size_t m = (static_cast<std::size_t>(i) * h + y) * w + x;
          out[f] = features[f] * map[m];
        }
  return out;
}

/// Corner-aligned bilinear sample of an h x w grid at output pixel (oy, ox)
/// of a side x side image, written from the textbook four-neighbour formula.
inline double bilinear_at(const std::vector<double>& grid, int h, int w, int side, int oy, int ox) {
  const double gy = side == 1 ? 0.0 : oy * (h - 1.0) / (side - 1.0);
  const double gx = side == 1 ? 0.0 : ox * (w - 1.0) / (side - 1.0);
  const int y0 = static_cast<int>(std::floor(gy));
  const int x0 = static_cast<int>(std::floor(gx));
  const int y1 = std::min(y0 + 1, h - 1);
  const int x1 = std::min(x0 + 1, w - 1);
  const double ty = gy - y0, tx = gx - x0;
  auto g = [&](int y, int x) { return grid[static_cast<std::size_t>(y) * w + x]; };
  return (1 - ty) * (1 - tx) * g(y0, x0) + (1 - ty) * tx * g(y0, x1) + ty * (1 - tx) * g(y1, x0) + ty * tx * g(y1, x1);
}

/// Mean silhouette from all pairwise distances.
inline double silhouette(const std::vector<double>& pts, int dim, const std::vector<int>& labels) {
  const std::size_t n = labels.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double same = 0.0, other0 = 0.0, other1 = 0.0;
    std::size_t n_same = 0, n0 = 0, n1 = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double d = 0.0;
      for (int k = 0; k < dim; ++k) d += std::pow(pts[i * dim + k] - pts[j * dim + k], 2);
      d = std::sqrt(d);
      if (labels[j] == labels[i]) {
        same += d;
        ++n_same;
      } else if (labels[j] == 0) {
        other0 += d;
        ++n0;
      } else {
        other1 += d;
        ++n1;
      }
    }
    if (n_same == 0) continue;
    const double a = same / n_same;
    const double b = labels[i] == 0 ? other1 / n1 : other0 / n0;
    total += (b - a) / std::max(a, b);
  }
  return total / n;
}

}  // namespace faceforge::oracle
