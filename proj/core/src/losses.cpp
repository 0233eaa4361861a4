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

#include "faceforge/losses.hpp"

#include <algorithm>
#include <cmath>

#include "faceforge/error.hpp"

namespace faceforge {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

const double kLogLo = std::log(kProbabilityEpsilon);
const double kLogHi = std::log1p(-kProbabilityEpsilon);

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void check_batch(std::size_t n_logits, std::size_t n_labels, std::span<const int> labels) {
  FACEFORGE_CHECK(n_logits >= 1, ErrorKind::InvalidArgument, "logloss needs a non-empty batch");
  FACEFORGE_CHECK(n_logits == n_labels, ErrorKind::ShapeMismatch, "logloss: scores and labels differ in length");
  for (int y : labels) FACEFORGE_CHECK(y == 0 || y == 1, ErrorKind::InvalidArgument, "labels must be 0 or 1");
}

}  // namespace

double logloss_with_grad(std::span<const double> logits, std::span<const int> labels, std::span<double> grad) {
  check_batch(logits.size(), labels.size(), labels);
  const double n = static_cast<double>(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double s = logits[i];
    FACEFORGE_CHECK(std::isfinite(s), ErrorKind::Numeric, "non-finite score in logloss");
    // log S(s) = -softplus(-s), log(1 - S(s)) = -softplus(s)
    const double raw = labels[i] == 1 ? -softplus(-s) : -softplus(s);
    const double clamped = std::clamp(raw, kLogLo, kLogHi);
    sum += clamped;
    if (!grad.empty()) {
      const bool active = raw == clamped;
      grad[i] = active ? (sigmoid(s) - labels[i]) / n : 0.0;
    }
  }
  return -sum / n;
}

double logloss(std::span<const double> logits, std::span<const int> labels) {
  return logloss_with_grad(logits, labels, {});
}

double logloss_from_probabilities(std::span<const double> probabilities, std::span<const int> labels) {
  check_batch(probabilities.size(), labels.size(), labels);
  double sum = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    FACEFORGE_CHECK(std::isfinite(probabilities[i]), ErrorKind::Numeric, "non-finite probability in logloss");
    const double p = std::clamp(probabilities[i], kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
    sum += labels[i] == 1 ? std::log(p) : std::log1p(-p);
  }
  return -sum / static_cast<double>(probabilities.size());
}

double triplet_margin_loss(std::span<const double> anchor, std::span<const double> positive,
                           std::span<const double> negative, double margin) {
  FACEFORGE_CHECK(anchor.size() == positive.size() && anchor.size() == negative.size(), ErrorKind::ShapeMismatch,
                  "triplet vectors differ in dimension");
  return triplet_margin_loss_batch(anchor, positive, negative, static_cast<int>(anchor.size()), margin);
}

double triplet_margin_loss_batch(std::span<const double> anchors, std::span<const double> positives,
                                 std::span<const double> negatives, int dim, double margin,
                                 std::span<double> grad_anchors, std::span<double> grad_positives,
                                 std::span<double> grad_negatives) {
  FACEFORGE_CHECK(margin > 0.0, ErrorKind::InvalidArgument, "triplet margin must be positive");
  FACEFORGE_CHECK(dim >= 1 && !anchors.empty() && anchors.size() % static_cast<std::size_t>(dim) == 0,
                  ErrorKind::ShapeMismatch, "triplet batch is not a whole number of rows");
  FACEFORGE_CHECK(positives.size() == anchors.size() && negatives.size() == anchors.size(), ErrorKind::ShapeMismatch,
                  "triplet operands differ in shape");
  const bool want_grad = !grad_anchors.empty();
  if (want_grad) {
    FACEFORGE_CHECK(grad_anchors.size() == anchors.size() && grad_positives.size() == anchors.size() &&
                        grad_negatives.size() == anchors.size(),
                    ErrorKind::ShapeMismatch, "triplet gradient buffers have the wrong size");
    std::fill(grad_anchors.begin(), grad_anchors.end(), 0.0);
    std::fill(grad_positives.begin(), grad_positives.end(), 0.0);
    std::fill(grad_negatives.begin(), grad_negatives.end(), 0.0);
  }
  const std::size_t d = static_cast<std::size_t>(dim);
  const std::size_t n = anchors.size() / d;
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double* a = &anchors[t * d];
    const double* p = &positives[t * d];
    const double* q = &negatives[t * d];
    double dp2 = 0.0, dn2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      dp2 += (a[k] - p[k]) * (a[k] - p[k]);
      dn2 += (a[k] - q[k]) * (a[k] - q[k]);
    }
    const double dp = std::sqrt(dp2), dn = std::sqrt(dn2);
    const double loss = margin + dp - dn;
    if (loss <= 0.0) continue;
    total += loss;
    if (!want_grad) continue;
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < d; ++k) {
      const double up = dp > 0.0 ? (a[k] - p[k]) / dp : 0.0;
      const double un = dn > 0.0 ? (a[k] - q[k]) / dn : 0.0;
      grad_anchors[t * d + k] = scale * (up - un);
      grad_positives[t * d + k] = -scale * up;
      grad_negatives[t * d + k] = scale * un;
    }
  }
  return total / static_cast<double>(n);
}

}  // namespace faceforge
