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

#include <span>
#include <vector>

namespace faceforge {

/// Probability clamp applied before every log, as in the Kaggle LogLoss.
inline constexpr double kProbabilityEpsilon = 1e-15;

double sigmoid(double x);

/// Binary cross-entropy of raw scores: -(1/N) sum[y log S(s) + (1-y) log(1-S(s))]
/// with S(s) clamped to [eps, 1-eps]. Evaluated through softplus so large
/// scores keep full precision.
double logloss(std::span<const double> logits, std::span<const int> labels);

/// Same objective plus dL/dlogit (zero where the clamp is active).
double logloss_with_grad(std::span<const double> logits, std::span<const int> labels, std::span<double> grad);

/// LogLoss of already-fused probabilities (clamped).
double logloss_from_probabilities(std::span<const double> probabilities, std::span<const int> labels);

/// max(0, margin + ||a - p|| - ||a - n||).
double triplet_margin_loss(std::span<const double> anchor, std::span<const double> positive,
                           std::span<const double> negative, double margin);

/// Mean triplet loss over rows of three [n x dim] row-major matrices; fills
/// gradients for each operand when the spans are non-empty.
double triplet_margin_loss_batch(std::span<const double> anchors, std::span<const double> positives,
                                 std::span<const double> negatives, int dim, double margin,
                                 std::span<double> grad_anchors = {}, std::span<double> grad_positives = {},
                                 std::span<double> grad_negatives = {});

}  // namespace faceforge
