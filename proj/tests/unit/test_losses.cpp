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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "faceforge/error.hpp"
#include "faceforge/losses.hpp"
#include "faceforge/rng.hpp"
#include "oracles.hpp"

namespace faceforge {
namespace {

TEST(LogLoss, MatchesHighPrecisionOracleOnRandomPairs) {
  Rng rng(11);
  std::vector<double> logits(1000);
  std::vector<int> labels(1000);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    logits[i] = rng.uniform(-12.0, 12.0);
    labels[i] = rng.bernoulli(0.5) ? 1 : 0;
  }
  EXPECT_NEAR(logloss(logits, labels), oracle::logloss(logits, labels), 1e-9);
}

TEST(LogLoss, PerSampleMatchesOracleAcrossScales) {
  for (double s : {-40.0, -34.6, -20.0, -1.0, -1e-8, 0.0, 3e-6, 2.5, 33.0, 36.0, 80.0}) {
    for (int y : {0, 1}) {
      const std::vector<double> logit{s};
      const std::vector<int> label{y};
      EXPECT_NEAR(logloss(logit, label), oracle::logloss(logit, label), 1e-9) << "s=" << s << " y=" << y;
    }
  }
}

TEST(LogLoss, ZeroScoreGivesLn2) {
  const std::vector<double> logits{0.0, 0.0, 0.0};
  const std::vector<int> labels{0, 1, 1};
  EXPECT_NEAR(logloss(logits, labels), std::log(2.0), 1e-12);
}

TEST(LogLoss, ClampBoundsConfidentMistakes) {
  const std::vector<double> logits{-1000.0};
  const std::vector<int> labels{1};
  EXPECT_NEAR(logloss(logits, labels), -std::log(1e-15), 1e-9);
}

TEST(LogLoss, GradientMatchesCentralDifference) {
  Rng rng(3);
  std::vector<double> logits(16);
  std::vector<int> labels(16);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    logits[i] = rng.uniform(-4.0, 4.0);
    labels[i] = static_cast<int>(i % 2);
  }
  std::vector<double> grad(logits.size());
  logloss_with_grad(logits, labels, grad);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    auto up = logits, down = logits;
    up[i] += 1e-6;
    down[i] -= 1e-6;
    const double numeric = (logloss(up, labels) - logloss(down, labels)) / 2e-6;
    EXPECT_NEAR(grad[i], numeric, 1e-8);
  }
}

TEST(LogLoss, ProbabilityFormAgreesWithScoreForm) {
  const std::vector<double> logits{-2.0, 0.5, 3.0, -0.1};
  const std::vector<int> labels{0, 1, 1, 1};
  std::vector<double> probs;
  for (double s : logits) probs.push_back(sigmoid(s));
  EXPECT_NEAR(logloss_from_probabilities(probs, labels), logloss(logits, labels), 1e-12);
}

TEST(LogLoss, RejectsBadInput) {
  const std::vector<double> logits{0.0, 1.0};
  EXPECT_THROW(logloss(logits, std::vector<int>{0}), Error);
  EXPECT_THROW(logloss(logits, std::vector<int>{0, 2}), Error);
  EXPECT_THROW(logloss(std::vector<double>{}, std::vector<int>{}), Error);
  EXPECT_THROW(logloss(std::vector<double>{std::nan("")}, std::vector<int>{1}), Error);
}

TEST(TripletLoss, MatchesScalarOracle) {
  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> a(8), p(8), n(8);
    for (int k = 0; k < 8; ++k) {
      a[k] = rng.normal();
      p[k] = rng.normal();
      n[k] = rng.normal();
    }
    EXPECT_NEAR(triplet_margin_loss(a, p, n, 1.0), oracle::triplet(a, p, n, 1.0), 1e-9);
  }
}

TEST(TripletLoss, CoincidentPointsReturnExactlyTheMargin) {
  const std::vector<double> f{0.3, -1.0, 2.0};
  EXPECT_EQ(triplet_margin_loss(f, f, f, 1.0), 1.0);
  EXPECT_EQ(triplet_margin_loss(f, f, f, 0.25), 0.25);
}

TEST(TripletLoss, NonNegativeAndZeroWhenWellSeparated) {
  const std::vector<double> a{0, 0}, p{0.1, 0}, n{5, 0};
  EXPECT_EQ(triplet_margin_loss(a, p, n, 1.0), 0.0);
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(4), y(4), z(4);
    for (int k = 0; k < 4; ++k) {
      x[k] = rng.normal();
      y[k] = rng.normal();
      z[k] = rng.normal();
    }
    EXPECT_GE(triplet_margin_loss(x, y, z, 1.0), 0.0);
  }
}

TEST(TripletLoss, BatchIsMeanOfRowsWithMatchingGradients) {
  Rng rng(9);
  const int dim = 5, n = 6;
  std::vector<double> a(n * dim), p(n * dim), q(n * dim);
  for (auto* v : {&a, &p, &q})
    for (auto& x : *v) x = rng.normal() * 0.3;
  double mean = 0.0;
  for (int t = 0; t < n; ++t) {
    auto row = [&](const std::vector<double>& m) { return std::span<const double>(m).subspan(t * dim, dim); };
    mean += oracle::triplet(row(a), row(p), row(q), 1.0) / n;
  }
  std::vector<double> ga(a.size()), gp(a.size()), gq(a.size());
  EXPECT_NEAR(triplet_margin_loss_batch(a, p, q, dim, 1.0, ga, gp, gq), mean, 1e-12);
  for (auto [m, g] : {std::pair{&a, &ga}, std::pair{&p, &gp}, std::pair{&q, &gq}}) {
    for (std::size_t i = 0; i < m->size(); ++i) {
      const double saved = (*m)[i];
      (*m)[i] = saved + 1e-6;
      const double up = triplet_margin_loss_batch(a, p, q, dim, 1.0);
      (*m)[i] = saved - 1e-6;
      const double down = triplet_margin_loss_batch(a, p, q, dim, 1.0);
      (*m)[i] = saved;
      EXPECT_NEAR((*g)[i], (up - down) / 2e-6, 1e-7);
    }
  }
}

TEST(TripletLoss, RejectsBadInput) {
  const std::vector<double> a{0, 0}, b{1, 1};
  EXPECT_THROW(triplet_margin_loss(a, b, std::vector<double>{1}, 1.0), Error);
  EXPECT_THROW(triplet_margin_loss(a, b, b, 0.0), Error);
  EXPECT_THROW(triplet_margin_loss_batch(a, b, b, 3, 1.0), Error);
}

}  // namespace
}  // namespace faceforge
