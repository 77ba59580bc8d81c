// Copyright 2026 The kgx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kgx/bgk.h"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "oracles.h"

namespace kgx {
namespace {

TEST(Posterior, MeanWorkedExamples) {
  EXPECT_DOUBLE_EQ(BetaPosteriorMean(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(BetaPosteriorMean(3, 10), 4.0 / 12.0);
  EXPECT_DOUBLE_EQ(BetaPosteriorMean(10, 10), 11.0 / 12.0);
}

TEST(Posterior, DensityIntegratesToOneWithMatchingMean) {
  for (std::uint64_t n = 0; n <= 12; ++n) {
    for (std::uint64_t d = 0; d <= n; ++d) {
      auto f = [&](double a) { return posterior_density(a, d, n); };
      EXPECT_NEAR(oracle::Simpson(f, 0.0, 1.0, 2000), 1.0, 1e-6);
      const double mean =
          oracle::Simpson([&](double a) { return a * f(a); }, 0.0, 1.0, 2000);
      EXPECT_NEAR(mean, BetaPosteriorMean(d, n), 1e-6);
    }
  }
  EXPECT_THROW(posterior_density(0.5, 3, 2), std::invalid_argument);
}

TEST(SceneGraph, ParseAndRoundTrip) {
  const auto g = ParseSceneGraph(
      R"({"image_id":"a","objects":[{"name":"Man","attributes":["tall"]}],)"
      R"("relationships":[{"subject":"man","predicate":"drive","object":"car"}]})");
  EXPECT_EQ(g.image_id, "a");
  ASSERT_EQ(g.objects.size(), 1u);
  EXPECT_EQ(g.objects[0].attributes[0], "tall");
  ASSERT_EQ(g.relationships.size(), 1u);
  const auto again = ParseSceneGraph(SceneGraphToJson(g));
  EXPECT_EQ(SceneGraphToJson(again), SceneGraphToJson(g));
  EXPECT_THROW(ParseSceneGraph("{"), DataError);
  EXPECT_THROW(ParseSceneGraph(R"({"objects":[]})"), DataError);
  EXPECT_THROW(ParseSceneGraph(R"({"image_id":"x","objects":[{"name":1}]})"), DataError);
}

TEST(Ingest, CountsPerImagePresence) {
  const Vocabulary v({"man", "car", "dog"}, {"red"}, {"drive"});
  std::vector<SceneGraph> corpus(3);
  corpus[0] = {"a", {{"man", {}}, {"car", {"red", "RED"}}, {"car", {}}},
               {{"man", "drive", "car"}, {"man", "drive", "car"}}};
  corpus[1] = {"b", {{"car", {}}, {"tree", {"red"}}}, {{"dog", "chase", "car"}}};
  corpus[2] = {"c", {{"man", {}}}, {}};
  const BkStats s = ingest_scene_graphs(corpus, v);
  EXPECT_EQ(s.corpus_size(), 3u);
  EXPECT_EQ(s.subject_count(0), 2u);
  EXPECT_EQ(s.subject_count(1), 2u);
  EXPECT_EQ(s.subject_count(2), 1u);
  EXPECT_EQ(s.pair_count(0, 1), 1u);
  EXPECT_EQ(s.pair_count(1, 0), 1u);
  EXPECT_EQ(s.pair_count(2, 1), 1u);
  EXPECT_EQ(s.fact_count(Fact::Unary(0, 1)), 1u);
  EXPECT_EQ(s.fact_count(Fact::Binary(0, 0, 1)), 1u);
  EXPECT_DOUBLE_EQ(bk_expectation(Fact::Unary(0, 1), s), 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(bk_expectation(Fact::Binary(0, 0, 1), s), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(bk_expectation(Fact::Binary(0, 0, 2), s), 0.5);
}

TEST(Fusion, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  std::vector<FusionSample> samples;
  for (int i = 0; i < 40; ++i) {
    samples.push_back({rng.uniform(), rng.uniform(), rng.uniform() < 0.5 ? 1.0 : 0.0});
  }
  std::vector<double> p = {0.4, -1.1, 0.2};
  auto loss = [&] {
    std::array<double, 3> g;
    return FusionLossAndGrad(samples, {{p[0], p[1]}, p[2]}, g);
  };
  std::array<double, 3> g;
  FusionLossAndGrad(samples, {{p[0], p[1]}, p[2]}, g);
  const auto n = oracle::NumericGradient(loss, p);
  EXPECT_LT(oracle::MaxRelativeError(g, n), 1e-6);
}

TEST(Fusion, LearnsSeparableData) {
  std::vector<FusionSample> samples;
  for (int i = 0; i < 50; ++i) {
    samples.push_back({0.9, 0.2 + i * 0.001, 1.0});
    samples.push_back({0.1, 0.8 - i * 0.001, 0.0});
  }
  const auto reg = train_fusion(samples);
  EXPECT_GT(fuse(0.9, 0.2, reg), 0.9);
  EXPECT_LT(fuse(0.1, 0.8, reg), 0.1);
  std::vector<FusionSample> one_class = {{0.5, 0.5, 1.0}};
  EXPECT_THROW(train_fusion(one_class), std::invalid_argument);
}

TEST(Posterior, WorkedValuesAndShape) {
  EXPECT_DOUBLE_EQ(BetaPosteriorMean(3, 8), 0.4);
  for (double a : {0.0, 0.25, 0.5, 1.0}) {
    EXPECT_NEAR(posterior_density(a, 0, 0), 1.0, 1e-14);
    EXPECT_NEAR(posterior_density(a, 1, 1), 2.0 * a, 1e-14);
  }
  for (std::uint64_t n = 0; n <= 30; ++n) {
    for (std::uint64_t d = 0; d <= n; ++d) {
      if (d > 0) EXPECT_GT(BetaPosteriorMean(d, n), BetaPosteriorMean(d - 1, n));
      if (2 * d == n) EXPECT_DOUBLE_EQ(BetaPosteriorMean(d, n), 0.5);
      EXPECT_GE(posterior_density(0.3, d, n), 0.0);
    }
  }
}

TEST(Ingest, ToyCorpusAndEmptyCorpus) {
  const Vocabulary v({"dog", "cat"}, {"red"}, {"chase"});
  std::vector<SceneGraph> corpus = {{"1", {{"dog", {"red"}}}, {}},
                                    {"2", {{"dog", {}}, {"cat", {}}}, {}},
                                    {"3", {{"cat", {"red"}}}, {}}};
  const BkStats s = ingest_scene_graphs(corpus, v);
  EXPECT_EQ(s.subject_count(0), 2u);
  EXPECT_EQ(s.fact_count(Fact::Unary(0, 0)), 1u);
  const BkStats empty = ingest_scene_graphs({}, v);
  EXPECT_EQ(empty.corpus_size(), 0u);
  EXPECT_EQ(empty.subject_count(0), 0u);
  EXPECT_TRUE(empty.fact_counts().empty());
  EXPECT_DOUBLE_EQ(bk_expectation(Fact::Binary(0, 0, 1), empty), 0.5);
}

TEST(Fusion, WorkedOutputs) {
  EXPECT_EQ(fuse(0.3, 0.9, FusionRegressor{}), 0.5);
  EXPECT_EQ(fuse(0.0, 0.9, FusionRegressor{{1.0, 0.0}, 0.0}), 0.5);
  EXPECT_NEAR(fuse(0.9, 0.4, FusionRegressor{{2.0, 1.0}, -1.5}), 1.0 / (1.0 + std::exp(-0.7)),
              1e-15);
  EXPECT_NEAR(fuse(0.9, 0.4, FusionRegressor{{2.0, 1.0}, -1.5}), 0.6682, 1e-4);
}

TEST(Fusion, SeparableDataReachesLowLoss) {
  std::vector<FusionSample> samples;
  for (int i = 0; i < 40; ++i) {
    samples.push_back({0.8 + i * 0.005, 0.5, 1.0});
    samples.push_back({0.1 + i * 0.005, 0.5, 0.0});
  }
  const auto reg = train_fusion(samples);
  std::array<double, 3> g;
  EXPECT_LT(FusionLossAndGrad(samples, reg, g), 0.1);
}

TEST(Fusion, UninformativeFeaturesGiveBaseRate) {
  Rng rng(31);
  std::vector<FusionSample> samples;
  double positives = 0;
  for (int i = 0; i < 4000; ++i) {
    const double y = rng.uniform() < 0.3 ? 1.0 : 0.0;
    positives += y;
    samples.push_back({rng.uniform(), rng.uniform(), y});
  }
  const auto reg = train_fusion(samples);
  EXPECT_LT(std::abs(reg.weights[0]), 0.3);
  EXPECT_LT(std::abs(reg.weights[1]), 0.3);
  EXPECT_NEAR(fuse(0.5, 0.5, reg), positives / samples.size(), 0.03);
}

TEST(Fusion, InformativeFeatureGetsLargerWeight) {
  Rng rng(32);
  std::vector<FusionSample> samples;
  for (int i = 0; i < 2000; ++i) {
    const double bk = rng.uniform();
    samples.push_back({rng.uniform(), bk, rng.uniform() < bk ? 1.0 : 0.0});
  }
  const auto reg = train_fusion(samples);
  EXPECT_GT(std::abs(reg.weights[1]), std::abs(reg.weights[0]));
}

}  // namespace
}  // namespace kgx
