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

#include "kgx/model.h"

#include <gtest/gtest.h>

#include "test_util.h"

namespace kgx {
namespace {

TEST(ModelConfig, FullScalePreset) {
  const ModelConfig c = FullScaleModelConfig();
  EXPECT_EQ(c.raw_width, 5120u);
  EXPECT_EQ(c.dim_e, 5120u);
  EXPECT_EQ(c.embedding_dim, 300u);
}

TEST(InferenceMode, NamesRoundTrip) {
  EXPECT_EQ(ParseMode(ModeName(InferenceMode::kMain)), InferenceMode::kMain);
  EXPECT_EQ(ParseMode(ModeName(InferenceMode::kExtended)), InferenceMode::kExtended);
  EXPECT_THROW(ParseMode("both"), std::invalid_argument);
}

TEST(Predict, AcceptsExactlyCandidatesAboveThreshold) {
  ModelConfig c;
  c.raw_width = c.dim_e = 6;
  c.trunk_hidden = 5;
  c.detector_hidden = 5;
  c.embedding_dim = 3;
  ExtractionModel m = ExtractionModel::Create(testing::SizedVocabulary(5, 3, 3), c, 4);
  m.thresholds.mlp_threshold = 0.5;
  m.thresholds.fusion_threshold = 0.3;
  m.fusion = {{2.0, 1.0}, -1.0};
  Rng rng(6);
  const auto x = testing::RandomVector(6, rng);
  CandidateConfig cfg;
  cfg.q = 20;
  const VideoAnalysis video = Analyze(m, x);
  const auto candidates = generate_candidates(video.detection, m.vocab, cfg);
  for (InferenceMode mode : {InferenceMode::kMain, InferenceMode::kExtended}) {
    const KnowledgeGraph kg = predict(m, x, cfg, mode, nullptr);
    std::size_t accepted = 0;
    for (const auto& cand : candidates) {
      const FactScores s = ScoreFact(m, video, cand.fact, nullptr);
      EXPECT_DOUBLE_EQ(s.bk, 0.5);
      EXPECT_DOUBLE_EQ(s.fused, fuse(s.main, 0.5, m.fusion));
      const bool want = mode == InferenceMode::kMain ? s.main > 0.5 : s.fused > 0.3;
      EXPECT_EQ(kg.contains(cand.fact), want);
      if (want) {
        ++accepted;
        EXPECT_EQ(*kg.facts().at(cand.fact), mode == InferenceMode::kMain ? s.main : s.fused);
      }
    }
    EXPECT_EQ(kg.size(), accepted);
  }
}

}  // namespace
}  // namespace kgx
