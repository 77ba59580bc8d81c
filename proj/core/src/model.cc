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

#include <stdexcept>

#include "kgx/random.h"

namespace kgx {

ModelConfig FullScaleModelConfig() {
  ModelConfig c;
  c.raw_width = 5120;
  c.dim_e = 5120;
  c.trunk_hidden = 0;
  c.detector_hidden = 512;
  c.embedding_dim = 300;
  return c;
}

std::string_view ModeName(InferenceMode mode) {
  return mode == InferenceMode::kMain ? "main" : "extended";
}

InferenceMode ParseMode(std::string_view name) {
  if (name == "main") return InferenceMode::kMain;
  if (name == "extended") return InferenceMode::kExtended;
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (expected main|extended)");
}

ExtractionModel ExtractionModel::Create(const Vocabulary& vocab,
                                        const ModelConfig& config,
                                        std::uint64_t seed) {
  Rng rng(seed);
  ExtractionModel m;
  m.vocab = vocab;
  m.config = config;
  m.detectors =
      DetectorBank::Create(config.raw_width, config.dim_e, config.trunk_hidden,
                           config.detector_hidden, vocab, rng);
  m.embeddings =
      EmbeddingTable::Create(vocab.num_individuals(), config.embedding_dim, rng);
  m.predicates =
      PredicateMlps::Create(config.dim_e, config.embedding_dim,
                            vocab.num_unary(), vocab.num_binary(), rng);
  return m;
}

VideoAnalysis Analyze(const ExtractionModel& model,
                      std::span<const double> encoding) {
  VideoAnalysis v;
  v.trunk_output = model.detectors.trunk.Forward(encoding);
  v.detection = DetectFromTrunk(model.detectors, v.trunk_output);
  return v;
}

FactScores ScoreFact(const ExtractionModel& model, const VideoAnalysis& video,
                     const Fact& fact, const BkStats* stats) {
  FactScores s;
  s.main = score_fact(fact, video.trunk_output, model.embeddings,
                      model.predicates);
  if (stats != nullptr) s.bk = bk_expectation(fact, *stats);
  s.fused = fuse(s.main, s.bk, model.fusion);
  return s;
}

bool AcceptFact(const ExtractionModel& model, const Fact& fact,
                const FactScores& scores, InferenceMode mode) {
  if (mode == InferenceMode::kMain) {
    return scores.main > model.thresholds.MlpThresholdFor(fact);
  }
  return scores.fused > model.thresholds.fusion_threshold;
}

KnowledgeGraph predict(const ExtractionModel& model,
                       std::span<const double> encoding,
                       const CandidateConfig& cfg, InferenceMode mode,
                       const BkStats* stats) {
  const VideoAnalysis video = Analyze(model, encoding);
  KnowledgeGraph kg;
  for (const auto& c : generate_candidates(video.detection, model.vocab, cfg)) {
    const FactScores s = ScoreFact(model, video, c.fact, stats);
    if (AcceptFact(model, c.fact, s, mode)) {
      kg.insert(c.fact, mode == InferenceMode::kMain ? s.main : s.fused);
    }
  }
  return kg;
}

}  // namespace kgx
