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

// The full extraction model and its inference path:
// encoding -> trunk -> detectors -> candidate facts -> predicate MLPs
// -> (optionally) fusion with background knowledge -> thresholded KG.

#ifndef KGX_MODEL_H_
#define KGX_MODEL_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgx/bgk.h"
#include "kgx/combiner.h"
#include "kgx/core.h"
#include "kgx/detector.h"
#include "kgx/scorer.h"

namespace kgx {

struct ModelConfig {
  std::size_t raw_width = 64;
  std::size_t dim_e = 64;
  // 0 selects an identity trunk (requires raw_width == dim_e).
  std::size_t trunk_hidden = 64;
  std::size_t detector_hidden = 64;
  std::size_t embedding_dim = 16;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Full-size preset: 5120-wide encodings and 300-wide individual vectors.
ModelConfig FullScaleModelConfig();

enum class InferenceMode { kMain, kExtended };

std::string_view ModeName(InferenceMode mode);
InferenceMode ParseMode(std::string_view name);

struct ExtractionModel {
  Vocabulary vocab;
  ModelConfig config;
  DetectorBank detectors;
  EmbeddingTable embeddings;
  PredicateMlps predicates;
  ThresholdSet thresholds;
  FusionRegressor fusion;
  // Free-form provenance written to checkpoints (training config, seed).
  std::map<std::string, std::string> metadata;

  static ExtractionModel Create(const Vocabulary& vocab,
                                const ModelConfig& config, std::uint64_t seed);
};

// Per-video state shared by every fact scored for that video.
struct VideoAnalysis {
  std::vector<double> trunk_output;
  DetectionOutput detection;
};

VideoAnalysis Analyze(const ExtractionModel& model,
                      std::span<const double> encoding);

struct FactScores {
  double main = 0.0;   // predicate-MLP probability
  double bk = 0.5;     // background estimate, 0.5 without statistics
  double fused = 0.5;  // fusion regressor output
};

FactScores ScoreFact(const ExtractionModel& model, const VideoAnalysis& video,
                     const Fact& fact, const BkStats* stats);

// Thresholded decision for a fact that made it into the candidate set.
bool AcceptFact(const ExtractionModel& model, const Fact& fact,
                const FactScores& scores, InferenceMode mode);

// Knowledge graph for one video; each accepted candidate carries the score
// that was thresholded (MLP score in main mode, fused score otherwise).
KnowledgeGraph predict(const ExtractionModel& model,
                       std::span<const double> encoding,
                       const CandidateConfig& cfg, InferenceMode mode,
                       const BkStats* stats);

}  // namespace kgx

#endif  // KGX_MODEL_H_
