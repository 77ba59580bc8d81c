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

// Background knowledge from a scene-graph corpus.
//
// For a fact with d supporting images out of N images containing its
// subject (unary) or its subject-object pair (binary), the plausibility A of
// the fact gets a uniform prior and a binomial likelihood a^d (1-a)^(N-d).
// The posterior is Beta(d+1, N-d+1) and its mean (d+1)/(N+2) is the
// background score, which a logistic regressor then fuses with the main
// model's score.

#ifndef KGX_BGK_H_
#define KGX_BGK_H_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgx/core.h"

namespace kgx {

struct SceneObject {
  std::string name;
  std::vector<std::string> attributes;
};

struct SceneRelationship {
  std::string subject;
  std::string predicate;
  std::string object;
};

struct SceneGraph {
  std::string image_id;
  std::vector<SceneObject> objects;
  std::vector<SceneRelationship> relationships;
};

// Parses one JSONL record. Throws DataError("malformed record: ...").
SceneGraph ParseSceneGraph(std::string_view json_line);
std::string SceneGraphToJson(const SceneGraph& graph);

// Per-image presence counts. An image adds at most 1 to any counter.
class BkStats {
 public:
  BkStats() = default;
  explicit BkStats(std::size_t num_individuals);

  std::size_t num_individuals() const { return subject_count_.size(); }
  std::uint64_t corpus_size() const { return corpus_size_; }

  std::uint64_t fact_count(const Fact& fact) const;
  std::uint64_t subject_count(SymbolId s) const;
  std::uint64_t pair_count(SymbolId s, SymbolId o) const;
  // N for the fact: subject count (unary) or pair count (binary).
  std::uint64_t evidence_count(const Fact& fact) const;

  const std::map<Fact, std::uint64_t>& fact_counts() const { return facts_; }

  // Mutation hooks for ingestion and deserialization.
  void AddImage() { ++corpus_size_; }
  void SetCorpusSize(std::uint64_t n) { corpus_size_ = n; }
  void AddFact(const Fact& fact, std::uint64_t n = 1) { facts_[fact] += n; }
  void AddSubject(SymbolId s, std::uint64_t n = 1) { subject_count_.at(s) += n; }
  void AddPair(SymbolId s, SymbolId o, std::uint64_t n = 1);

  friend bool operator==(const BkStats&, const BkStats&) = default;

 private:
  std::uint64_t corpus_size_ = 0;
  std::map<Fact, std::uint64_t> facts_;
  std::vector<std::uint64_t> subject_count_;
  std::vector<std::uint64_t> pair_count_;  // [s * n + o]
};

// Names are matched to the vocabulary case-insensitively; unmatched names
// are ignored. Individuals count as present in an image if they appear as
// an object or as a relationship argument.
BkStats ingest_scene_graphs(std::span<const SceneGraph> corpus,
                            const Vocabulary& vocab);

// (d + 1) / (N + 2).
double bk_expectation(const Fact& fact, const BkStats& stats);
double BetaPosteriorMean(std::uint64_t d, std::uint64_t n);

// a^d (1-a)^(N-d) * Gamma(N+2) / (Gamma(d+1) Gamma(N-d+1)); the Gamma ratio
// is evaluated in log space. Throws std::invalid_argument if d > N.
double posterior_density(double a, std::uint64_t d, std::uint64_t n);

struct FusionRegressor {
  std::array<double, 2> weights{0.0, 0.0};
  double bias = 0.0;

  friend bool operator==(const FusionRegressor&, const FusionRegressor&) = default;
};

// sigmoid(w0 * main + w1 * bk + bias).
double fuse(double main_score, double bk_score, const FusionRegressor& reg);

struct FusionSample {
  double main_score = 0.0;
  double bk_score = 0.0;
  double label = 0.0;
};

struct FusionTrainOptions {
  std::size_t steps = 500;
  double lr = 0.05;
};

// Mean binary cross-entropy of the regressor over `samples` and its
// gradient (w0, w1, bias).
double FusionLossAndGrad(std::span<const FusionSample> samples,
                         const FusionRegressor& reg,
                         std::array<double, 3>& grad);

// Full-batch Adam from a zero initialization. Throws std::invalid_argument
// unless there is at least one positive and one negative sample.
FusionRegressor train_fusion(std::span<const FusionSample> samples,
                             const FusionTrainOptions& options = {});

}  // namespace kgx

#endif  // KGX_BGK_H_
