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

// Fusion stage: trainable individual vectors and one MLP per predicate.
// A unary fact c(s) is scored by m_c([e; v_s]), a binary fact r(s, o) by
// m_r([e; v_s; v_o]), where e is the trunk output for the video.

#ifndef KGX_SCORER_H_
#define KGX_SCORER_H_

#include <cstddef>
#include <span>
#include <vector>

#include "kgx/core.h"
#include "kgx/nnet.h"
#include "kgx/random.h"

namespace kgx {

struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<double> values;  // row-major [num_individuals x dim]

  static EmbeddingTable Create(std::size_t num_individuals, std::size_t dim,
                               Rng& rng);

  std::size_t rows() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(SymbolId i) const {
    return std::span<const double>(values).subspan(i * dim, dim);
  }

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;
};

struct PredicateMlps {
  std::vector<DenseNet> unary;
  std::vector<DenseNet> binary;

  // Hidden width of each net is max(8, input_width / 4).
  static PredicateMlps Create(std::size_t dim_e, std::size_t embedding_dim,
                              std::size_t num_unary, std::size_t num_binary,
                              Rng& rng);

  const DenseNet& net(const Fact& fact) const;
  DenseNet& net(const Fact& fact);

  friend bool operator==(const PredicateMlps&, const PredicateMlps&) = default;
};

std::size_t PredicateHiddenWidth(std::size_t input_width);

// A single global MLP threshold is always present. When the per-predicate
// vectors are non-empty they override it for their predicate.
struct ThresholdSet {
  double mlp_threshold = 0.5;
  double fusion_threshold = 0.5;
  std::vector<double> unary_mlp;
  std::vector<double> binary_mlp;

  double MlpThresholdFor(const Fact& fact) const;
  bool per_predicate() const { return !unary_mlp.empty() || !binary_mlp.empty(); }

  friend bool operator==(const ThresholdSet&, const ThresholdSet&) = default;
};

// Concatenation [encoding; v_s] or [encoding; v_s; v_o].
std::vector<double> ScorerInput(const Fact& fact,
                                std::span<const double> encoding,
                                const EmbeddingTable& emb);

// Throws std::invalid_argument for an unknown predicate or mismatched
// dimensions.
double score_fact(const Fact& fact, std::span<const double> encoding,
                  const EmbeddingTable& emb, const PredicateMlps& mlps);

struct ScorerSample {
  Fact fact;
  std::span<const double> encoding;
  double label = 0.0;
};

// Mean binary cross-entropy over the batch. Throws std::invalid_argument
// ("empty batch") when the batch is empty.
double scorer_loss(std::span<const ScorerSample> batch,
                   const EmbeddingTable& emb, const PredicateMlps& mlps);

struct ScorerGradients {
  std::vector<double> embeddings;
  std::vector<std::vector<double>> unary;
  std::vector<std::vector<double>> binary;

  static ScorerGradients ZerosLike(const EmbeddingTable& emb,
                                   const PredicateMlps& mlps);
};

// As scorer_loss, accumulating gradients into `grads`. When
// `encoding_grads` is non-null it must hold one vector per sample (sized like
// the sample's encoding) and receives d(loss)/d(encoding).
double ScorerLossAndGrad(std::span<const ScorerSample> batch,
                         const EmbeddingTable& emb, const PredicateMlps& mlps,
                         ScorerGradients& grads,
                         std::vector<std::vector<double>>* encoding_grads);

struct ThresholdChoice {
  double threshold = 0.0;
  double f1 = 0.0;
};

// Chooses the cut point maximizing F1 of "positive iff score > threshold"
// among 0, 1 and the midpoints between consecutive distinct scores; ties go
// to the largest threshold. Throws std::invalid_argument when the inputs are
// empty, of unequal length, or contain no positive label.
ThresholdChoice select_threshold(std::span<const double> scores,
                                 std::span<const double> labels);

}  // namespace kgx

#endif  // KGX_SCORER_H_
