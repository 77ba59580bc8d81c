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

#include "kgx/scorer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kgx {

EmbeddingTable EmbeddingTable::Create(std::size_t num_individuals,
                                      std::size_t dim, Rng& rng) {
  EmbeddingTable t;
  t.dim = dim;
  t.values.resize(num_individuals * dim);
  const double limit = std::sqrt(6.0 / static_cast<double>(1 + dim));
  for (double& v : t.values) v = rng.uniform(-limit, limit);
  return t;
}

std::size_t PredicateHiddenWidth(std::size_t input_width) {
  return std::max<std::size_t>(8, input_width / 4);
}

PredicateMlps PredicateMlps::Create(std::size_t dim_e,
                                    std::size_t embedding_dim,
                                    std::size_t num_unary,
                                    std::size_t num_binary, Rng& rng) {
  PredicateMlps m;
  auto make = [&](std::size_t in) {
    DenseNet net = DenseNet::OneHidden(in, PredicateHiddenWidth(in), 1,
                                       Activation::kRelu, Activation::kSigmoid);
    net.InitGlorot(rng);
    return net;
  };
  for (std::size_t c = 0; c < num_unary; ++c) {
    m.unary.push_back(make(dim_e + embedding_dim));
  }
  for (std::size_t r = 0; r < num_binary; ++r) {
    m.binary.push_back(make(dim_e + 2 * embedding_dim));
  }
  return m;
}

const DenseNet& PredicateMlps::net(const Fact& fact) const {
  const auto& pool = fact.is_unary() ? unary : binary;
  if (fact.predicate >= pool.size()) {
    throw std::invalid_argument("unknown predicate id " +
                                std::to_string(fact.predicate));
  }
  return pool[fact.predicate];
}

DenseNet& PredicateMlps::net(const Fact& fact) {
  return const_cast<DenseNet&>(std::as_const(*this).net(fact));
}

double ThresholdSet::MlpThresholdFor(const Fact& fact) const {
  const auto& v = fact.is_unary() ? unary_mlp : binary_mlp;
  return fact.predicate < v.size() ? v[fact.predicate] : mlp_threshold;
}

std::vector<double> ScorerInput(const Fact& fact,
                                std::span<const double> encoding,
                                const EmbeddingTable& emb) {
  const std::size_t n = emb.rows();
  if (fact.subject >= n || (fact.is_binary() && fact.object >= n)) {
    throw std::invalid_argument("individual id outside embedding table");
  }
  std::vector<double> input(encoding.begin(), encoding.end());
  auto s = emb.row(fact.subject);
  input.insert(input.end(), s.begin(), s.end());
  if (fact.is_binary()) {
    auto o = emb.row(fact.object);
    input.insert(input.end(), o.begin(), o.end());
  }
  return input;
}

double score_fact(const Fact& fact, std::span<const double> encoding,
                  const EmbeddingTable& emb, const PredicateMlps& mlps) {
  const DenseNet& net = mlps.net(fact);
  return net.Forward(ScorerInput(fact, encoding, emb))[0];
}

double scorer_loss(std::span<const ScorerSample> batch,
                   const EmbeddingTable& emb, const PredicateMlps& mlps) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::vector<double> scores;
  std::vector<double> labels;
  scores.reserve(batch.size());
  labels.reserve(batch.size());
  for (const auto& s : batch) {
    scores.push_back(score_fact(s.fact, s.encoding, emb, mlps));
    labels.push_back(s.label);
  }
  return bce_loss(scores, labels);
}

ScorerGradients ScorerGradients::ZerosLike(const EmbeddingTable& emb,
                                           const PredicateMlps& mlps) {
  ScorerGradients g;
  g.embeddings.assign(emb.values.size(), 0.0);
  for (const auto& net : mlps.unary) g.unary.emplace_back(net.num_params(), 0.0);
  for (const auto& net : mlps.binary) {
    g.binary.emplace_back(net.num_params(), 0.0);
  }
  return g;
}

double ScorerLossAndGrad(std::span<const ScorerSample> batch,
                         const EmbeddingTable& emb, const PredicateMlps& mlps,
                         ScorerGradients& grads,
                         std::vector<std::vector<double>>* encoding_grads) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const double n = static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& sample = batch[i];
    const DenseNet& net = mlps.net(sample.fact);
    const auto trace = net.ForwardTrace(ScorerInput(sample.fact, sample.encoding, emb));
    const double p = trace.output()[0];
    const double y = sample.label;
    total += bce_loss(std::span<const double>(&p, 1),
                      std::span<const double>(&y, 1));
    double g = bce_loss_grad(std::span<const double>(&p, 1),
                             std::span<const double>(&y, 1))[0] / n;
    auto& net_grads = sample.fact.is_unary() ? grads.unary[sample.fact.predicate]
                                             : grads.binary[sample.fact.predicate];
    const auto gin = net.Backward(trace, std::span<const double>(&g, 1), net_grads);

    const std::size_t de = sample.encoding.size();
    if (encoding_grads != nullptr) {
      auto& ge = (*encoding_grads)[i];
      for (std::size_t k = 0; k < de; ++k) ge[k] += gin[k];
    }
    double* vs = grads.embeddings.data() + sample.fact.subject * emb.dim;
    for (std::size_t k = 0; k < emb.dim; ++k) vs[k] += gin[de + k];
    if (sample.fact.is_binary()) {
      double* vo = grads.embeddings.data() + sample.fact.object * emb.dim;
      for (std::size_t k = 0; k < emb.dim; ++k) vo[k] += gin[de + emb.dim + k];
    }
  }
  return total / n;
}

ThresholdChoice select_threshold(std::span<const double> scores,
                                 std::span<const double> labels) {
  if (scores.empty() || scores.size() != labels.size()) {
    throw std::invalid_argument(
        "select_threshold: need equal-length nonempty inputs");
  }
  std::size_t positives = 0;
  for (double y : labels) positives += y > 0.5 ? 1 : 0;
  if (positives == 0) {
    throw std::invalid_argument("select_threshold: no positive labels");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  auto f1 = [positives](std::size_t tp, std::size_t predicted) {
    if (tp == 0) return 0.0;
    return 2.0 * static_cast<double>(tp) /
           static_cast<double>(predicted + positives);
  };

  // Walk cut points from the top: threshold 1 predicts nothing (scores are
  // probabilities), then each midpoint admits one more block of tied scores,
  // and threshold 0 admits every strictly positive score.
  ThresholdChoice best{1.0, 0.0};
  std::size_t tp = 0;
  std::size_t predicted = 0;
  std::size_t i = 0;
  // Scores above 1 would pass every cut point; count them up front.
  while (i < order.size() && scores[order[i]] > 1.0) {
    tp += labels[order[i]] > 0.5 ? 1 : 0;
    ++predicted;
    ++i;
  }
  best.f1 = f1(tp, predicted);
  while (i < order.size()) {
    const double block = scores[order[i]];
    if (block <= 0.0) break;
    while (i < order.size() && scores[order[i]] == block) {
      tp += labels[order[i]] > 0.5 ? 1 : 0;
      ++predicted;
      ++i;
    }
    double cut = 0.0;
    if (i < order.size()) {
      const double next = scores[order[i]];
      cut = 0.5 * (block + next);
      // Adjacent doubles can round the midpoint up onto the block itself.
      if (cut >= block) cut = next;
    }
    const double value = f1(tp, predicted);
    // Cut points are visited in decreasing order, so only strict
    // improvements move the choice away from the larger threshold.
    if (value > best.f1) best = {cut, value};
  }
  return best;
}

}  // namespace kgx
