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

#ifndef KGX_DETECTOR_H_
#define KGX_DETECTOR_H_

#include <span>
#include <vector>

#include "kgx/core.h"
#include "kgx/nnet.h"

namespace kgx {

// Detection stage: a shared trunk over the raw encoding followed by three
// one-hidden-layer multi-label heads for individuals, unary predicates and
// binary predicates.
struct DetectorBank {
  DenseNet trunk;
  DenseNet individuals;
  DenseNet classes;
  DenseNet relations;

  // `trunk_hidden == 0` makes the trunk the identity (raw width must then
  // equal dim_e).
  static DetectorBank Create(std::size_t raw_width, std::size_t dim_e,
                             std::size_t trunk_hidden, std::size_t head_hidden,
                             const Vocabulary& vocab, Rng& rng);

  std::size_t dim_e() const { return trunk.output_width(); }
};

struct DetectionOutput {
  std::vector<double> individuals;
  std::vector<double> classes;
  std::vector<double> relations;
};

DetectionOutput detect(const DetectorBank& bank,
                       std::span<const double> encoding);

// Detection from an already computed trunk output.
DetectionOutput DetectFromTrunk(const DetectorBank& bank,
                                std::span<const double> trunk_output);

// 0/1 presence vectors: a symbol is marked iff it occurs in at least one
// positive fact of the example.
struct PresenceTargets {
  std::vector<double> individuals;
  std::vector<double> classes;
  std::vector<double> relations;
};

PresenceTargets presence_targets(const Example& example,
                                 std::size_t num_individuals,
                                 std::size_t num_classes,
                                 std::size_t num_relations);

// Sum of the three per-head binary cross-entropies.
double detector_loss(const DetectionOutput& out, const Example& example);

struct DetectorGradients {
  std::vector<double> trunk;
  std::vector<double> individuals;
  std::vector<double> classes;
  std::vector<double> relations;

  static DetectorGradients ZerosLike(const DetectorBank& bank);
  void Scale(double factor);
};

// Loss of one example; `weight * d(loss)` is accumulated into `grads`.
double DetectorLossAndGrad(const DetectorBank& bank, const Example& example,
                           double weight, DetectorGradients& grads);

}  // namespace kgx

#endif  // KGX_DETECTOR_H_
