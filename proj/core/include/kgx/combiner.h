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

// Candidate fact generation from detector outputs.
//
// The joint presence probability of a fact is the product of the detector
// probabilities of its symbols: p_ind[s] * p_cls[c] for c(s) and
// (p_ind[s] * p_ind[o]) * p_rel[r] for r(s, o). It bounds the probability of
// the fact itself, so only the q facts with the largest joint are scored by
// the predicate MLPs.

#ifndef KGX_COMBINER_H_
#define KGX_COMBINER_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "kgx/core.h"
#include "kgx/detector.h"

namespace kgx {

enum class CandidateStrategy { kTopQ, kThresholdProduct };

std::string_view StrategyName(CandidateStrategy s);

struct CandidateConfig {
  CandidateStrategy strategy = CandidateStrategy::kTopQ;
  std::size_t q = 1000;
  // Used by kThresholdProduct; a symbol passes if its probability is
  // strictly greater than its threshold.
  double tau_ind = 0.5;
  double tau_cls = 0.5;
  double tau_rel = 0.5;

  // Throws std::invalid_argument on q == 0 or thresholds outside [0,1].
  void Validate() const;
};

struct Candidate {
  Fact fact;
  double joint = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Ranking order: joint descending, then canonical fact order.
bool RanksBefore(const Candidate& a, const Candidate& b);

// Throws std::invalid_argument if the fact does not fit the detection
// output's dimensions.
double joint_score(const Fact& fact, const DetectionOutput& det);

// kTopQ: exactly min(q, universe) candidates drawn from one pool of unary and
// binary facts. Facts are produced lazily by a best-first walk over the
// probability-sorted symbol lists, so only O(q) facts are materialized
// (plus any facts tied with the q-th joint).
// kThresholdProduct: every fact whose component probabilities all exceed
// their thresholds.
// Both return candidates in ranking order.
std::vector<Candidate> generate_candidates(const DetectionOutput& det,
                                           const Vocabulary& vocab,
                                           const CandidateConfig& cfg);

// Fraction of `positives` present among the candidates; 1 when there are no
// positives.
double candidate_recall(std::span<const Candidate> candidates,
                        std::span<const Fact> positives);

}  // namespace kgx

#endif  // KGX_COMBINER_H_
