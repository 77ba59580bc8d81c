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

// Metrics and experiment harnesses. All metrics are micro-averaged over the
// labeled facts (positives and stored negatives) of every example.

#ifndef KGX_EVAL_H_
#define KGX_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kgx/bgk.h"
#include "kgx/combiner.h"
#include "kgx/core.h"
#include "kgx/model.h"
#include "kgx/train.h"

namespace kgx {

struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct MetricsReport {
  double f1 = 0.0;
  double precision = 0.0;
  double positive_accuracy = 0.0;  // recall
  double negative_accuracy = 0.0;  // specificity
  double total_accuracy = 0.0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Ratios with an empty denominator are reported as 0.
MetricsReport metrics(const Confusion& c);

// True when any ratio in metrics(c) fell back to 0.
bool HasDegenerateDenominator(const Confusion& c);

struct EvalSettings {
  CandidateConfig candidates;
  InferenceMode mode = InferenceMode::kMain;
  const BkStats* stats = nullptr;
};

// A labeled fact counts as predicted true iff it is a candidate and passes
// the threshold of the selected mode.
Confusion evaluate_example(const ExtractionModel& model, const Example& example,
                           const EvalSettings& settings);

struct EvalResult {
  Confusion confusion;
  MetricsReport report;
  // Fraction of positives inside the candidate sets.
  double candidate_recall = 0.0;
};

// Splits the examples across WorkerCount() threads; results do not depend on
// the thread count.
EvalResult evaluate(const ExtractionModel& model,
                    std::span<const Example> examples,
                    const EvalSettings& settings);

// KGX_THREADS when set to a positive integer, otherwise 1.
std::size_t WorkerCount();

struct AblationResult {
  EvalResult top_q;
  EvalResult threshold_product;
};

// Evaluates `top_q` and `threshold_product` settings on the same model.
AblationResult ablate_combiner(const ExtractionModel& model,
                               std::span<const Example> examples,
                               const EvalSettings& top_q,
                               const EvalSettings& threshold_product);

struct SweepQRow {
  std::size_t q = 0;
  EvalResult result;
  // Median over repeats of full inference (candidate generation and MLP
  // scoring of every candidate) across all examples.
  double wall_time_ms = 0.0;
};

// Throws std::invalid_argument unless `qs` is nonempty and ascending.
std::vector<SweepQRow> sweep_q(const ExtractionModel& model,
                               std::span<const Example> examples,
                               std::span<const std::size_t> qs,
                               const EvalSettings& base, int repeats = 3);

struct SweepEpochRow {
  std::size_t cap = 0;
  double f1_main = 0.0;
  double f1_extended = 0.0;
};

// Trains the detectors once, then for every cap a fresh scorer from the same
// seed, calibrates it with `stats` and evaluates both modes on the test
// split. Caps must be ascending and start at 0.
std::vector<SweepEpochRow> sweep_epochs(const Dataset& dataset,
                                        const ModelConfig& model_cfg,
                                        const TrainConfig& train_cfg,
                                        std::span<const std::size_t> caps,
                                        const BkStats* stats);

// Variant reusing already-trained detectors in `base`.
std::vector<SweepEpochRow> sweep_epochs(const Dataset& dataset,
                                        const ExtractionModel& base,
                                        const TrainConfig& train_cfg,
                                        std::span<const std::size_t> caps,
                                        const BkStats* stats);

}  // namespace kgx

#endif  // KGX_EVAL_H_
