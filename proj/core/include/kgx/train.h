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

// Training: LCWA negative sampling, early-stopped epoch loops for the
// detectors and the predicate MLPs, and calibration of thresholds and the
// fusion regressor on the training split.

#ifndef KGX_TRAIN_H_
#define KGX_TRAIN_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kgx/bgk.h"
#include "kgx/combiner.h"
#include "kgx/core.h"
#include "kgx/detector.h"
#include "kgx/model.h"
#include "kgx/random.h"
#include "kgx/scorer.h"

namespace kgx {

enum class ThresholdMode { kGlobal, kPerPredicate };

struct TrainConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  std::size_t patience = 7;
  std::size_t max_epochs = 100;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  std::size_t neg_ratio = 4;
  // Caps predicate-MLP epochs; 0 leaves the scorer at its initialization.
  std::optional<std::size_t> predicate_epoch_cap;
  // Draw fresh LCWA negatives every epoch instead of using the stored ones.
  bool resample_negatives = false;
  // Candidate pool used when calibrating thresholds.
  std::size_t q = 1000;
  ThresholdMode threshold_mode = ThresholdMode::kGlobal;
  std::size_t fusion_steps = 500;
  double fusion_lr = 0.05;

  void Validate() const;
};

// Applies `key=value` lines ('#' starts a comment). Keys name TrainConfig
// and ModelConfig fields. Throws DataError on unknown keys or bad values.
void ApplyConfigText(std::string_view text, TrainConfig& train,
                     ModelConfig& model);
void ApplyConfigValue(std::string_view key, std::string_view value,
                      TrainConfig& train, ModelConfig& model);
std::map<std::string, std::string> ConfigEcho(const TrainConfig& train,
                                              const ModelConfig& model);

// Independent, reproducible sub-streams of one user seed.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

class LcwaExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every fact reachable by replacing one argument of `fact` with another
// individual, excluding positives and reflexive binary facts.
std::vector<Fact> LcwaCorruptions(const Fact& fact,
                                  std::span<const Fact> positives,
                                  const Vocabulary& vocab);

// Uniform draw from LcwaCorruptions. Throws LcwaExhausted if it is empty.
Fact lcwa_corrupt(const Fact& fact, std::span<const Fact> positives,
                  const Vocabulary& vocab, Rng& rng);

// Up to `neg_ratio` corruptions per positive, deduplicated and sorted.
// Positives with no valid corruption contribute none.
std::vector<Fact> SampleNegatives(std::span<const Fact> positives,
                                  const Vocabulary& vocab,
                                  std::size_t neg_ratio, Rng& rng);

struct EpochRecord {
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 1-based; 0 if no epoch ran
  bool early_stopped = false;
};

// Early stopping on validation loss (training loss when the validation
// split is empty); the bank is left at its best-validation snapshot.
// Throws std::invalid_argument on an empty training split.
TrainResult train_detectors(const Dataset& dataset, DetectorBank& bank,
                            const TrainConfig& cfg);

// Trains the predicate MLPs and individual vectors on labeled positives and
// LCWA negatives. Gradients also flow through the shared trunk in `bank`.
TrainResult train_scorer(const Dataset& dataset, DetectorBank& bank,
                         EmbeddingTable& emb, PredicateMlps& mlps,
                         const TrainConfig& cfg);

struct Calibration {
  ThresholdSet thresholds;
  FusionRegressor fusion;
  double train_f1_main = 0.0;
  double train_f1_extended = 0.0;
};

// Scores every labeled training fact through the full pipeline, fits the
// fusion regressor on (main, bk) pairs and picks the F1-optimal thresholds.
// Facts outside the candidate set score 0 and so are never accepted.
// Throws std::invalid_argument when the split has no positive facts.
Calibration calibrate(const ExtractionModel& model,
                      std::span<const Example> train, const BkStats* stats,
                      const TrainConfig& cfg);

struct TrainReport {
  ExtractionModel model;
  TrainResult detectors;
  TrainResult scorer;
  Calibration calibration;
};

// Detectors, then the scorer, then calibration.
TrainReport train_model(const Dataset& dataset, const ModelConfig& model_cfg,
                        const TrainConfig& cfg, const BkStats* stats);

// Re-initializes embeddings and predicate MLPs from the config seed.
void ResetScorer(ExtractionModel& model, std::uint64_t seed);

}  // namespace kgx

#endif  // KGX_TRAIN_H_
