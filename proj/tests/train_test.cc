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

#include "kgx/train.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "kgx/eval.h"
#include "kgx/formats.h"
#include "kgx/synthgen.h"
#include "test_util.h"

namespace kgx {
namespace {

using testing::SizedVocabulary;
using testing::TinyGenConfig;

TEST(DeriveSeed, DeterministicAndDistinct) {
  EXPECT_EQ(DeriveSeed(7, 1), DeriveSeed(7, 1));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 10; ++s) {
    for (std::uint64_t k = 0; k < 10; ++k) seen.insert(DeriveSeed(s, k));
  }
  EXPECT_EQ(seen.size(), 100u);
}

TEST(Lcwa, CorruptionSetOfBinaryFact) {
  const Vocabulary v = SizedVocabulary(3, 1, 1);
  const std::vector<Fact> pos = {Fact::Binary(0, 0, 1)};
  auto got = LcwaCorruptions(pos[0], pos, v);
  Canonicalize(got);
  EXPECT_EQ(got, (std::vector<Fact>{Fact::Binary(0, 0, 2), Fact::Binary(0, 2, 1)}));
}

TEST(Lcwa, ExcludesPositivesAndExhausts) {
  const Vocabulary v = SizedVocabulary(3, 1, 1);
  const std::vector<Fact> pos = {Fact::Unary(0, 0), Fact::Unary(0, 1)};
  EXPECT_EQ(LcwaCorruptions(pos[0], pos, v), (std::vector<Fact>{Fact::Unary(0, 2)}));
  const std::vector<Fact> all = {Fact::Unary(0, 0), Fact::Unary(0, 1), Fact::Unary(0, 2)};
  Rng rng(1);
  EXPECT_THROW(lcwa_corrupt(all[0], all, v, rng), LcwaExhausted);
}

TEST(Lcwa, DrawsUniformlyOverCorruptions) {
  const Vocabulary v = SizedVocabulary(5, 1, 1);
  const std::vector<Fact> pos = {Fact::Binary(0, 0, 1), Fact::Binary(0, 0, 2)};
  const auto options = LcwaCorruptions(pos[0], pos, v);
  ASSERT_EQ(options.size(), 5u);
  Rng rng(99);
  std::map<Fact, int> counts;
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) ++counts[lcwa_corrupt(pos[0], pos, v, rng)];
  ASSERT_EQ(counts.size(), options.size());
  double chi2 = 0.0;
  const double expected = static_cast<double>(draws) / options.size();
  for (const auto& [f, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 4 degrees of freedom; the 0.999 quantile is 18.47.
  EXPECT_LT(chi2, 18.47);
}

TEST(Lcwa, SampleNegativesDisjointSortedBounded) {
  const Vocabulary v = SizedVocabulary(6, 2, 2);
  const std::vector<Fact> pos = {Fact::Unary(0, 1), Fact::Binary(1, 2, 3), Fact::Binary(0, 4, 5)};
  Rng rng(3);
  const auto neg = SampleNegatives(pos, v, 4, rng);
  EXPECT_LE(neg.size(), 12u);
  EXPECT_TRUE(std::is_sorted(neg.begin(), neg.end()));
  for (const auto& f : neg) {
    EXPECT_TRUE(validate_fact(f, v));
    EXPECT_EQ(std::find(pos.begin(), pos.end(), f), pos.end());
  }
}

TEST(TrainConfig, ApplyTextAndEcho) {
  TrainConfig t;
  ModelConfig m;
  ApplyConfigText("# comment\nlr = 0.01\npatience=3\npredicate_epoch_cap=2\n"
                  "threshold_mode=per_predicate\nembedding_dim=8\n",
                  t, m);
  EXPECT_DOUBLE_EQ(t.lr, 0.01);
  EXPECT_EQ(t.patience, 3u);
  EXPECT_EQ(t.predicate_epoch_cap, std::optional<std::size_t>(2));
  EXPECT_EQ(t.threshold_mode, ThresholdMode::kPerPredicate);
  EXPECT_EQ(m.embedding_dim, 8u);
  const auto echo = ConfigEcho(t, m);
  TrainConfig t2;
  ModelConfig m2;
  for (const auto& [k, v] : echo) ApplyConfigValue(k, v, t2, m2);
  EXPECT_EQ(ConfigEcho(t2, m2), echo);
  EXPECT_THROW(ApplyConfigText("bogus=1\n", t, m), DataError);
  EXPECT_THROW(ApplyConfigText("lr=abc\n", t, m), DataError);
  EXPECT_THROW(ApplyConfigText("lr\n", t, m), DataError);
}

TEST(TrainDetectors, EarlyStopsWhenValidationDiverges) {
  const Vocabulary v = SizedVocabulary(3, 1, 1);
  Rng rng(5);
  Dataset d;
  d.vocabulary = v;
  d.dim_e = 4;
  for (int i = 0; i < 8; ++i) {
    Example ex{"t" + std::to_string(i), testing::RandomVector(4, rng),
               {Fact::Unary(0, 0), Fact::Binary(0, 1, 2)}, {}};
    d.train.push_back(ex);
    ex.positives.clear();
    ex.id = "v" + std::to_string(i);
    d.validation.push_back(ex);
  }
  DetectorBank bank = DetectorBank::Create(4, 4, 4, 4, v, rng);
  TrainConfig cfg;
  cfg.patience = 1;
  cfg.lr = 0.05;
  const auto r = train_detectors(d, bank, cfg);
  EXPECT_TRUE(r.early_stopped);
  EXPECT_EQ(r.history.size(), 2u);
  EXPECT_EQ(r.best_epoch, 1u);
  EXPECT_LT(r.history[1].train_loss, r.history[0].train_loss);
  EXPECT_GT(r.history[1].validation_loss, r.history[0].validation_loss);
}

TEST(TrainDetectors, EmptyTrainingSplitThrows) {
  Dataset d;
  d.vocabulary = SizedVocabulary(2, 1, 1);
  d.dim_e = 2;
  Rng rng(1);
  DetectorBank bank = DetectorBank::Create(2, 2, 0, 2, d.vocabulary, rng);
  EXPECT_THROW(train_detectors(d, bank, TrainConfig{}), std::invalid_argument);
}

class TinyTraining : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new GeneratedData(generate_dataset(TinyGenConfig()));
    model_cfg_.raw_width = model_cfg_.dim_e = data_->dataset.dim_e;
    model_cfg_.trunk_hidden = 16;
    model_cfg_.detector_hidden = 16;
    model_cfg_.embedding_dim = 4;
    train_cfg_.max_epochs = 15;
  }
  static void TearDownTestSuite() { delete data_; }
  static GeneratedData* data_;
  static ModelConfig model_cfg_;
  static TrainConfig train_cfg_;
};
GeneratedData* TinyTraining::data_ = nullptr;
ModelConfig TinyTraining::model_cfg_;
TrainConfig TinyTraining::train_cfg_;

TEST_F(TinyTraining, SameSeedGivesIdenticalCheckpoint) {
  const auto a = train_model(data_->dataset, model_cfg_, train_cfg_, nullptr);
  const auto b = train_model(data_->dataset, model_cfg_, train_cfg_, nullptr);
  EXPECT_EQ(save_checkpoint(a.model), save_checkpoint(b.model));
  TrainConfig other = train_cfg_;
  other.seed = 1;
  const auto c = train_model(data_->dataset, model_cfg_, other, nullptr);
  EXPECT_NE(save_checkpoint(a.model), save_checkpoint(c.model));
  EXPECT_EQ(a.model.metadata.at("seed"), "0");
}

TEST_F(TinyTraining, ZeroEpochCapLeavesScorerAtInitialization) {
  TrainConfig cfg = train_cfg_;
  cfg.predicate_epoch_cap = 0;
  const auto r = train_model(data_->dataset, model_cfg_, cfg, nullptr);
  EXPECT_TRUE(r.scorer.history.empty());
  ExtractionModel fresh = r.model;
  ResetScorer(fresh, cfg.seed);
  EXPECT_EQ(fresh.embeddings, r.model.embeddings);
  EXPECT_EQ(fresh.predicates, r.model.predicates);
}

TEST_F(TinyTraining, ScorerTrainingReducesLoss) {
  const auto r = train_model(data_->dataset, model_cfg_, train_cfg_, nullptr);
  ASSERT_GE(r.scorer.history.size(), 2u);
  EXPECT_LT(r.scorer.history.back().train_loss, r.scorer.history.front().train_loss);
  EXPECT_GE(r.scorer.best_epoch, 1u);
}

TEST_F(TinyTraining, CalibrationMaximizesTrainF1) {
  const auto r = train_model(data_->dataset, model_cfg_, train_cfg_, nullptr);
  EvalSettings s;
  s.candidates.q = train_cfg_.q;
  const auto e = evaluate(r.model, data_->dataset.train, s);
  EXPECT_NEAR(e.report.f1, r.calibration.train_f1_main, 1e-12);
}

TEST_F(TinyTraining, PerPredicateThresholdsCoverEveryPredicate) {
  TrainConfig cfg = train_cfg_;
  cfg.threshold_mode = ThresholdMode::kPerPredicate;
  const auto r = train_model(data_->dataset, model_cfg_, cfg, nullptr);
  EXPECT_EQ(r.model.thresholds.unary_mlp.size(), r.model.vocab.num_unary());
  EXPECT_EQ(r.model.thresholds.binary_mlp.size(), r.model.vocab.num_binary());
  // The reported training F1 belongs to the global threshold.
  ExtractionModel global = r.model;
  global.thresholds.unary_mlp.clear();
  global.thresholds.binary_mlp.clear();
  EvalSettings s;
  s.candidates.q = cfg.q;
  const auto e = evaluate(global, data_->dataset.train, s);
  EXPECT_NEAR(e.report.f1, r.calibration.train_f1_main, 1e-12);
}

TEST_F(TinyTraining, CalibrateRejectsSplitWithoutPositives) {
  const auto r = train_model(data_->dataset, model_cfg_, train_cfg_, nullptr);
  std::vector<Example> none = {data_->dataset.train[0]};
  none[0].positives.clear();
  EXPECT_THROW(calibrate(r.model, none, nullptr, train_cfg_), std::invalid_argument);
}

TEST(Lcwa, ForcedUnaryCorruptionAndRejection) {
  const Vocabulary v = SizedVocabulary(2, 1, 1);
  const std::vector<Fact> pos = {Fact::Unary(0, 0)};
  Rng rng(4);
  EXPECT_EQ(lcwa_corrupt(pos[0], pos, v, rng), Fact::Unary(0, 1));
  const Vocabulary big = SizedVocabulary(6, 2, 2);
  const std::vector<Fact> many = {Fact::Unary(0, 1), Fact::Unary(0, 2), Fact::Binary(1, 2, 3),
                                  Fact::Binary(1, 3, 2), Fact::Binary(1, 2, 4)};
  for (int i = 0; i < 10000; ++i) {
    const Fact& f = many[i % many.size()];
    const Fact c = lcwa_corrupt(f, many, big, rng);
    EXPECT_EQ(std::find(many.begin(), many.end(), c), many.end());
  }
}

TEST(TrainDetectors, SeparableDataAndDeterminism) {
  const Vocabulary v = SizedVocabulary(4, 2, 2);
  Dataset d;
  d.vocabulary = v;
  d.dim_e = 8;
  Rng rng(8);
  // Each symbol lights up its own coordinate.
  for (int i = 0; i < 40; ++i) {
    const auto s = static_cast<SymbolId>(rng.below(4));
    const auto o = static_cast<SymbolId>((s + 1 + rng.below(3)) % 4);
    const auto c = static_cast<SymbolId>(rng.below(2));
    const auto r = static_cast<SymbolId>(rng.below(2));
    Example ex{"x" + std::to_string(i), std::vector<double>(8, 0.0),
               {Fact::Unary(c, s), Fact::Binary(r, s, o)}, {}};
    Canonicalize(ex.positives);
    ex.encoding[s] = ex.encoding[o] = 1.0;
    ex.encoding[4 + c] = 1.0;
    ex.encoding[6 + r] = 1.0;
    (i < 30 ? d.train : d.validation).push_back(ex);
  }
  TrainConfig cfg;
  cfg.max_epochs = 30;
  cfg.lr = 0.01;
  DetectorBank a = DetectorBank::Create(8, 8, 8, 8, v, rng);
  DetectorBank b = a;
  const auto ra = train_detectors(d, a, cfg);
  const auto rb = train_detectors(d, b, cfg);
  EXPECT_LT(ra.history.back().validation_loss, ra.history.front().validation_loss);
  ASSERT_EQ(ra.history.size(), rb.history.size());
  for (std::size_t i = 0; i < ra.history.size(); ++i) {
    EXPECT_EQ(ra.history[i].train_loss, rb.history[i].train_loss);
    EXPECT_EQ(ra.history[i].validation_loss, rb.history[i].validation_loss);
  }
}

TEST_F(TinyTraining, ScorerTrainingMovesTrunkAndBeatsInitialLoss) {
  ExtractionModel m =
      ExtractionModel::Create(data_->dataset.vocabulary, model_cfg_, train_cfg_.seed);
  ResetScorer(m, train_cfg_.seed);
  const DetectorBank before = m.detectors;
  auto loss_of = [&](const ExtractionModel& model) {
    std::vector<std::vector<double>> encodings;
    for (const auto& ex : data_->dataset.train) {
      encodings.push_back(model.detectors.trunk.Forward(ex.encoding));
    }
    std::vector<ScorerSample> batch;
    for (std::size_t i = 0; i < data_->dataset.train.size(); ++i) {
      for (const auto& f : data_->dataset.train[i].positives) batch.push_back({f, encodings[i], 1.0});
      for (const auto& f : data_->dataset.train[i].negatives) batch.push_back({f, encodings[i], 0.0});
    }
    return scorer_loss(batch, model.embeddings, model.predicates);
  };
  const double initial = loss_of(m);
  train_scorer(data_->dataset, m.detectors, m.embeddings, m.predicates, train_cfg_);
  EXPECT_NE(m.detectors.trunk, before.trunk);
  EXPECT_EQ(m.detectors.individuals, before.individuals);
  EXPECT_LT(loss_of(m), initial);
}

TEST_F(TinyTraining, CalibrationIsReproducibleAndBounded) {
  const auto r = train_model(data_->dataset, model_cfg_, train_cfg_, nullptr);
  const Calibration a = calibrate(r.model, data_->dataset.train, nullptr, train_cfg_);
  const Calibration b = calibrate(r.model, data_->dataset.train, nullptr, train_cfg_);
  EXPECT_EQ(a.thresholds, b.thresholds);
  EXPECT_EQ(a.fusion, b.fusion);
  for (double t : {a.thresholds.mlp_threshold, a.thresholds.fusion_threshold}) {
    EXPECT_GE(t, 0.0);
    EXPECT_LE(t, 1.0);
  }
}

TEST(Calibrate, PerfectScorerCalibratesToOne) {
  // One-hot individual vectors and hand-set linear MLPs that separate the
  // labeled facts exactly.
  const Vocabulary v = SizedVocabulary(3, 1, 1);
  ModelConfig mc;
  mc.raw_width = mc.dim_e = 2;
  mc.trunk_hidden = 0;
  mc.detector_hidden = 2;
  mc.embedding_dim = 3;
  ExtractionModel m = ExtractionModel::Create(v, mc, 0);
  m.embeddings.values = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  // unary: true iff subject is i0; binary: true iff subject is i1.
  auto set_linear = [](DenseNet& net, std::vector<double> w) {
    net = DenseNet(net.input_width(), {{net.input_width(), 1, Activation::kSigmoid}});
    for (std::size_t i = 0; i < w.size(); ++i) net.params()[i] = w[i];
    net.params()[w.size()] = -10.0;
  };
  set_linear(m.predicates.unary[0], {0, 0, 20, 0, 0});
  set_linear(m.predicates.binary[0], {0, 0, 0, 20, 0, 0, 0, 0});
  std::vector<Example> train = {
      {"a", {0.0, 0.0}, {Fact::Unary(0, 0), Fact::Binary(0, 1, 2)},
       {Fact::Unary(0, 1), Fact::Binary(0, 2, 1)}}};
  TrainConfig cfg;
  const Calibration c = calibrate(m, train, nullptr, cfg);
  EXPECT_DOUBLE_EQ(c.train_f1_main, 1.0);
}

}  // namespace
}  // namespace kgx
