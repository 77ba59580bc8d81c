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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "kgx/numfmt.h"

namespace kgx {
namespace {

// Stream ids for DeriveSeed.
constexpr std::uint64_t kDetectorShuffle = 1;
constexpr std::uint64_t kScorerShuffle = 2;
constexpr std::uint64_t kScorerInit = 3;
constexpr std::uint64_t kNegativeResample = 4;

double Mean(double total, std::size_t n) {
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

// Early-stopping bookkeeping shared by both training loops.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  // Returns true when this epoch is the new best.
  bool Record(double loss, std::size_t epoch) {
    if (loss < best_) {
      best_ = loss;
      best_epoch_ = epoch;
      stale_ = 0;
      return true;
    }
    ++stale_;
    return false;
  }
  bool ShouldStop() const { return stale_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }

 private:
  std::size_t patience_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t best_epoch_ = 0;
  std::size_t stale_ = 0;
};

void StepNet(DenseNet& net, std::span<const double> grads, AdamState& state) {
  adam_step(net.params(), grads, state);
}

struct LabeledItem {
  std::uint32_t example = 0;
  Fact fact;
  double label = 0.0;
};

std::vector<LabeledItem> LabeledItems(std::span<const Example> examples) {
  std::vector<LabeledItem> items;
  for (std::uint32_t i = 0; i < examples.size(); ++i) {
    for (const auto& f : examples[i].positives) items.push_back({i, f, 1.0});
    for (const auto& f : examples[i].negatives) items.push_back({i, f, 0.0});
  }
  return items;
}

double ScorerSplitLoss(std::span<const Example> examples,
                       const DetectorBank& bank, const EmbeddingTable& emb,
                       const PredicateMlps& mlps) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& ex : examples) {
    const auto z = bank.trunk.Forward(ex.encoding);
    std::vector<ScorerSample> batch;
    for (const auto& f : ex.positives) batch.push_back({f, z, 1.0});
    for (const auto& f : ex.negatives) batch.push_back({f, z, 0.0});
    if (batch.empty()) continue;
    total += scorer_loss(batch, emb, mlps) * static_cast<double>(batch.size());
    n += batch.size();
  }
  return Mean(total, n);
}

}  // namespace

void TrainConfig::Validate() const {
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (neg_ratio < 1) throw std::invalid_argument("neg_ratio must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must lie in (0,1)");
  }
}

void ApplyConfigValue(std::string_view key, std::string_view value,
                      TrainConfig& t, ModelConfig& m) {
  const std::string what = "config key '" + std::string(key) + "'";
  auto size = [&] { return ParseInteger<std::size_t>(value, what); };
  auto real = [&] {
    try {
      return ParseDouble(value);
    } catch (const DataError&) {
      throw DataError("invalid value '" + std::string(value) + "' for " + what);
    }
  };
  if (key == "lr") t.lr = real();
  else if (key == "beta1") t.beta1 = real();
  else if (key == "beta2") t.beta2 = real();
  else if (key == "patience") t.patience = size();
  else if (key == "max_epochs") t.max_epochs = size();
  else if (key == "batch_size") t.batch_size = size();
  else if (key == "seed") t.seed = ParseInteger<std::uint64_t>(value, what);
  else if (key == "neg_ratio") t.neg_ratio = size();
  else if (key == "predicate_epoch_cap") {
    if (value == "none" || value.empty()) t.predicate_epoch_cap.reset();
    else t.predicate_epoch_cap = size();
  }
  else if (key == "resample_negatives") t.resample_negatives = ParseBool(value, what);
  else if (key == "q") t.q = size();
  else if (key == "threshold_mode") {
    if (value == "global") t.threshold_mode = ThresholdMode::kGlobal;
    else if (value == "per_predicate") t.threshold_mode = ThresholdMode::kPerPredicate;
    else throw DataError("config: threshold_mode must be global|per_predicate");
  }
  else if (key == "fusion_steps") t.fusion_steps = size();
  else if (key == "fusion_lr") t.fusion_lr = real();
  else if (key == "raw_width") m.raw_width = size();
  else if (key == "dim_e") m.dim_e = size();
  else if (key == "trunk_hidden") m.trunk_hidden = size();
  else if (key == "detector_hidden") m.detector_hidden = size();
  else if (key == "embedding_dim") m.embedding_dim = size();
  else throw DataError("config: unknown key '" + std::string(key) + "'");
}

void ApplyConfigText(std::string_view text, TrainConfig& train,
                     ModelConfig& model) {
  for (const auto& [key, value] : ParseKeyValueLines(text)) {
    ApplyConfigValue(key, value, train, model);
  }
}

std::map<std::string, std::string> ConfigEcho(const TrainConfig& t,
                                              const ModelConfig& m) {
  std::map<std::string, std::string> out;
  out["lr"] = FormatDouble(t.lr);
  out["beta1"] = FormatDouble(t.beta1);
  out["beta2"] = FormatDouble(t.beta2);
  out["patience"] = std::to_string(t.patience);
  out["max_epochs"] = std::to_string(t.max_epochs);
  out["batch_size"] = std::to_string(t.batch_size);
  out["seed"] = std::to_string(t.seed);
  out["neg_ratio"] = std::to_string(t.neg_ratio);
  out["predicate_epoch_cap"] = t.predicate_epoch_cap
                                   ? std::to_string(*t.predicate_epoch_cap)
                                   : "none";
  out["resample_negatives"] = t.resample_negatives ? "true" : "false";
  out["q"] = std::to_string(t.q);
  out["threshold_mode"] =
      t.threshold_mode == ThresholdMode::kGlobal ? "global" : "per_predicate";
  out["fusion_steps"] = std::to_string(t.fusion_steps);
  out["fusion_lr"] = FormatDouble(t.fusion_lr);
  out["raw_width"] = std::to_string(m.raw_width);
  out["dim_e"] = std::to_string(m.dim_e);
  out["trunk_hidden"] = std::to_string(m.trunk_hidden);
  out["detector_hidden"] = std::to_string(m.detector_hidden);
  out["embedding_dim"] = std::to_string(m.embedding_dim);
  return out;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<Fact> LcwaCorruptions(const Fact& fact,
                                  std::span<const Fact> positives,
                                  const Vocabulary& vocab) {
  const auto n = static_cast<SymbolId>(vocab.num_individuals());
  auto is_positive = [&](const Fact& f) {
    return std::find(positives.begin(), positives.end(), f) != positives.end();
  };
  std::vector<Fact> out;
  // Position 0 replaces the subject, position 1 the object.
  const int positions = fact.is_binary() ? 2 : 1;
  for (int pos = 0; pos < positions; ++pos) {
    const SymbolId current = pos == 0 ? fact.subject : fact.object;
    for (SymbolId x = 0; x < n; ++x) {
      if (x == current) continue;
      Fact f = fact;
      (pos == 0 ? f.subject : f.object) = x;
      if (f.is_binary() && f.subject == f.object) continue;
      if (!is_positive(f)) out.push_back(f);
    }
  }
  return out;
}

Fact lcwa_corrupt(const Fact& fact, std::span<const Fact> positives,
                  const Vocabulary& vocab, Rng& rng) {
  const auto options = LcwaCorruptions(fact, positives, vocab);
  if (options.empty()) {
    throw LcwaExhausted("no valid LCWA corruption for " +
                        FormatFact(fact, vocab));
  }
  return options[rng.below(options.size())];
}

std::vector<Fact> SampleNegatives(std::span<const Fact> positives,
                                  const Vocabulary& vocab,
                                  std::size_t neg_ratio, Rng& rng) {
  std::vector<Fact> negatives;
  for (const auto& p : positives) {
    const auto options = LcwaCorruptions(p, positives, vocab);
    if (options.empty()) continue;
    for (std::size_t k = 0; k < neg_ratio; ++k) {
      negatives.push_back(options[rng.below(options.size())]);
    }
  }
  Canonicalize(negatives);
  return negatives;
}

TrainResult train_detectors(const Dataset& dataset, DetectorBank& bank,
                            const TrainConfig& cfg) {
  cfg.Validate();
  if (dataset.train.empty()) {
    throw std::invalid_argument("train_detectors: empty training split");
  }
  Rng rng(DeriveSeed(cfg.seed, kDetectorShuffle));
  auto adam = [&](const DenseNet& net) {
    return AdamState::For(net.num_params(), cfg.lr, cfg.beta1, cfg.beta2);
  };
  AdamState a_trunk = adam(bank.trunk), a_ind = adam(bank.individuals),
            a_cls = adam(bank.classes), a_rel = adam(bank.relations);

  const auto& valid =
      dataset.validation.empty() ? dataset.train : dataset.validation;
  std::vector<std::size_t> order(dataset.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  EarlyStopper stopper(cfg.patience);
  DetectorBank best = bank;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double train_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double weight = 1.0 / static_cast<double>(end - start);
      auto grads = DetectorGradients::ZerosLike(bank);
      for (std::size_t b = start; b < end; ++b) {
        train_total +=
            DetectorLossAndGrad(bank, dataset.train[order[b]], weight, grads);
      }
      StepNet(bank.trunk, grads.trunk, a_trunk);
      StepNet(bank.individuals, grads.individuals, a_ind);
      StepNet(bank.classes, grads.classes, a_cls);
      StepNet(bank.relations, grads.relations, a_rel);
    }
    double valid_total = 0.0;
    for (const auto& ex : valid) {
      valid_total += detector_loss(detect(bank, ex.encoding), ex);
    }
    EpochRecord rec{Mean(train_total, order.size()),
                    Mean(valid_total, valid.size())};
    result.history.push_back(rec);
    if (stopper.Record(rec.validation_loss, epoch)) best = bank;
    if (stopper.ShouldStop()) {
      result.early_stopped = true;
      break;
    }
  }
  result.best_epoch = stopper.best_epoch();
  bank = std::move(best);
  return result;
}

TrainResult train_scorer(const Dataset& dataset, DetectorBank& bank,
                         EmbeddingTable& emb, PredicateMlps& mlps,
                         const TrainConfig& cfg) {
  cfg.Validate();
  if (dataset.train.empty()) {
    throw std::invalid_argument("train_scorer: empty training split");
  }
  TrainResult result;
  const std::size_t epochs =
      std::min(cfg.max_epochs, cfg.predicate_epoch_cap.value_or(cfg.max_epochs));
  if (epochs == 0) return result;

  Rng rng(DeriveSeed(cfg.seed, kScorerShuffle));
  Rng neg_rng(DeriveSeed(cfg.seed, kNegativeResample));
  auto adam = [&](std::size_t n) {
    return AdamState::For(n, cfg.lr, cfg.beta1, cfg.beta2);
  };
  AdamState a_trunk = adam(bank.trunk.num_params());
  std::vector<AdamState> a_rows(emb.rows(), adam(emb.dim));
  std::vector<AdamState> a_unary, a_binary;
  for (const auto& net : mlps.unary) a_unary.push_back(adam(net.num_params()));
  for (const auto& net : mlps.binary) a_binary.push_back(adam(net.num_params()));

  const std::span<const Example> valid =
      dataset.validation.empty() ? std::span<const Example>(dataset.train)
                                 : std::span<const Example>(dataset.validation);
  std::vector<Example> resampled;
  auto train_items = LabeledItems(dataset.train);

  EarlyStopper stopper(cfg.patience);
  DenseNet best_trunk = bank.trunk;
  EmbeddingTable best_emb = emb;
  PredicateMlps best_mlps = mlps;

  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    if (cfg.resample_negatives) {
      resampled = dataset.train;
      for (auto& ex : resampled) {
        ex.negatives = SampleNegatives(ex.positives, dataset.vocabulary,
                                       cfg.neg_ratio, neg_rng);
      }
      train_items = LabeledItems(resampled);
    }
    const auto& source = cfg.resample_negatives ? resampled : dataset.train;
    rng.shuffle(train_items);

    double train_total = 0.0;
    for (std::size_t start = 0; start < train_items.size();
         start += cfg.batch_size) {
      const std::size_t end =
          std::min(train_items.size(), start + cfg.batch_size);

      // One trunk pass per distinct video in the batch.
      std::vector<std::uint32_t> videos;
      std::vector<DenseNet::Trace> traces;
      std::vector<std::size_t> slot_of(end - start);
      for (std::size_t b = start; b < end; ++b) {
        const auto ex = train_items[b].example;
        auto it = std::find(videos.begin(), videos.end(), ex);
        if (it == videos.end()) {
          videos.push_back(ex);
          traces.push_back(bank.trunk.ForwardTrace(source[ex].encoding));
          it = videos.end() - 1;
        }
        slot_of[b - start] = static_cast<std::size_t>(it - videos.begin());
      }

      std::vector<ScorerSample> batch;
      batch.reserve(end - start);
      for (std::size_t b = start; b < end; ++b) {
        const auto& item = train_items[b];
        batch.push_back(
            {item.fact, traces[slot_of[b - start]].output(), item.label});
      }
      auto grads = ScorerGradients::ZerosLike(emb, mlps);
      std::vector<std::vector<double>> enc_grads(
          batch.size(), std::vector<double>(bank.trunk.output_width(), 0.0));
      train_total += ScorerLossAndGrad(batch, emb, mlps, grads, &enc_grads) *
                     static_cast<double>(batch.size());

      std::vector<double> trunk_grads(bank.trunk.num_params(), 0.0);
      for (std::size_t v = 0; v < videos.size(); ++v) {
        std::vector<double> g(bank.trunk.output_width(), 0.0);
        for (std::size_t k = 0; k < batch.size(); ++k) {
          if (slot_of[k] != v) continue;
          for (std::size_t d = 0; d < g.size(); ++d) g[d] += enc_grads[k][d];
        }
        bank.trunk.Backward(traces[v], g, trunk_grads);
      }
      StepNet(bank.trunk, trunk_grads, a_trunk);

      // Only individuals and predicates that occur in the batch are updated.
      std::vector<bool> row_touched(emb.rows(), false);
      std::vector<bool> unary_touched(mlps.unary.size(), false);
      std::vector<bool> binary_touched(mlps.binary.size(), false);
      for (const auto& s : batch) {
        row_touched[s.fact.subject] = true;
        if (s.fact.is_binary()) {
          row_touched[s.fact.object] = true;
          binary_touched[s.fact.predicate] = true;
        } else {
          unary_touched[s.fact.predicate] = true;
        }
      }
      for (SymbolId r = 0; r < emb.rows(); ++r) {
        if (!row_touched[r]) continue;
        adam_step(std::span<double>(emb.values).subspan(r * emb.dim, emb.dim),
                  std::span<const double>(grads.embeddings)
                      .subspan(r * emb.dim, emb.dim),
                  a_rows[r]);
      }
      for (std::size_t p = 0; p < mlps.unary.size(); ++p) {
        if (unary_touched[p]) StepNet(mlps.unary[p], grads.unary[p], a_unary[p]);
      }
      for (std::size_t p = 0; p < mlps.binary.size(); ++p) {
        if (binary_touched[p]) {
          StepNet(mlps.binary[p], grads.binary[p], a_binary[p]);
        }
      }
    }

    EpochRecord rec{Mean(train_total, train_items.size()),
                    ScorerSplitLoss(valid, bank, emb, mlps)};
    result.history.push_back(rec);
    if (stopper.Record(rec.validation_loss, epoch)) {
      best_trunk = bank.trunk;
      best_emb = emb;
      best_mlps = mlps;
    }
    if (stopper.ShouldStop()) {
      result.early_stopped = true;
      break;
    }
  }
  result.best_epoch = stopper.best_epoch();
  bank.trunk = std::move(best_trunk);
  emb = std::move(best_emb);
  mlps = std::move(best_mlps);
  return result;
}

Calibration calibrate(const ExtractionModel& model,
                      std::span<const Example> train, const BkStats* stats,
                      const TrainConfig& cfg) {
  CandidateConfig cand;
  cand.q = cfg.q;

  struct Scored {
    Fact fact;
    FactScores scores;
    bool candidate = false;
    double label = 0.0;
  };
  std::vector<Scored> rows;
  for (const auto& ex : train) {
    const VideoAnalysis video = Analyze(model, ex.encoding);
    std::unordered_set<Fact, FactHash> pool;
    for (const auto& c : generate_candidates(video.detection, model.vocab, cand)) {
      pool.insert(c.fact);
    }
    auto add = [&](const Fact& f, double label) {
      rows.push_back({f, ScoreFact(model, video, f, stats), pool.count(f) > 0,
                      label});
    };
    for (const auto& f : ex.positives) add(f, 1.0);
    for (const auto& f : ex.negatives) add(f, 0.0);
  }
  const bool any_positive = std::any_of(
      rows.begin(), rows.end(), [](const Scored& r) { return r.label > 0.5; });
  if (!any_positive) {
    throw std::invalid_argument("calibrate: no positive facts in split");
  }

  Calibration out;
  std::vector<FusionSample> fusion_samples;
  fusion_samples.reserve(rows.size());
  bool any_negative = false;
  for (const auto& r : rows) {
    fusion_samples.push_back({r.scores.main, r.scores.bk, r.label});
    any_negative |= r.label < 0.5;
  }
  if (any_negative) {
    out.fusion = train_fusion(fusion_samples, {cfg.fusion_steps, cfg.fusion_lr});
  }

  std::vector<double> main_gated, fused_gated, labels;
  for (const auto& r : rows) {
    const double fused = fuse(r.scores.main, r.scores.bk, out.fusion);
    main_gated.push_back(r.candidate ? r.scores.main : 0.0);
    fused_gated.push_back(r.candidate ? fused : 0.0);
    labels.push_back(r.label);
  }
  const auto main_choice = select_threshold(main_gated, labels);
  const auto fused_choice = select_threshold(fused_gated, labels);
  out.thresholds.mlp_threshold = main_choice.threshold;
  out.thresholds.fusion_threshold = fused_choice.threshold;
  out.train_f1_main = main_choice.f1;
  out.train_f1_extended = fused_choice.f1;

  if (cfg.threshold_mode == ThresholdMode::kPerPredicate) {
    auto per_predicate = [&](PredicateKind kind, std::size_t count) {
      std::vector<double> thresholds(count, main_choice.threshold);
      for (SymbolId p = 0; p < count; ++p) {
        std::vector<double> s, y;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].fact.kind != kind || rows[i].fact.predicate != p) continue;
          s.push_back(main_gated[i]);
          y.push_back(labels[i]);
        }
        if (std::find(y.begin(), y.end(), 1.0) == y.end()) continue;
        thresholds[p] = select_threshold(s, y).threshold;
      }
      return thresholds;
    };
    out.thresholds.unary_mlp =
        per_predicate(PredicateKind::kUnary, model.vocab.num_unary());
    out.thresholds.binary_mlp =
        per_predicate(PredicateKind::kBinary, model.vocab.num_binary());
  }
  return out;
}

void ResetScorer(ExtractionModel& model, std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, kScorerInit));
  model.embeddings = EmbeddingTable::Create(model.vocab.num_individuals(),
                                            model.config.embedding_dim, rng);
  model.predicates = PredicateMlps::Create(
      model.config.dim_e, model.config.embedding_dim, model.vocab.num_unary(),
      model.vocab.num_binary(), rng);
}

TrainReport train_model(const Dataset& dataset, const ModelConfig& model_cfg,
                        const TrainConfig& cfg, const BkStats* stats) {
  if (model_cfg.raw_width != dataset.dim_e) {
    throw std::invalid_argument("model raw_width " +
                                std::to_string(model_cfg.raw_width) +
                                " does not match dataset dim_e " +
                                std::to_string(dataset.dim_e));
  }
  TrainReport report{ExtractionModel::Create(dataset.vocabulary, model_cfg,
                                             cfg.seed),
                     {}, {}, {}};
  ExtractionModel& m = report.model;
  ResetScorer(m, cfg.seed);
  report.detectors = train_detectors(dataset, m.detectors, cfg);
  report.scorer =
      train_scorer(dataset, m.detectors, m.embeddings, m.predicates, cfg);
  report.calibration = calibrate(m, dataset.train, stats, cfg);
  m.thresholds = report.calibration.thresholds;
  m.fusion = report.calibration.fusion;
  m.metadata = ConfigEcho(cfg, model_cfg);
  return report;
}

}  // namespace kgx
