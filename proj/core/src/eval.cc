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

#include "kgx/eval.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>

namespace kgx {
namespace {

double Ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

struct Partial {
  Confusion confusion;
  std::uint64_t positives = 0;
  std::uint64_t covered = 0;
};

Partial EvaluateRange(const ExtractionModel& model,
                      std::span<const Example> examples,
                      const EvalSettings& settings) {
  Partial out;
  for (const auto& ex : examples) {
    out.confusion += evaluate_example(model, ex, settings);
    const VideoAnalysis video = Analyze(model, ex.encoding);
    const auto cands =
        generate_candidates(video.detection, model.vocab, settings.candidates);
    std::unordered_set<Fact, FactHash> pool;
    for (const auto& c : cands) pool.insert(c.fact);
    out.positives += ex.positives.size();
    for (const auto& f : ex.positives) out.covered += pool.count(f);
  }
  return out;
}

template <typename Fn>
double MedianMillis(int repeats, Fn&& fn) {
  std::vector<double> times;
  for (int r = 0; r < std::max(1, repeats); ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(
        std::chrono::duration<double, std::milli>(stop - start).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

}  // namespace

MetricsReport metrics(const Confusion& c) {
  MetricsReport r;
  r.precision = Ratio(c.tp, c.tp + c.fp);
  r.positive_accuracy = Ratio(c.tp, c.tp + c.fn);
  r.negative_accuracy = Ratio(c.tn, c.tn + c.fp);
  r.total_accuracy = Ratio(c.tp + c.tn, c.total());
  const double sum = r.precision + r.positive_accuracy;
  r.f1 = sum == 0.0 ? 0.0 : 2.0 * r.precision * r.positive_accuracy / sum;
  return r;
}

bool HasDegenerateDenominator(const Confusion& c) {
  return c.tp + c.fp == 0 || c.tp + c.fn == 0 || c.tn + c.fp == 0 ||
         c.total() == 0 || c.tp == 0;
}

Confusion evaluate_example(const ExtractionModel& model, const Example& example,
                           const EvalSettings& settings) {
  const VideoAnalysis video = Analyze(model, example.encoding);
  std::unordered_set<Fact, FactHash> pool;
  for (const auto& c :
       generate_candidates(video.detection, model.vocab, settings.candidates)) {
    pool.insert(c.fact);
  }
  auto predicted = [&](const Fact& f) {
    if (pool.count(f) == 0) return false;
    const FactScores s = ScoreFact(model, video, f, settings.stats);
    return AcceptFact(model, f, s, settings.mode);
  };
  Confusion c;
  for (const auto& f : example.positives) ++(predicted(f) ? c.tp : c.fn);
  for (const auto& f : example.negatives) ++(predicted(f) ? c.fp : c.tn);
  return c;
}

std::size_t WorkerCount() {
  const char* env = std::getenv("KGX_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 1;
  return static_cast<std::size_t>(v);
}

EvalResult evaluate(const ExtractionModel& model,
                    std::span<const Example> examples,
                    const EvalSettings& settings) {
  settings.candidates.Validate();
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(WorkerCount(), examples.size()));
  std::vector<Partial> partials(workers);
  if (workers == 1) {
    partials[0] = EvaluateRange(model, examples, settings);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (examples.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = std::min(examples.size(), w * chunk);
      const std::size_t hi = std::min(examples.size(), lo + chunk);
      threads.emplace_back([&, w, lo, hi] {
        partials[w] = EvaluateRange(model, examples.subspan(lo, hi - lo), settings);
      });
    }
    for (auto& t : threads) t.join();
  }
  Partial total;
  for (const auto& p : partials) {
    total.confusion += p.confusion;
    total.positives += p.positives;
    total.covered += p.covered;
  }
  EvalResult r;
  r.confusion = total.confusion;
  r.report = metrics(total.confusion);
  r.candidate_recall = Ratio(total.covered, total.positives);
  return r;
}

AblationResult ablate_combiner(const ExtractionModel& model,
                               std::span<const Example> examples,
                               const EvalSettings& top_q,
                               const EvalSettings& threshold_product) {
  return {evaluate(model, examples, top_q),
          evaluate(model, examples, threshold_product)};
}

std::vector<SweepQRow> sweep_q(const ExtractionModel& model,
                               std::span<const Example> examples,
                               std::span<const std::size_t> qs,
                               const EvalSettings& base, int repeats) {
  if (qs.empty()) throw std::invalid_argument("sweep_q: no q values");
  if (!std::is_sorted(qs.begin(), qs.end())) {
    throw std::invalid_argument("sweep_q: q values must be ascending");
  }
  std::vector<SweepQRow> rows;
  for (std::size_t q : qs) {
    EvalSettings s = base;
    s.candidates.strategy = CandidateStrategy::kTopQ;
    s.candidates.q = q;
    SweepQRow row;
    row.q = q;
    row.result = evaluate(model, examples, s);
    std::size_t sink = 0;
    row.wall_time_ms = MedianMillis(repeats, [&] {
      for (const auto& ex : examples) {
        sink += predict(model, ex.encoding, s.candidates, s.mode, s.stats).size();
      }
    });
    (void)sink;
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepEpochRow> sweep_epochs(const Dataset& dataset,
                                        const ExtractionModel& base,
                                        const TrainConfig& train_cfg,
                                        std::span<const std::size_t> caps,
                                        const BkStats* stats) {
  if (caps.empty() || caps.front() != 0 ||
      !std::is_sorted(caps.begin(), caps.end())) {
    throw std::invalid_argument(
        "sweep_epochs: caps must be ascending and start at 0");
  }
  std::vector<SweepEpochRow> rows;
  for (std::size_t cap : caps) {
    ExtractionModel m = base;
    ResetScorer(m, train_cfg.seed);
    TrainConfig cfg = train_cfg;
    cfg.predicate_epoch_cap = cap;
    train_scorer(dataset, m.detectors, m.embeddings, m.predicates, cfg);
    const Calibration cal = calibrate(m, dataset.train, stats, cfg);
    m.thresholds = cal.thresholds;
    m.fusion = cal.fusion;

    EvalSettings s;
    s.candidates.q = cfg.q;
    s.stats = stats;
    s.mode = InferenceMode::kMain;
    const double f1_main = evaluate(m, dataset.test, s).report.f1;
    s.mode = InferenceMode::kExtended;
    const double f1_ext = evaluate(m, dataset.test, s).report.f1;
    rows.push_back({cap, f1_main, f1_ext});
  }
  return rows;
}

std::vector<SweepEpochRow> sweep_epochs(const Dataset& dataset,
                                        const ModelConfig& model_cfg,
                                        const TrainConfig& train_cfg,
                                        std::span<const std::size_t> caps,
                                        const BkStats* stats) {
  ExtractionModel base =
      ExtractionModel::Create(dataset.vocabulary, model_cfg, train_cfg.seed);
  train_detectors(dataset, base.detectors, train_cfg);
  return sweep_epochs(dataset, base, train_cfg, caps, stats);
}

}  // namespace kgx
