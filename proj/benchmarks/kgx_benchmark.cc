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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "kgx/combiner.h"
#include "kgx/model.h"
#include "kgx/random.h"

namespace kgx {
namespace {

Vocabulary MakeVocabulary(std::size_t ni, std::size_t nc, std::size_t nr) {
  std::vector<std::string> a, b, c;
  for (std::size_t i = 0; i < ni; ++i) a.push_back("i" + std::to_string(i));
  for (std::size_t i = 0; i < nc; ++i) b.push_back("c" + std::to_string(i));
  for (std::size_t i = 0; i < nr; ++i) c.push_back("r" + std::to_string(i));
  return Vocabulary(a, b, c);
}

DetectionOutput RandomDetection(const Vocabulary& v, Rng& rng) {
  DetectionOutput d;
  for (std::size_t i = 0; i < v.num_individuals(); ++i) d.individuals.push_back(rng.uniform());
  for (std::size_t i = 0; i < v.num_unary(); ++i) d.classes.push_back(rng.uniform());
  for (std::size_t i = 0; i < v.num_binary(); ++i) d.relations.push_back(rng.uniform());
  return d;
}

// Full-size vocabulary: 258 individuals, 129 attributes, 150 relations.
void BM_TopQCandidates(benchmark::State& state) {
  const Vocabulary v = MakeVocabulary(258, 129, 150);
  Rng rng(1);
  const DetectionOutput d = RandomDetection(v, rng);
  CandidateConfig cfg;
  cfg.q = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_candidates(d, v, cfg));
}
BENCHMARK(BM_TopQCandidates)->Arg(25)->Arg(100)->Arg(1000)->Arg(10000);

void BM_ThresholdProductCandidates(benchmark::State& state) {
  const Vocabulary v = MakeVocabulary(258, 129, 150);
  Rng rng(1);
  const DetectionOutput d = RandomDetection(v, rng);
  CandidateConfig cfg;
  cfg.strategy = CandidateStrategy::kThresholdProduct;
  cfg.tau_ind = cfg.tau_cls = cfg.tau_rel = 0.9;
  for (auto _ : state) benchmark::DoNotOptimize(generate_candidates(d, v, cfg));
}
BENCHMARK(BM_ThresholdProductCandidates);

class ModelFixture {
 public:
  explicit ModelFixture(std::size_t width) {
    ModelConfig c;
    c.raw_width = c.dim_e = width;
    c.trunk_hidden = width;
    c.detector_hidden = width;
    model_ = ExtractionModel::Create(MakeVocabulary(20, 10, 10), c, 1);
    Rng rng(2);
    encoding_.resize(width);
    for (double& x : encoding_) x = rng.normal();
  }
  const ExtractionModel& model() const { return model_; }
  const std::vector<double>& encoding() const { return encoding_; }

 private:
  ExtractionModel model_;
  std::vector<double> encoding_;
};

void BM_Analyze(benchmark::State& state) {
  const ModelFixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Analyze(f.model(), f.encoding()));
}
BENCHMARK(BM_Analyze)->Arg(64)->Arg(256);

void BM_ScoreBinaryFact(benchmark::State& state) {
  const ModelFixture f(static_cast<std::size_t>(state.range(0)));
  const VideoAnalysis video = Analyze(f.model(), f.encoding());
  const Fact fact = Fact::Binary(3, 1, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_fact(fact, video.trunk_output, f.model().embeddings,
                                        f.model().predicates));
  }
}
BENCHMARK(BM_ScoreBinaryFact)->Arg(64)->Arg(256);

void BM_Predict(benchmark::State& state) {
  const ModelFixture f(64);
  CandidateConfig cfg;
  cfg.q = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        predict(f.model(), f.encoding(), cfg, InferenceMode::kMain, nullptr));
  }
}
BENCHMARK(BM_Predict)->Arg(25)->Arg(200)->Arg(800);

}  // namespace
}  // namespace kgx

BENCHMARK_MAIN();
