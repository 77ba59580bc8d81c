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

#include "kgx/bgk.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "kgx/nnet.h"

namespace kgx {
namespace {

using nlohmann::json;

[[noreturn]] void Malformed(const std::string& why) {
  throw DataError("malformed record: " + why);
}

const json& Field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) Malformed(std::string("missing field '") + key + "'");
  return *it;
}

std::string StringField(const json& obj, const char* key) {
  const json& v = Field(obj, key);
  if (!v.is_string()) Malformed(std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

const json& OptionalArray(const json& obj, const char* key) {
  static const json kEmpty = json::array();
  auto it = obj.find(key);
  if (it == obj.end()) return kEmpty;
  if (!it->is_array()) Malformed(std::string("field '") + key + "' is not an array");
  return *it;
}

}  // namespace

SceneGraph ParseSceneGraph(std::string_view json_line) {
  json doc = json::parse(json_line, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) Malformed("invalid JSON");
  if (!doc.is_object()) Malformed("record is not a JSON object");
  SceneGraph g;
  g.image_id = StringField(doc, "image_id");
  for (const auto& obj : OptionalArray(doc, "objects")) {
    if (!obj.is_object()) Malformed("object entry is not a JSON object");
    SceneObject o;
    o.name = StringField(obj, "name");
    for (const auto& a : OptionalArray(obj, "attributes")) {
      if (!a.is_string()) Malformed("attribute is not a string");
      o.attributes.push_back(a.get<std::string>());
    }
    g.objects.push_back(std::move(o));
  }
  for (const auto& rel : OptionalArray(doc, "relationships")) {
    if (!rel.is_object()) Malformed("relationship entry is not a JSON object");
    g.relationships.push_back({StringField(rel, "subject"),
                               StringField(rel, "predicate"),
                               StringField(rel, "object")});
  }
  return g;
}

std::string SceneGraphToJson(const SceneGraph& graph) {
  json objects = json::array();
  for (const auto& o : graph.objects) {
    objects.push_back({{"name", o.name}, {"attributes", o.attributes}});
  }
  json rels = json::array();
  for (const auto& r : graph.relationships) {
    rels.push_back(
        {{"subject", r.subject}, {"predicate", r.predicate}, {"object", r.object}});
  }
  json doc = {{"image_id", graph.image_id},
              {"objects", std::move(objects)},
              {"relationships", std::move(rels)}};
  return doc.dump();
}

BkStats::BkStats(std::size_t num_individuals)
    : subject_count_(num_individuals, 0),
      pair_count_(num_individuals * num_individuals, 0) {}

std::uint64_t BkStats::fact_count(const Fact& fact) const {
  auto it = facts_.find(fact);
  return it == facts_.end() ? 0 : it->second;
}

std::uint64_t BkStats::subject_count(SymbolId s) const {
  return s < subject_count_.size() ? subject_count_[s] : 0;
}

std::uint64_t BkStats::pair_count(SymbolId s, SymbolId o) const {
  const std::size_t n = subject_count_.size();
  return (s < n && o < n) ? pair_count_[s * n + o] : 0;
}

std::uint64_t BkStats::evidence_count(const Fact& fact) const {
  return fact.is_unary() ? subject_count(fact.subject)
                         : pair_count(fact.subject, fact.object);
}

void BkStats::AddPair(SymbolId s, SymbolId o, std::uint64_t n) {
  const std::size_t size = subject_count_.size();
  if (s >= size || o >= size) throw std::out_of_range("BkStats::AddPair");
  pair_count_[s * size + o] += n;
}

BkStats ingest_scene_graphs(std::span<const SceneGraph> corpus,
                            const Vocabulary& vocab) {
  BkStats stats(vocab.num_individuals());
  for (const auto& image : corpus) {
    stats.AddImage();
    std::set<SymbolId> present;
    std::set<Fact> facts;
    for (const auto& obj : image.objects) {
      auto s = vocab.find_individual(obj.name);
      if (!s) continue;
      present.insert(*s);
      for (const auto& attr : obj.attributes) {
        if (auto c = vocab.find_unary(attr)) facts.insert(Fact::Unary(*c, *s));
      }
    }
    for (const auto& rel : image.relationships) {
      auto s = vocab.find_individual(rel.subject);
      auto o = vocab.find_individual(rel.object);
      if (s) present.insert(*s);
      if (o) present.insert(*o);
      auto r = vocab.find_binary(rel.predicate);
      if (s && o && r && *s != *o) facts.insert(Fact::Binary(*r, *s, *o));
    }
    for (SymbolId s : present) {
      stats.AddSubject(s);
      for (SymbolId o : present) {
        if (o != s) stats.AddPair(s, o);
      }
    }
    for (const auto& f : facts) stats.AddFact(f);
  }
  return stats;
}

double BetaPosteriorMean(std::uint64_t d, std::uint64_t n) {
  return (static_cast<double>(d) + 1.0) / (static_cast<double>(n) + 2.0);
}

double bk_expectation(const Fact& fact, const BkStats& stats) {
  return BetaPosteriorMean(stats.fact_count(fact), stats.evidence_count(fact));
}

double posterior_density(double a, std::uint64_t d, std::uint64_t n) {
  if (d > n) throw std::invalid_argument("posterior_density: d > N");
  const double dd = static_cast<double>(d);
  const double nd = static_cast<double>(n);
  const double log_norm =
      std::lgamma(nd + 2.0) - std::lgamma(dd + 1.0) - std::lgamma(nd - dd + 1.0);
  // 0^0 is 1 here, which keeps the d = 0 and d = N endpoints finite.
  const double pa = d == 0 ? 1.0 : std::pow(a, dd);
  const double pb = d == n ? 1.0 : std::pow(1.0 - a, nd - dd);
  return pa * pb * std::exp(log_norm);
}

double fuse(double main_score, double bk_score, const FusionRegressor& reg) {
  return Sigmoid(reg.weights[0] * main_score + reg.weights[1] * bk_score +
                 reg.bias);
}

double FusionLossAndGrad(std::span<const FusionSample> samples,
                         const FusionRegressor& reg,
                         std::array<double, 3>& grad) {
  grad = {0.0, 0.0, 0.0};
  if (samples.empty()) return 0.0;
  const double n = static_cast<double>(samples.size());
  double loss = 0.0;
  for (const auto& s : samples) {
    const double p = fuse(s.main_score, s.bk_score, reg);
    const double pc =
        std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
    loss -= s.label * std::log(pc) + (1.0 - s.label) * std::log1p(-pc);
    // d(bce)/d(logit) = p - y, and zero where the clamp holds p constant.
    const double delta = pc == p ? (p - s.label) / n : 0.0;
    grad[0] += delta * s.main_score;
    grad[1] += delta * s.bk_score;
    grad[2] += delta;
  }
  return loss / n;
}

FusionRegressor train_fusion(std::span<const FusionSample> samples,
                             const FusionTrainOptions& options) {
  bool has_pos = false;
  bool has_neg = false;
  for (const auto& s : samples) {
    (s.label > 0.5 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw std::invalid_argument(
        "train_fusion: degenerate labels (need both classes)");
  }
  std::array<double, 3> params{0.0, 0.0, 0.0};
  AdamState adam = AdamState::For(3, options.lr);
  std::array<double, 3> grad{};
  for (std::size_t step = 0; step < options.steps; ++step) {
    FusionLossAndGrad(samples, {{params[0], params[1]}, params[2]}, grad);
    adam_step(params, grad, adam);
  }
  return FusionRegressor{{params[0], params[1]}, params[2]};
}

}  // namespace kgx
