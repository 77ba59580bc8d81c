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

#include "kgx/synthgen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>

#include "kgx/numfmt.h"
#include "kgx/random.h"
#include "kgx/train.h"

namespace kgx {
namespace {

constexpr std::uint64_t kTableStream = 11;
constexpr std::uint64_t kSignatureStream = 12;
constexpr std::uint64_t kVideoStream = 13;
constexpr std::uint64_t kNegativeStream = 14;
constexpr std::uint64_t kSceneStream = 15;
constexpr int kSceneAttempts = 64;

struct PredicateRef {
  PredicateKind kind;
  SymbolId id;
};

// Unary combinations are allowed independently. A binary fact is allowed
// when its subject fits the relation's subject slot and its object fits the
// object slot, each slot admitting an individual with probability `density`.
CompatibilityTable RandomTable(const GenConfig& cfg, Rng& rng) {
  CompatibilityTable t(cfg.num_individuals, cfg.num_unary, cfg.num_binary);
  const auto n = static_cast<SymbolId>(cfg.num_individuals);
  for (SymbolId c = 0; c < cfg.num_unary; ++c) {
    for (SymbolId s = 0; s < n; ++s) {
      t.set(Fact::Unary(c, s), rng.uniform() < cfg.density);
    }
  }
  std::vector<bool> subject_ok(n), object_ok(n);
  for (SymbolId r = 0; r < cfg.num_binary; ++r) {
    for (SymbolId i = 0; i < n; ++i) subject_ok[i] = rng.uniform() < cfg.density;
    for (SymbolId i = 0; i < n; ++i) object_ok[i] = rng.uniform() < cfg.density;
    for (SymbolId s = 0; s < n; ++s) {
      for (SymbolId o = 0; o < n; ++o) {
        if (s != o) t.set(Fact::Binary(r, s, o), subject_ok[s] && object_ok[o]);
      }
    }
  }
  return t;
}

std::vector<Fact> SampleOnce(const CompatibilityTable& table,
                             const GenConfig& cfg, Rng& rng) {
  const std::size_t n = table.num_individuals();
  const std::size_t lo = std::min(cfg.individuals_min, n);
  const std::size_t hi = std::min(cfg.individuals_max, n);
  const std::size_t k = lo + rng.below(hi - lo + 1);
  std::vector<SymbolId> pool(n);
  for (SymbolId i = 0; i < n; ++i) pool[i] = i;
  rng.shuffle(pool);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());

  std::vector<PredicateRef> predicates;
  for (SymbolId c = 0; c < table.num_unary(); ++c) {
    predicates.push_back({PredicateKind::kUnary, c});
  }
  for (SymbolId r = 0; r < table.num_binary(); ++r) {
    predicates.push_back({PredicateKind::kBinary, r});
  }
  rng.shuffle(predicates);

  const std::size_t target =
      cfg.facts_min + rng.below(cfg.facts_max - cfg.facts_min + 1);
  std::vector<Fact> facts;
  for (const auto& p : predicates) {
    std::vector<Fact> added;
    for (SymbolId s : pool) {
      if (p.kind == PredicateKind::kUnary) {
        const Fact f = Fact::Unary(p.id, s);
        if (table.allows(f)) added.push_back(f);
        continue;
      }
      for (SymbolId o : pool) {
        const Fact f = Fact::Binary(p.id, s, o);
        if (s != o && table.allows(f)) added.push_back(f);
      }
    }
    if (added.empty() || facts.size() + added.size() > cfg.facts_max) continue;
    facts.insert(facts.end(), added.begin(), added.end());
    if (facts.size() >= target) break;
  }
  Canonicalize(facts);
  return facts;
}

std::vector<Fact> SampleScene(const CompatibilityTable& table,
                              const GenConfig& cfg, Rng& rng) {
  std::vector<Fact> facts;
  for (int attempt = 0; attempt < kSceneAttempts && facts.empty(); ++attempt) {
    facts = SampleOnce(table, cfg, rng);
  }
  return facts;
}

std::string Name(char prefix, std::size_t i) {
  return std::string(1, prefix) + std::to_string(i);
}

std::string ExampleId(const char* split, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s-%06zu", split, i);
  return buf;
}

}  // namespace

void GenConfig::Validate() const {
  if (num_individuals < 2) throw std::invalid_argument("need >= 2 individuals");
  if (num_unary + num_binary == 0) throw std::invalid_argument("need predicates");
  if (dim_e == 0) throw std::invalid_argument("dim_e must be positive");
  if (!(signature_noise >= 0.0)) {
    throw std::invalid_argument("signature_noise must be >= 0");
  }
  if (facts_min > facts_max) throw std::invalid_argument("facts_min > facts_max");
  if (individuals_min < 1 || individuals_min > individuals_max) {
    throw std::invalid_argument("invalid individuals-per-video range");
  }
  if (!(density > 0.0 && density <= 1.0)) {
    throw std::invalid_argument("density must lie in (0,1]");
  }
  if (neg_ratio < 1) throw std::invalid_argument("neg_ratio must be >= 1");
}

void ApplyGenConfigValue(std::string_view key, std::string_view value,
                         GenConfig& cfg) {
  const std::string what = "generator key '" + std::string(key) + "'";
  auto size = [&] { return ParseInteger<std::size_t>(value, what); };
  auto real = [&] {
    try {
      return ParseDouble(value);
    } catch (const DataError&) {
      throw DataError("invalid value '" + std::string(value) + "' for " + what);
    }
  };
  if (key == "num_individuals") cfg.num_individuals = size();
  else if (key == "num_unary") cfg.num_unary = size();
  else if (key == "num_binary") cfg.num_binary = size();
  else if (key == "train_videos") cfg.train_videos = size();
  else if (key == "validation_videos") cfg.validation_videos = size();
  else if (key == "test_videos") cfg.test_videos = size();
  else if (key == "dim_e") cfg.dim_e = size();
  else if (key == "signature_noise") cfg.signature_noise = real();
  else if (key == "facts_min") cfg.facts_min = size();
  else if (key == "facts_max") cfg.facts_max = size();
  else if (key == "individuals_min") cfg.individuals_min = size();
  else if (key == "individuals_max") cfg.individuals_max = size();
  else if (key == "min_frequency") cfg.min_frequency = size();
  else if (key == "density") cfg.density = real();
  else if (key == "neg_ratio") cfg.neg_ratio = size();
  else if (key == "scene_images") cfg.scene_images = size();
  else if (key == "seed") cfg.seed = ParseInteger<std::uint64_t>(value, what);
  else throw DataError("unknown generator key '" + std::string(key) + "'");
}

void ApplyGenConfigText(std::string_view text, GenConfig& cfg) {
  for (const auto& [key, value] : ParseKeyValueLines(text)) {
    ApplyGenConfigValue(key, value, cfg);
  }
}

CompatibilityTable::CompatibilityTable(std::size_t num_individuals,
                                       std::size_t num_unary,
                                       std::size_t num_binary)
    : n_(num_individuals),
      nc_(num_unary),
      nr_(num_binary),
      unary_(num_unary * num_individuals, 0),
      binary_(num_binary * num_individuals * num_individuals, 0) {}

std::size_t CompatibilityTable::Index(const Fact& f) const {
  if (f.is_unary()) {
    if (f.predicate >= nc_ || f.subject >= n_) {
      throw std::out_of_range("CompatibilityTable: fact out of range");
    }
    return f.predicate * n_ + f.subject;
  }
  if (f.predicate >= nr_ || f.subject >= n_ || f.object >= n_) {
    throw std::out_of_range("CompatibilityTable: fact out of range");
  }
  return (f.predicate * n_ + f.subject) * n_ + f.object;
}

bool CompatibilityTable::allows(const Fact& f) const {
  if (f.is_binary() && f.subject == f.object) return false;
  return (f.is_unary() ? unary_ : binary_)[Index(f)] != 0;
}

void CompatibilityTable::set(const Fact& f, bool allowed) {
  (f.is_unary() ? unary_ : binary_)[Index(f)] = allowed ? 1 : 0;
}

GeneratedData generate_dataset(const GenConfig& cfg) {
  cfg.Validate();
  Rng table_rng(DeriveSeed(cfg.seed, kTableStream));
  Rng sig_rng(DeriveSeed(cfg.seed, kSignatureStream));
  Rng video_rng(DeriveSeed(cfg.seed, kVideoStream));
  Rng neg_rng(DeriveSeed(cfg.seed, kNegativeStream));

  const CompatibilityTable full = RandomTable(cfg, table_rng);
  const std::size_t n = cfg.num_individuals;
  const std::size_t nc = cfg.num_unary;
  const std::size_t nr = cfg.num_binary;

  // Signatures for individuals, then unary, then binary predicates.
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.dim_e));
  std::vector<std::vector<double>> signatures(n + nc + nr);
  for (auto& sig : signatures) {
    sig.resize(cfg.dim_e);
    for (auto& x : sig) x = sig_rng.normal() * scale;
  }
  auto add_signature = [&](std::vector<double>& e, std::size_t index) {
    for (std::size_t d = 0; d < e.size(); ++d) e[d] += signatures[index][d];
  };

  auto make_split = [&](const char* name, std::size_t count) {
    std::vector<Example> split;
    for (std::size_t v = 0; v < count; ++v) {
      Example ex;
      ex.id = ExampleId(name, v);
      ex.positives = SampleScene(full, cfg, video_rng);
      std::vector<bool> present(n + nc + nr, false);
      for (const auto& f : ex.positives) {
        present[f.subject] = true;
        if (f.is_binary()) {
          present[f.object] = true;
          present[n + nc + f.predicate] = true;
        } else {
          present[n + f.predicate] = true;
        }
      }
      ex.encoding.assign(cfg.dim_e, 0.0);
      for (std::size_t s = 0; s < present.size(); ++s) {
        if (present[s]) add_signature(ex.encoding, s);
      }
      for (auto& x : ex.encoding) x += cfg.signature_noise * video_rng.normal();
      split.push_back(std::move(ex));
    }
    return split;
  };
  std::vector<Example> train = make_split("train", cfg.train_videos);
  std::vector<Example> validation =
      make_split("validation", cfg.validation_videos);
  std::vector<Example> test = make_split("test", cfg.test_videos);

  // Frequency pruning over every split.
  std::vector<std::size_t> occurrences(n + nc + nr, 0);
  for (const auto* split : {&train, &validation, &test}) {
    for (const auto& ex : *split) {
      for (const auto& f : ex.positives) {
        ++occurrences[f.subject];
        if (f.is_binary()) {
          ++occurrences[f.object];
          ++occurrences[n + nc + f.predicate];
        } else {
          ++occurrences[n + f.predicate];
        }
      }
    }
  }
  constexpr SymbolId kPruned = ~SymbolId{0};
  std::vector<SymbolId> remap(n + nc + nr, kPruned);
  std::vector<std::string> individuals, unary, binary;
  for (std::size_t s = 0; s < remap.size(); ++s) {
    if (occurrences[s] < cfg.min_frequency) continue;
    if (s < n) {
      remap[s] = static_cast<SymbolId>(individuals.size());
      individuals.push_back(Name('i', s));
    } else if (s < n + nc) {
      remap[s] = static_cast<SymbolId>(unary.size());
      unary.push_back(Name('c', s - n));
    } else {
      remap[s] = static_cast<SymbolId>(binary.size());
      binary.push_back(Name('r', s - n - nc));
    }
  }
  if (individuals.empty() || unary.size() + binary.size() == 0) {
    throw DataError("frequency pruning left an empty vocabulary");
  }

  auto map_fact = [&](const Fact& f) -> std::optional<Fact> {
    const SymbolId p =
        remap[(f.is_unary() ? n : n + nc) + f.predicate];
    const SymbolId s = remap[f.subject];
    const SymbolId o = f.is_binary() ? remap[f.object] : 0;
    if (p == kPruned || s == kPruned || o == kPruned) return std::nullopt;
    return f.is_unary() ? Fact::Unary(p, s) : Fact::Binary(p, s, o);
  };

  GeneratedData out;
  out.dataset.vocabulary =
      Vocabulary(std::move(individuals), std::move(unary), std::move(binary));
  out.dataset.dim_e = cfg.dim_e;
  const Vocabulary& vocab = out.dataset.vocabulary;

  out.table = CompatibilityTable(vocab.num_individuals(), vocab.num_unary(),
                                 vocab.num_binary());
  for (SymbolId c = 0; c < nc; ++c) {
    for (SymbolId s = 0; s < n; ++s) {
      const Fact f = Fact::Unary(c, s);
      if (auto m = map_fact(f)) out.table.set(*m, full.allows(f));
    }
  }
  for (SymbolId r = 0; r < nr; ++r) {
    for (SymbolId s = 0; s < n; ++s) {
      for (SymbolId o = 0; o < n; ++o) {
        const Fact f = Fact::Binary(r, s, o);
        if (s == o) continue;
        if (auto m = map_fact(f)) out.table.set(*m, full.allows(f));
      }
    }
  }

  auto finish = [&](std::vector<Example>& split) {
    for (auto& ex : split) {
      std::vector<Fact> kept;
      for (const auto& f : ex.positives) {
        if (auto m = map_fact(f)) kept.push_back(*m);
      }
      Canonicalize(kept);
      ex.positives = std::move(kept);
      ex.negatives = SampleNegatives(ex.positives, vocab, cfg.neg_ratio, neg_rng);
    }
    return std::move(split);
  };
  out.dataset.train = finish(train);
  out.dataset.validation = finish(validation);
  out.dataset.test = finish(test);
  ValidateDataset(out.dataset);
  return out;
}

std::vector<SceneGraph> generate_scene_corpus(const GenConfig& cfg,
                                              const CompatibilityTable& table,
                                              const Vocabulary& vocab) {
  if (table.num_individuals() != vocab.num_individuals() ||
      table.num_unary() != vocab.num_unary() ||
      table.num_binary() != vocab.num_binary()) {
    throw std::invalid_argument("compatibility table does not match vocabulary");
  }
  Rng rng(DeriveSeed(cfg.seed, kSceneStream));
  std::vector<SceneGraph> corpus;
  corpus.reserve(cfg.scene_images);
  for (std::size_t i = 0; i < cfg.scene_images; ++i) {
    const std::vector<Fact> facts = SampleScene(table, cfg, rng);
    SceneGraph g;
    g.image_id = ExampleId("img", i);
    std::map<SymbolId, std::vector<std::string>> attributes;
    for (const auto& f : facts) {
      if (f.is_unary()) {
        attributes[f.subject].push_back(vocab.predicate_name(f.kind, f.predicate));
      } else {
        attributes.try_emplace(f.subject);
        attributes.try_emplace(f.object);
        g.relationships.push_back({vocab.individual(f.subject),
                                   vocab.predicate_name(f.kind, f.predicate),
                                   vocab.individual(f.object)});
      }
    }
    for (auto& [s, attrs] : attributes) {
      g.objects.push_back({vocab.individual(s), std::move(attrs)});
    }
    corpus.push_back(std::move(g));
  }
  return corpus;
}

}  // namespace kgx
