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

#include "kgx/core.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

namespace kgx {
namespace {

std::vector<std::string> FoldAll(std::vector<std::string> names) {
  for (auto& n : names) n = CaseFold(n);
  return names;
}

void BuildIndex(const std::vector<std::string>& names, std::string_view kind,
                std::unordered_map<std::string, SymbolId>& index) {
  index.reserve(names.size());
  for (SymbolId i = 0; i < names.size(); ++i) {
    if (names[i].empty()) {
      throw DataError("empty " + std::string(kind) + " name at position " +
                      std::to_string(i));
    }
    if (!index.emplace(names[i], i).second) {
      throw DataError("duplicate " + std::string(kind) + " name '" + names[i] +
                      "'");
    }
  }
}

std::optional<SymbolId> Lookup(
    const std::unordered_map<std::string, SymbolId>& index,
    std::string_view name) {
  auto it = index.find(CaseFold(name));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

}  // namespace

std::string_view KindName(PredicateKind kind) {
  return kind == PredicateKind::kUnary ? "unary" : "binary";
}

std::string CaseFold(std::string_view name) {
  std::string out(name);
  for (auto& ch : out) {
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> individuals,
                       std::vector<std::string> unary_predicates,
                       std::vector<std::string> binary_predicates)
    : individuals_(FoldAll(std::move(individuals))),
      unary_(FoldAll(std::move(unary_predicates))),
      binary_(FoldAll(std::move(binary_predicates))) {
  BuildIndex(individuals_, "individual", individual_index_);
  BuildIndex(unary_, "unary predicate", unary_index_);
  BuildIndex(binary_, "binary predicate", binary_index_);
}

const std::string& Vocabulary::predicate_name(PredicateKind kind,
                                              SymbolId id) const {
  return kind == PredicateKind::kUnary ? unary_.at(id) : binary_.at(id);
}

std::optional<SymbolId> Vocabulary::find_individual(std::string_view name) const {
  return Lookup(individual_index_, name);
}
std::optional<SymbolId> Vocabulary::find_unary(std::string_view name) const {
  return Lookup(unary_index_, name);
}
std::optional<SymbolId> Vocabulary::find_binary(std::string_view name) const {
  return Lookup(binary_index_, name);
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;  // separator, never a valid UTF-8 byte
    h *= 0x100000001b3ULL;
  };
  for (const auto* list : {&individuals_, &unary_, &binary_}) {
    mix("#");
    for (const auto& name : *list) mix(name);
  }
  return h;
}

UniverseSizes fact_universe_sizes(const Vocabulary& vocab) {
  const std::uint64_t n = vocab.num_individuals();
  UniverseSizes sizes;
  sizes.unary = n * vocab.num_unary();
  sizes.binary = n == 0 ? 0 : n * (n - 1) * vocab.num_binary();
  return sizes;
}

bool validate_fact(const Fact& fact, const Vocabulary& vocab) {
  const std::size_t n = vocab.num_individuals();
  switch (fact.kind) {
    case PredicateKind::kUnary:
      return fact.predicate < vocab.num_unary() && fact.subject < n &&
             fact.object == 0;
    case PredicateKind::kBinary:
      return fact.predicate < vocab.num_binary() && fact.subject < n &&
             fact.object < n && fact.subject != fact.object;
  }
  return false;
}

std::string FormatFact(const Fact& fact, const Vocabulary& vocab) {
  std::string out = vocab.predicate_name(fact.kind, fact.predicate);
  out += '(';
  out += vocab.individual(fact.subject);
  if (fact.is_binary()) {
    out += ',';
    out += vocab.individual(fact.object);
  }
  out += ')';
  return out;
}

bool KnowledgeGraph::insert(const Fact& fact, std::optional<double> score) {
  if (score && !(*score >= 0.0 && *score <= 1.0)) {
    throw std::invalid_argument("fact score outside [0,1]");
  }
  return facts_.emplace(fact, score).second;
}

void Canonicalize(std::vector<Fact>& facts) {
  std::sort(facts.begin(), facts.end());
  facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
}

void ValidateExample(const Example& example, const Vocabulary& vocab,
                     std::size_t dim_e) {
  const std::string where = "example '" + example.id + "': ";
  if (example.encoding.size() != dim_e) {
    throw DataError(where + "encoding has dimension " +
                    std::to_string(example.encoding.size()) + ", expected " +
                    std::to_string(dim_e));
  }
  for (double x : example.encoding) {
    if (!std::isfinite(x)) throw DataError(where + "non-finite encoding value");
  }
  for (const auto* list : {&example.positives, &example.negatives}) {
    for (const auto& f : *list) {
      if (!validate_fact(f, vocab)) throw DataError(where + "invalid fact");
    }
  }
  std::unordered_set<Fact, FactHash> positives(example.positives.begin(),
                                               example.positives.end());
  for (const auto& f : example.negatives) {
    if (positives.count(f)) {
      throw DataError(where + "fact " + FormatFact(f, vocab) +
                      " is labeled both true and false");
    }
  }
}

void ValidateDataset(const Dataset& dataset) {
  if (dataset.dim_e == 0) throw DataError("dataset dim_e must be positive");
  for (const auto* split :
       {&dataset.train, &dataset.validation, &dataset.test}) {
    for (const auto& ex : *split) {
      ValidateExample(ex, dataset.vocabulary, dataset.dim_e);
    }
  }
}

}  // namespace kgx
