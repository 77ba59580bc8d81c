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

// Domain types shared across the library: symbol vocabularies, facts,
// knowledge graphs and labeled video examples.

#ifndef KGX_CORE_H_
#define KGX_CORE_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgx {

using SymbolId = std::uint32_t;

// Raised for malformed input files and records. The CLI maps it to exit
// code 2; programming-contract violations use std::invalid_argument.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PredicateKind : std::uint8_t { kUnary = 0, kBinary = 1 };

std::string_view KindName(PredicateKind kind);

// A predicate applied to one individual (c(s)) or to an ordered pair of
// distinct individuals (r(s, o)). For unary facts `object` is always 0 so
// that the defaulted ordering is the canonical (kind, predicate, args) order.
struct Fact {
  PredicateKind kind = PredicateKind::kUnary;
  SymbolId predicate = 0;
  SymbolId subject = 0;
  SymbolId object = 0;

  static constexpr Fact Unary(SymbolId predicate, SymbolId subject) {
    return Fact{PredicateKind::kUnary, predicate, subject, 0};
  }
  static constexpr Fact Binary(SymbolId predicate, SymbolId subject,
                               SymbolId object) {
    return Fact{PredicateKind::kBinary, predicate, subject, object};
  }

  bool is_unary() const { return kind == PredicateKind::kUnary; }
  bool is_binary() const { return kind == PredicateKind::kBinary; }

  friend constexpr auto operator<=>(const Fact&, const Fact&) = default;
};

struct FactHash {
  std::size_t operator()(const Fact& f) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(f.kind);
    h = h * 0x9E3779B97F4A7C15ULL + f.predicate;
    h = h * 0x9E3779B97F4A7C15ULL + f.subject;
    h = h * 0x9E3779B97F4A7C15ULL + f.object;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

// Symbol tables for individuals (I), unary predicates (C) and binary
// predicates (R). Names are case-folded on construction and must be unique
// within their kind; ids are positions in the input lists.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> individuals,
             std::vector<std::string> unary_predicates,
             std::vector<std::string> binary_predicates);

  std::size_t num_individuals() const { return individuals_.size(); }
  std::size_t num_unary() const { return unary_.size(); }
  std::size_t num_binary() const { return binary_.size(); }

  const std::vector<std::string>& individuals() const { return individuals_; }
  const std::vector<std::string>& unary_predicates() const { return unary_; }
  const std::vector<std::string>& binary_predicates() const { return binary_; }

  const std::string& individual(SymbolId id) const { return individuals_.at(id); }
  const std::string& predicate_name(PredicateKind kind, SymbolId id) const;

  std::optional<SymbolId> find_individual(std::string_view name) const;
  std::optional<SymbolId> find_unary(std::string_view name) const;
  std::optional<SymbolId> find_binary(std::string_view name) const;

  // Stable 64-bit FNV-1a digest of the ordered symbol lists.
  std::uint64_t fingerprint() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.individuals_ == b.individuals_ && a.unary_ == b.unary_ &&
           a.binary_ == b.binary_;
  }

 private:
  using Index = std::unordered_map<std::string, SymbolId>;

  std::vector<std::string> individuals_;
  std::vector<std::string> unary_;
  std::vector<std::string> binary_;
  Index individual_index_;
  Index unary_index_;
  Index binary_index_;
};

std::string CaseFold(std::string_view name);

struct UniverseSizes {
  std::uint64_t unary = 0;
  std::uint64_t binary = 0;
  std::uint64_t total() const { return unary + binary; }
};

// |I|*|C| unary facts and |I|*(|I|-1)*|R| binary facts (ordered, distinct
// arguments).
UniverseSizes fact_universe_sizes(const Vocabulary& vocab);

bool validate_fact(const Fact& fact, const Vocabulary& vocab);

// Human-readable form, e.g. "red(car)" or "drive(man,car)".
std::string FormatFact(const Fact& fact, const Vocabulary& vocab);

// A set of facts with optional per-fact truth scores, kept in canonical
// order.
class KnowledgeGraph {
 public:
  // Returns false if the fact was already present (the stored score is then
  // left untouched). Throws std::invalid_argument for scores outside [0,1].
  bool insert(const Fact& fact, std::optional<double> score = std::nullopt);

  bool contains(const Fact& fact) const { return facts_.count(fact) > 0; }
  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }

  const std::map<Fact, std::optional<double>>& facts() const { return facts_; }

 private:
  std::map<Fact, std::optional<double>> facts_;
};

// One video: its encoding plus labeled facts. `positives` and `negatives`
// are sorted and duplicate-free.
struct Example {
  std::string id;
  std::vector<double> encoding;
  std::vector<Fact> positives;
  std::vector<Fact> negatives;
};

// Sorts and deduplicates a fact list in place.
void Canonicalize(std::vector<Fact>& facts);

// Throws DataError describing the first violated Example invariant.
void ValidateExample(const Example& example, const Vocabulary& vocab,
                     std::size_t dim_e);

struct Dataset {
  Vocabulary vocabulary;
  std::size_t dim_e = 0;
  std::vector<Example> train;
  std::vector<Example> validation;
  std::vector<Example> test;
};

void ValidateDataset(const Dataset& dataset);

}  // namespace kgx

#endif  // KGX_CORE_H_
