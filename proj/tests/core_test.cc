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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace kgx {
namespace {

std::vector<std::string> Names(char prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Vocabulary Sized(std::size_t ni, std::size_t nc, std::size_t nr) {
  return Vocabulary(Names('i', ni), Names('c', nc), Names('r', nr));
}

TEST(UniverseSizes, LargeVocabularyCounts) {
  const auto u = fact_universe_sizes(Sized(258, 129, 150));
  EXPECT_EQ(u.unary, 33282u);
  EXPECT_EQ(u.binary, 9945900u);
}

TEST(UniverseSizes, SingleIndividualHasNoBinaryFacts) {
  const auto u = fact_universe_sizes(Sized(1, 1, 1));
  EXPECT_EQ(u.unary, 1u);
  EXPECT_EQ(u.binary, 0u);
}

TEST(UniverseSizes, MatchesExhaustiveEnumeration) {
  for (std::size_t ni = 1; ni <= 8; ++ni) {
    for (std::size_t nc = 1; nc <= 4; ++nc) {
      for (std::size_t nr = 1; nr <= 4; ++nr) {
        const Vocabulary v = Sized(ni, nc, nr);
        std::uint64_t unary = 0, binary = 0;
        for (SymbolId p = 0; p < 4; ++p) {
          for (SymbolId s = 0; s < 9; ++s) {
            if (validate_fact(Fact::Unary(p, s), v)) ++unary;
            for (SymbolId o = 0; o < 9; ++o) {
              if (validate_fact(Fact::Binary(p, s, o), v)) ++binary;
            }
          }
        }
        const auto u = fact_universe_sizes(v);
        EXPECT_EQ(u.unary, unary) << ni << " " << nc << " " << nr;
        EXPECT_EQ(u.binary, binary) << ni << " " << nc << " " << nr;
      }
    }
  }
  const auto small = fact_universe_sizes(Sized(3, 2, 2));
  EXPECT_EQ(small.unary, 6u);
  EXPECT_EQ(small.binary, 12u);
}

TEST(ValidateFact, Examples) {
  EXPECT_TRUE(validate_fact(Fact::Unary(0, 1), Sized(2, 1, 1)));
  EXPECT_FALSE(validate_fact(Fact::Binary(0, 1, 1), Sized(3, 1, 1)));
  EXPECT_FALSE(validate_fact(Fact::Binary(0, 0, 5), Sized(3, 1, 1)));
  EXPECT_FALSE(validate_fact(Fact::Unary(1, 0), Sized(3, 1, 1)));
  EXPECT_FALSE(validate_fact(Fact::Binary(1, 0, 1), Sized(3, 1, 1)));
}

TEST(Vocabulary, CaseFoldsAndRejectsDuplicates) {
  Vocabulary v({"Man", "CAR"}, {"Red"}, {"drive"});
  EXPECT_EQ(v.individual(0), "man");
  EXPECT_EQ(v.find_individual("car"), SymbolId{1});
  EXPECT_EQ(v.find_unary("RED"), SymbolId{0});
  EXPECT_FALSE(v.find_binary("drink").has_value());
  EXPECT_THROW(Vocabulary({"man", "MAN"}, {}, {}), DataError);
  EXPECT_THROW(Vocabulary({""}, {}, {}), DataError);
}

TEST(Vocabulary, FingerprintDistinguishesVocabularies) {
  EXPECT_EQ(Sized(3, 2, 2).fingerprint(), Sized(3, 2, 2).fingerprint());
  EXPECT_NE(Sized(3, 2, 2).fingerprint(), Sized(3, 2, 3).fingerprint());
}

TEST(FormatFact, UnaryAndBinary) {
  Vocabulary v({"man", "car"}, {"red"}, {"drive"});
  EXPECT_EQ(FormatFact(Fact::Unary(0, 1), v), "red(car)");
  EXPECT_EQ(FormatFact(Fact::Binary(0, 0, 1), v), "drive(man,car)");
}

TEST(KnowledgeGraph, DuplicateInsertKeepsSize) {
  KnowledgeGraph kg;
  EXPECT_TRUE(kg.insert(Fact::Unary(0, 1), 0.5));
  EXPECT_FALSE(kg.insert(Fact::Unary(0, 1), 0.7));
  EXPECT_EQ(kg.size(), 1u);
  EXPECT_THROW(kg.insert(Fact::Unary(0, 2), 1.5), std::invalid_argument);
}

TEST(FactOrder, KindThenPredicateThenArguments) {
  std::vector<Fact> facts = {Fact::Binary(0, 0, 1), Fact::Unary(1, 0),
                             Fact::Unary(0, 2), Fact::Unary(0, 1),
                             Fact::Unary(0, 1)};
  Canonicalize(facts);
  const std::vector<Fact> expected = {Fact::Unary(0, 1), Fact::Unary(0, 2),
                                      Fact::Unary(1, 0), Fact::Binary(0, 0, 1)};
  EXPECT_EQ(facts, expected);
}

TEST(ValidateExample, RejectsOverlapAndNonFinite) {
  const Vocabulary v = Sized(3, 1, 1);
  Example ex{"e", {0.0, 1.0}, {Fact::Unary(0, 0)}, {Fact::Unary(0, 1)}};
  EXPECT_NO_THROW(ValidateExample(ex, v, 2));
  EXPECT_THROW(ValidateExample(ex, v, 3), DataError);
  ex.negatives.push_back(Fact::Unary(0, 0));
  EXPECT_THROW(ValidateExample(ex, v, 2), DataError);
  ex.negatives = {};
  ex.encoding[1] = std::nan("");
  EXPECT_THROW(ValidateExample(ex, v, 2), DataError);
  ex.encoding[1] = 0.0;
  ex.positives.push_back(Fact::Binary(0, 2, 2));
  EXPECT_THROW(ValidateExample(ex, v, 2), DataError);
}

}  // namespace
}  // namespace kgx
