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

// Planted synthetic corpora. Each symbol has a random signature vector; a
// video's encoding is the sum of the signatures of the symbols in its facts
// plus Gaussian noise. The true facts of a video are every combination the
// compatibility table allows over its present individuals and predicates.

#ifndef KGX_SYNTHGEN_H_
#define KGX_SYNTHGEN_H_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "kgx/bgk.h"
#include "kgx/core.h"

namespace kgx {

struct GenConfig {
  std::size_t num_individuals = 20;
  std::size_t num_unary = 10;
  std::size_t num_binary = 10;
  std::size_t train_videos = 400;
  std::size_t validation_videos = 100;
  std::size_t test_videos = 100;
  std::size_t dim_e = 64;
  double signature_noise = 0.1;
  std::size_t facts_min = 3;
  std::size_t facts_max = 6;
  std::size_t individuals_min = 2;
  std::size_t individuals_max = 4;
  std::size_t min_frequency = 2;
  // Fraction of (predicate, argument slot, individual) combinations allowed.
  double density = 0.3;
  std::size_t neg_ratio = 4;
  std::size_t scene_images = 2000;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument.
  void Validate() const;
};

// `key=value` lines naming GenConfig fields ('#' starts a comment). Throws
// DataError on unknown keys or bad values.
void ApplyGenConfigText(std::string_view text, GenConfig& cfg);
void ApplyGenConfigValue(std::string_view key, std::string_view value,
                         GenConfig& cfg);

class CompatibilityTable {
 public:
  CompatibilityTable() = default;
  CompatibilityTable(std::size_t num_individuals, std::size_t num_unary,
                     std::size_t num_binary);

  bool allows(const Fact& fact) const;
  void set(const Fact& fact, bool allowed);

  std::size_t num_individuals() const { return n_; }
  std::size_t num_unary() const { return nc_; }
  std::size_t num_binary() const { return nr_; }

 private:
  std::size_t Index(const Fact& fact) const;

  std::size_t n_ = 0, nc_ = 0, nr_ = 0;
  std::vector<std::uint8_t> unary_;
  std::vector<std::uint8_t> binary_;
};

struct GeneratedData {
  Dataset dataset;
  // Indexed by the (possibly pruned) dataset vocabulary.
  CompatibilityTable table;
};

// Throws DataError when frequency pruning empties the vocabulary.
GeneratedData generate_dataset(const GenConfig& cfg);

// `cfg.scene_images` images drawn from the same table; names come from
// `vocab`.
std::vector<SceneGraph> generate_scene_corpus(const GenConfig& cfg,
                                              const CompatibilityTable& table,
                                              const Vocabulary& vocab);

}  // namespace kgx

#endif  // KGX_SYNTHGEN_H_
