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

// Serialization: vocabulary TSV, dataset JSONL, checkpoints, background
// statistics, knowledge-graph export and report tables. Writers emit
// canonically ordered, newline-terminated text; readers throw DataError with
// the offending line number.

#ifndef KGX_FORMATS_H_
#define KGX_FORMATS_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kgx/bgk.h"
#include "kgx/core.h"
#include "kgx/model.h"

namespace kgx {

inline constexpr int kCheckpointVersion = 1;
inline constexpr int kStatsVersion = 1;

// Whole-file helpers; DataError names the path on failure.
std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

// `kind<TAB>name` rows, kind in {ind, attr, rel}; ids follow file order.
Vocabulary ParseVocabularyTsv(std::string_view text);
std::string VocabularyToTsv(const Vocabulary& vocab);

// One example per line:
// {"id": str, "encoding": [num], "facts": [{"pred": str, "kind":
// "unary"|"binary", "args": [str], "label": bool}]}
// A record may give "encoding_path" (whitespace-separated numbers, relative
// to `base_dir`) instead of "encoding". When `dim_e` is 0 it is taken from
// the first record and returned through the same reference.
std::vector<Example> read_dataset(std::string_view text, const Vocabulary& vocab,
                                  std::size_t& dim_e,
                                  const std::filesystem::path& base_dir = {});
std::string write_dataset(std::span<const Example> examples,
                          const Vocabulary& vocab);

// A dataset directory holds vocab.tsv and {train,validation,test}.jsonl;
// missing split files read as empty splits.
Dataset ReadDatasetDir(const std::filesystem::path& dir);
void WriteDatasetDir(const std::filesystem::path& dir, const Dataset& dataset);
std::vector<Example> ReadExamplesFile(const std::filesystem::path& path,
                                      const Vocabulary& vocab,
                                      std::size_t& dim_e);

// Versioned JSON; every parameter is stored as its shortest round-trip
// decimal string. Loading throws DataError with "corrupt checkpoint",
// "unsupported checkpoint version" or, when `expected` is given and differs
// from the stored vocabulary, "vocabulary mismatch".
std::string save_checkpoint(const ExtractionModel& model);
ExtractionModel load_checkpoint(std::string_view text,
                                const Vocabulary* expected = nullptr);

std::string SaveStats(const BkStats& stats, const Vocabulary& vocab);
BkStats LoadStats(std::string_view text, const Vocabulary& vocab);

// Newline-delimited scene-graph records.
std::vector<SceneGraph> ParseSceneCorpus(std::string_view text);
std::string SceneCorpusToJsonl(std::span<const SceneGraph> corpus);

// Per-video predictions, one JSON object per line:
// {"id": str, "facts": [{"pred", "kind", "args", "score"}]}.
struct PredictionRecord {
  std::string id;
  KnowledgeGraph kg;
};
std::string WritePredictions(std::span<const PredictionRecord> records,
                             const Vocabulary& vocab);
std::vector<PredictionRecord> ReadPredictions(std::string_view text,
                                              const Vocabulary& vocab);

enum class KgFormat { kTriplesTsv, kDot, kJson };
KgFormat ParseKgFormat(std::string_view name);

std::string export_kg(const KnowledgeGraph& kg, const Vocabulary& vocab,
                      KgFormat format);

// Column-typed table rendered as TSV (header row first) or a JSON array of
// row objects.
class ReportTable {
 public:
  using Cell = std::variant<std::string, std::int64_t, double>;

  explicit ReportTable(std::vector<std::string> columns);

  // Throws std::invalid_argument when the width is wrong.
  void AddRow(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  std::string ToTsv() const;
  std::string ToJson() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace kgx

#endif  // KGX_FORMATS_H_
