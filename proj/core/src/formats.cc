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

#include "kgx/formats.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "kgx/numfmt.h"

namespace kgx {
namespace {

using nlohmann::json;

constexpr const char* kCheckpointTag = "kgx-checkpoint";
constexpr const char* kStatsTag = "kgx-bk-stats";

std::string Quote(std::string_view s) { return json(std::string(s)).dump(); }

std::string Hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Splits on '\n', keeping a trailing '\r' out of the line.
template <typename Fn>
void ForEachLine(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line_no, line);
  }
}

bool Blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

// ---- checkpoint helpers -------------------------------------------------

[[noreturn]] void Corrupt(const std::string& why) {
  throw DataError("corrupt checkpoint: " + why);
}

const json& Get(const json& obj, const char* key) {
  if (!obj.is_object()) Corrupt("expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) Corrupt(std::string("missing '") + key + "'");
  return *it;
}

std::size_t GetSize(const json& obj, const char* key) {
  const json& v = Get(obj, key);
  if (!v.is_number_unsigned()) Corrupt(std::string("'") + key + "' is not a count");
  return v.get<std::size_t>();
}

double StringToDouble(const json& v) {
  if (!v.is_string()) Corrupt("number is not a string");
  try {
    return ParseDouble(v.get_ref<const std::string&>());
  } catch (const DataError&) {
    Corrupt("bad number '" + v.get<std::string>() + "'");
  }
}

json DoublesToJson(std::span<const double> values) {
  json out = json::array();
  for (double v : values) out.push_back(FormatDouble(v));
  return out;
}

std::vector<double> DoublesFromJson(const json& arr) {
  if (!arr.is_array()) Corrupt("expected an array of numbers");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) out.push_back(StringToDouble(v));
  return out;
}

std::vector<std::string> StringsFromJson(const json& arr) {
  if (!arr.is_array()) Corrupt("expected an array of names");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) Corrupt("name is not a string");
    out.push_back(v.get<std::string>());
  }
  return out;
}

json NetToJson(const DenseNet& net) {
  json layers = json::array();
  for (const auto& l : net.layers()) {
    layers.push_back({{"in", l.in},
                      {"out", l.out},
                      {"activation", std::string(ActivationName(l.activation))}});
  }
  return {{"input_width", net.input_width()},
          {"layers", std::move(layers)},
          {"params", DoublesToJson(net.params())}};
}

DenseNet NetFromJson(const json& j) {
  std::vector<LayerShape> layers;
  const json& arr = Get(j, "layers");
  if (!arr.is_array()) Corrupt("'layers' is not an array");
  for (const auto& l : arr) {
    Activation act;
    try {
      act = ParseActivation(Get(l, "activation").get<std::string>());
    } catch (const std::exception&) {
      Corrupt("bad activation");
    }
    layers.push_back({GetSize(l, "in"), GetSize(l, "out"), act});
  }
  DenseNet net;
  try {
    net = DenseNet(GetSize(j, "input_width"), std::move(layers));
  } catch (const std::invalid_argument& e) {
    Corrupt(e.what());
  }
  const auto params = DoublesFromJson(Get(j, "params"));
  if (params.size() != net.num_params()) Corrupt("parameter count mismatch");
  std::copy(params.begin(), params.end(), net.params().begin());
  return net;
}

json VocabToJson(const Vocabulary& v) {
  return {{"individuals", v.individuals()},
          {"unary", v.unary_predicates()},
          {"binary", v.binary_predicates()}};
}

// ---- dataset helpers ----------------------------------------------------

[[noreturn]] void SchemaError(std::size_t line, const std::string& why) {
  throw DataError("line " + std::to_string(line) + ": " + why);
}

std::vector<double> ReadEncodingFile(const std::filesystem::path& path,
                                     std::size_t line) {
  std::ifstream in(path);
  if (!in) SchemaError(line, "cannot open encoding_path '" + path.string() + "'");
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    try {
      values.push_back(ParseDouble(token));
    } catch (const DataError&) {
      SchemaError(line, "bad number in '" + path.string() + "'");
    }
  }
  return values;
}

Fact ParseFactJson(const json& f, const Vocabulary& vocab, std::size_t line) {
  if (!f.is_object()) SchemaError(line, "fact is not an object");
  auto field = [&](const char* key) -> const json& {
    auto it = f.find(key);
    if (it == f.end()) SchemaError(line, std::string("fact missing '") + key + "'");
    return *it;
  };
  const json& pred = field("pred");
  const json& kind = field("kind");
  const json& args = field("args");
  if (!pred.is_string() || !kind.is_string() || !args.is_array()) {
    SchemaError(line, "fact fields have the wrong types");
  }
  const auto& kind_name = kind.get_ref<const std::string&>();
  const bool unary = kind_name == "unary";
  if (!unary && kind_name != "binary") {
    SchemaError(line, "unknown fact kind '" + kind_name + "'");
  }
  if (args.size() != (unary ? 1u : 2u)) {
    SchemaError(line, "wrong number of arguments for " + kind_name + " fact");
  }
  const auto& pred_name = pred.get_ref<const std::string&>();
  const auto p = unary ? vocab.find_unary(pred_name) : vocab.find_binary(pred_name);
  if (!p) SchemaError(line, "unknown predicate '" + pred_name + "'");
  SymbolId ids[2] = {0, 0};
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (!args[k].is_string()) SchemaError(line, "argument is not a string");
    const auto& name = args[k].get_ref<const std::string&>();
    const auto id = vocab.find_individual(name);
    if (!id) SchemaError(line, "unknown individual '" + name + "'");
    ids[k] = *id;
  }
  const Fact fact =
      unary ? Fact::Unary(*p, ids[0]) : Fact::Binary(*p, ids[0], ids[1]);
  if (!validate_fact(fact, vocab)) {
    SchemaError(line, "invalid fact " + FormatFact(fact, vocab));
  }
  return fact;
}

std::string FactJson(const Fact& f, const Vocabulary& vocab) {
  std::string out = "{\"pred\":" + Quote(vocab.predicate_name(f.kind, f.predicate)) +
                    ",\"kind\":\"" + std::string(KindName(f.kind)) +
                    "\",\"args\":[" + Quote(vocab.individual(f.subject));
  if (f.is_binary()) out += "," + Quote(vocab.individual(f.object));
  return out + "]";
}

std::string DotEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string CellText(const ReportTable::Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return FormatDouble(std::get<double>(c));
}

}  // namespace

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Vocabulary ParseVocabularyTsv(std::string_view text) {
  std::vector<std::string> ind, attr, rel;
  ForEachLine(text, [&](std::size_t line_no, std::string_view line) {
    if (Blank(line)) return;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError("vocabulary line " + std::to_string(line_no) +
                      ": expected kind<TAB>name");
    }
    const auto kind = line.substr(0, tab);
    std::string name(line.substr(tab + 1));
    if (kind == "ind") ind.push_back(std::move(name));
    else if (kind == "attr") attr.push_back(std::move(name));
    else if (kind == "rel") rel.push_back(std::move(name));
    else {
      throw DataError("vocabulary line " + std::to_string(line_no) +
                      ": unknown kind '" + std::string(kind) + "'");
    }
  });
  return Vocabulary(std::move(ind), std::move(attr), std::move(rel));
}

std::string VocabularyToTsv(const Vocabulary& vocab) {
  std::string out;
  for (const auto& n : vocab.individuals()) out += "ind\t" + n + "\n";
  for (const auto& n : vocab.unary_predicates()) out += "attr\t" + n + "\n";
  for (const auto& n : vocab.binary_predicates()) out += "rel\t" + n + "\n";
  return out;
}

std::vector<Example> read_dataset(std::string_view text, const Vocabulary& vocab,
                                  std::size_t& dim_e,
                                  const std::filesystem::path& base_dir) {
  std::vector<Example> out;
  ForEachLine(text, [&](std::size_t line_no, std::string_view line) {
    if (Blank(line)) return;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      SchemaError(line_no, "not a JSON object");
    }
    Example ex;
    auto id = doc.find("id");
    if (id == doc.end() || !id->is_string()) SchemaError(line_no, "missing string 'id'");
    ex.id = id->get<std::string>();

    auto enc = doc.find("encoding");
    auto enc_path = doc.find("encoding_path");
    if (enc != doc.end()) {
      if (!enc->is_array()) SchemaError(line_no, "'encoding' is not an array");
      for (const auto& v : *enc) {
        if (!v.is_number()) SchemaError(line_no, "encoding entry is not a number");
        ex.encoding.push_back(v.get<double>());
      }
    } else if (enc_path != doc.end() && enc_path->is_string()) {
      ex.encoding = ReadEncodingFile(base_dir / enc_path->get<std::string>(), line_no);
    } else {
      SchemaError(line_no, "missing 'encoding'");
    }

    auto facts = doc.find("facts");
    if (facts == doc.end() || !facts->is_array()) {
      SchemaError(line_no, "missing array 'facts'");
    }
    for (const auto& f : *facts) {
      const Fact fact = ParseFactJson(f, vocab, line_no);
      auto label = f.find("label");
      if (label == f.end() || !label->is_boolean()) {
        SchemaError(line_no, "fact missing boolean 'label'");
      }
      (label->get<bool>() ? ex.positives : ex.negatives).push_back(fact);
    }
    Canonicalize(ex.positives);
    Canonicalize(ex.negatives);
    if (dim_e == 0) dim_e = ex.encoding.size();
    try {
      ValidateExample(ex, vocab, dim_e);
    } catch (const DataError& e) {
      SchemaError(line_no, e.what());
    }
    out.push_back(std::move(ex));
  });
  return out;
}

std::string write_dataset(std::span<const Example> examples,
                          const Vocabulary& vocab) {
  std::string out;
  for (const auto& ex : examples) {
    out += "{\"id\":" + Quote(ex.id) + ",\"encoding\":[";
    for (std::size_t d = 0; d < ex.encoding.size(); ++d) {
      if (d) out += ',';
      out += FormatDouble(ex.encoding[d]);
    }
    out += "],\"facts\":[";
    std::vector<std::pair<Fact, bool>> facts;
    for (const auto& f : ex.positives) facts.emplace_back(f, true);
    for (const auto& f : ex.negatives) facts.emplace_back(f, false);
    std::sort(facts.begin(), facts.end());
    for (std::size_t k = 0; k < facts.size(); ++k) {
      if (k) out += ',';
      out += FactJson(facts[k].first, vocab) + ",\"label\":" +
             (facts[k].second ? "true" : "false") + "}";
    }
    out += "]}\n";
  }
  return out;
}

std::vector<Example> ReadExamplesFile(const std::filesystem::path& path,
                                      const Vocabulary& vocab,
                                      std::size_t& dim_e) {
  const std::string text = ReadTextFile(path);
  try {
    return read_dataset(text, vocab, dim_e, path.parent_path());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Dataset ReadDatasetDir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("dataset directory '" + dir.string() + "' does not exist");
  }
  Dataset ds;
  ds.vocabulary = ParseVocabularyTsv(ReadTextFile(dir / "vocab.tsv"));
  std::size_t dim = 0;
  auto split = [&](const char* name) {
    const auto path = dir / (std::string(name) + ".jsonl");
    if (!std::filesystem::exists(path)) return std::vector<Example>{};
    return ReadExamplesFile(path, ds.vocabulary, dim);
  };
  ds.train = split("train");
  ds.validation = split("validation");
  ds.test = split("test");
  ds.dim_e = dim;
  return ds;
}

void WriteDatasetDir(const std::filesystem::path& dir, const Dataset& ds) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());
  WriteTextFile(dir / "vocab.tsv", VocabularyToTsv(ds.vocabulary));
  WriteTextFile(dir / "train.jsonl", write_dataset(ds.train, ds.vocabulary));
  WriteTextFile(dir / "validation.jsonl",
                write_dataset(ds.validation, ds.vocabulary));
  WriteTextFile(dir / "test.jsonl", write_dataset(ds.test, ds.vocabulary));
}

std::string save_checkpoint(const ExtractionModel& m) {
  json unary = json::array();
  for (const auto& net : m.predicates.unary) unary.push_back(NetToJson(net));
  json binary = json::array();
  for (const auto& net : m.predicates.binary) binary.push_back(NetToJson(net));
  json doc = {
      {"format", kCheckpointTag},
      {"format_version", kCheckpointVersion},
      {"vocabulary", VocabToJson(m.vocab)},
      {"vocabulary_fingerprint", Hex(m.vocab.fingerprint())},
      {"config",
       {{"raw_width", m.config.raw_width},
        {"dim_e", m.config.dim_e},
        {"trunk_hidden", m.config.trunk_hidden},
        {"detector_hidden", m.config.detector_hidden},
        {"embedding_dim", m.config.embedding_dim}}},
      {"metadata", m.metadata},
      {"trunk", NetToJson(m.detectors.trunk)},
      {"individuals", NetToJson(m.detectors.individuals)},
      {"classes", NetToJson(m.detectors.classes)},
      {"relations", NetToJson(m.detectors.relations)},
      {"embeddings",
       {{"dim", m.embeddings.dim}, {"values", DoublesToJson(m.embeddings.values)}}},
      {"unary_mlps", std::move(unary)},
      {"binary_mlps", std::move(binary)},
      {"fusion",
       {{"weights", DoublesToJson(m.fusion.weights)},
        {"bias", FormatDouble(m.fusion.bias)}}},
      {"thresholds",
       {{"mlp", FormatDouble(m.thresholds.mlp_threshold)},
        {"fusion", FormatDouble(m.thresholds.fusion_threshold)},
        {"unary_mlp", DoublesToJson(m.thresholds.unary_mlp)},
        {"binary_mlp", DoublesToJson(m.thresholds.binary_mlp)}}},
  };
  return doc.dump(1) + "\n";
}

ExtractionModel load_checkpoint(std::string_view text,
                                const Vocabulary* expected) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) Corrupt("not a JSON document");
  const json& tag = Get(doc, "format");
  if (!tag.is_string() || tag.get<std::string>() != kCheckpointTag) {
    Corrupt("not a kgx checkpoint");
  }
  const json& version = Get(doc, "format_version");
  if (!version.is_number_integer()) Corrupt("bad format_version");
  if (version.get<int>() != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " +
                    std::to_string(version.get<int>()) + " (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  }

  ExtractionModel m;
  const json& v = Get(doc, "vocabulary");
  try {
    m.vocab = Vocabulary(StringsFromJson(Get(v, "individuals")),
                         StringsFromJson(Get(v, "unary")),
                         StringsFromJson(Get(v, "binary")));
  } catch (const DataError& e) {
    Corrupt(e.what());
  }
  const json& fp = Get(doc, "vocabulary_fingerprint");
  if (!fp.is_string() || fp.get<std::string>() != Hex(m.vocab.fingerprint())) {
    Corrupt("vocabulary fingerprint does not match stored vocabulary");
  }
  if (expected != nullptr && expected->fingerprint() != m.vocab.fingerprint()) {
    throw DataError("vocabulary mismatch: checkpoint was trained on a different "
                    "vocabulary");
  }

  const json& c = Get(doc, "config");
  m.config.raw_width = GetSize(c, "raw_width");
  m.config.dim_e = GetSize(c, "dim_e");
  m.config.trunk_hidden = GetSize(c, "trunk_hidden");
  m.config.detector_hidden = GetSize(c, "detector_hidden");
  m.config.embedding_dim = GetSize(c, "embedding_dim");

  const json& meta = Get(doc, "metadata");
  if (!meta.is_object()) Corrupt("'metadata' is not an object");
  for (auto it = meta.begin(); it != meta.end(); ++it) {
    if (!it.value().is_string()) Corrupt("metadata value is not a string");
    m.metadata[it.key()] = it.value().get<std::string>();
  }

  m.detectors.trunk = NetFromJson(Get(doc, "trunk"));
  m.detectors.individuals = NetFromJson(Get(doc, "individuals"));
  m.detectors.classes = NetFromJson(Get(doc, "classes"));
  m.detectors.relations = NetFromJson(Get(doc, "relations"));

  const json& emb = Get(doc, "embeddings");
  m.embeddings.dim = GetSize(emb, "dim");
  m.embeddings.values = DoublesFromJson(Get(emb, "values"));

  for (const auto& net : Get(doc, "unary_mlps")) {
    m.predicates.unary.push_back(NetFromJson(net));
  }
  for (const auto& net : Get(doc, "binary_mlps")) {
    m.predicates.binary.push_back(NetFromJson(net));
  }

  const json& fusion = Get(doc, "fusion");
  const auto w = DoublesFromJson(Get(fusion, "weights"));
  if (w.size() != 2) Corrupt("fusion weights must have 2 entries");
  m.fusion.weights = {w[0], w[1]};
  m.fusion.bias = StringToDouble(Get(fusion, "bias"));

  const json& th = Get(doc, "thresholds");
  m.thresholds.mlp_threshold = StringToDouble(Get(th, "mlp"));
  m.thresholds.fusion_threshold = StringToDouble(Get(th, "fusion"));
  m.thresholds.unary_mlp = DoublesFromJson(Get(th, "unary_mlp"));
  m.thresholds.binary_mlp = DoublesFromJson(Get(th, "binary_mlp"));

  // Structural consistency with the vocabulary and config.
  const auto& d = m.detectors;
  if (d.trunk.input_width() != m.config.raw_width ||
      d.trunk.output_width() != m.config.dim_e ||
      d.individuals.input_width() != m.config.dim_e ||
      d.individuals.output_width() != m.vocab.num_individuals() ||
      d.classes.output_width() != m.vocab.num_unary() ||
      d.relations.output_width() != m.vocab.num_binary() ||
      m.embeddings.dim != m.config.embedding_dim ||
      m.embeddings.values.size() !=
          m.vocab.num_individuals() * m.config.embedding_dim ||
      m.predicates.unary.size() != m.vocab.num_unary() ||
      m.predicates.binary.size() != m.vocab.num_binary()) {
    Corrupt("shapes do not match vocabulary and config");
  }
  const std::size_t unary_in = m.config.dim_e + m.config.embedding_dim;
  for (const auto& net : m.predicates.unary) {
    if (net.input_width() != unary_in || net.output_width() != 1) {
      Corrupt("unary predicate MLP has the wrong shape");
    }
  }
  for (const auto& net : m.predicates.binary) {
    if (net.input_width() != unary_in + m.config.embedding_dim ||
        net.output_width() != 1) {
      Corrupt("binary predicate MLP has the wrong shape");
    }
  }
  if ((!m.thresholds.unary_mlp.empty() &&
       m.thresholds.unary_mlp.size() != m.vocab.num_unary()) ||
      (!m.thresholds.binary_mlp.empty() &&
       m.thresholds.binary_mlp.size() != m.vocab.num_binary())) {
    Corrupt("per-predicate thresholds do not match vocabulary");
  }
  return m;
}

std::string SaveStats(const BkStats& stats, const Vocabulary& vocab) {
  if (stats.num_individuals() != vocab.num_individuals()) {
    throw std::invalid_argument("SaveStats: vocabulary size mismatch");
  }
  const auto n = static_cast<SymbolId>(stats.num_individuals());
  json subjects = json::array();
  json pairs = json::array();
  for (SymbolId s = 0; s < n; ++s) {
    subjects.push_back(stats.subject_count(s));
    for (SymbolId o = 0; o < n; ++o) {
      if (const auto c = stats.pair_count(s, o)) pairs.push_back({s, o, c});
    }
  }
  json facts = json::array();
  for (const auto& [f, count] : stats.fact_counts()) {
    json args = json::array({f.subject});
    if (f.is_binary()) args.push_back(f.object);
    facts.push_back({{"kind", std::string(KindName(f.kind))},
                     {"pred", f.predicate},
                     {"args", std::move(args)},
                     {"count", count}});
  }
  json doc = {{"format", kStatsTag},
              {"format_version", kStatsVersion},
              {"vocabulary_fingerprint", Hex(vocab.fingerprint())},
              {"corpus_size", stats.corpus_size()},
              {"subject_counts", std::move(subjects)},
              {"pair_counts", std::move(pairs)},
              {"fact_counts", std::move(facts)}};
  return doc.dump(1) + "\n";
}

BkStats LoadStats(std::string_view text, const Vocabulary& vocab) {
  auto bad = [](const std::string& why) -> DataError {
    return DataError("corrupt statistics file: " + why);
  };
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw bad("not a JSON document");
  try {
    if (doc.at("format").get<std::string>() != kStatsTag) throw bad("wrong format tag");
    const int version = doc.at("format_version").get<int>();
    if (version != kStatsVersion) {
      throw DataError("unsupported statistics version " + std::to_string(version));
    }
    if (doc.at("vocabulary_fingerprint").get<std::string>() !=
        Hex(vocab.fingerprint())) {
      throw DataError("vocabulary mismatch: statistics were built for a "
                      "different vocabulary");
    }
    const auto n = vocab.num_individuals();
    BkStats stats(n);
    stats.SetCorpusSize(doc.at("corpus_size").get<std::uint64_t>());
    const auto& subjects = doc.at("subject_counts");
    if (subjects.size() != n) throw bad("subject_counts has the wrong length");
    for (SymbolId s = 0; s < n; ++s) {
      stats.AddSubject(s, subjects.at(s).get<std::uint64_t>());
    }
    for (const auto& p : doc.at("pair_counts")) {
      const auto s = p.at(0).get<SymbolId>();
      const auto o = p.at(1).get<SymbolId>();
      if (s >= n || o >= n || s == o) throw bad("pair out of range");
      stats.AddPair(s, o, p.at(2).get<std::uint64_t>());
    }
    for (const auto& f : doc.at("fact_counts")) {
      const auto kind = f.at("kind").get<std::string>();
      const auto& args = f.at("args");
      const auto pred = f.at("pred").get<SymbolId>();
      Fact fact;
      if (kind == "unary" && args.size() == 1) {
        fact = Fact::Unary(pred, args.at(0).get<SymbolId>());
      } else if (kind == "binary" && args.size() == 2) {
        fact = Fact::Binary(pred, args.at(0).get<SymbolId>(),
                            args.at(1).get<SymbolId>());
      } else {
        throw bad("bad fact entry");
      }
      if (!validate_fact(fact, vocab)) throw bad("fact out of range");
      const auto count = f.at("count").get<std::uint64_t>();
      if (count > stats.evidence_count(fact)) throw bad("count exceeds its N");
      stats.AddFact(fact, count);
    }
    return stats;
  } catch (const json::exception& e) {
    throw bad(e.what());
  }
}

std::vector<SceneGraph> ParseSceneCorpus(std::string_view text) {
  std::vector<SceneGraph> corpus;
  ForEachLine(text, [&](std::size_t line_no, std::string_view line) {
    if (Blank(line)) return;
    try {
      corpus.push_back(ParseSceneGraph(line));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return corpus;
}

std::string SceneCorpusToJsonl(std::span<const SceneGraph> corpus) {
  std::string out;
  for (const auto& g : corpus) out += SceneGraphToJson(g) + "\n";
  return out;
}

std::string WritePredictions(std::span<const PredictionRecord> records,
                             const Vocabulary& vocab) {
  std::string out;
  for (const auto& r : records) {
    // export_kg's JSON form is {"facts":[...]}\n; prefix the id.
    out += "{\"id\":" + Quote(r.id) + "," +
           export_kg(r.kg, vocab, KgFormat::kJson).substr(1);
  }
  return out;
}

std::vector<PredictionRecord> ReadPredictions(std::string_view text,
                                              const Vocabulary& vocab) {
  std::vector<PredictionRecord> out;
  ForEachLine(text, [&](std::size_t line_no, std::string_view line) {
    if (Blank(line)) return;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      SchemaError(line_no, "not a JSON object");
    }
    PredictionRecord rec;
    auto id = doc.find("id");
    if (id == doc.end() || !id->is_string()) SchemaError(line_no, "missing string 'id'");
    rec.id = id->get<std::string>();
    auto facts = doc.find("facts");
    if (facts == doc.end() || !facts->is_array()) {
      SchemaError(line_no, "missing array 'facts'");
    }
    for (const auto& f : *facts) {
      const Fact fact = ParseFactJson(f, vocab, line_no);
      std::optional<double> score;
      if (auto s = f.find("score"); s != f.end() && !s->is_null()) {
        if (!s->is_number()) SchemaError(line_no, "'score' is not a number");
        score = s->get<double>();
      }
      try {
        rec.kg.insert(fact, score);
      } catch (const std::exception& e) {
        SchemaError(line_no, e.what());
      }
    }
    out.push_back(std::move(rec));
  });
  return out;
}

KgFormat ParseKgFormat(std::string_view name) {
  if (name == "triples_tsv" || name == "tsv") return KgFormat::kTriplesTsv;
  if (name == "dot") return KgFormat::kDot;
  if (name == "json") return KgFormat::kJson;
  throw std::invalid_argument("unknown format '" + std::string(name) +
                              "' (expected triples_tsv|dot|json)");
}

std::string export_kg(const KnowledgeGraph& kg, const Vocabulary& vocab,
                      KgFormat format) {
  std::string out;
  switch (format) {
    case KgFormat::kTriplesTsv:
      for (const auto& [f, score] : kg.facts()) {
        out += vocab.individual(f.subject) + "\t" +
               vocab.predicate_name(f.kind, f.predicate) + "\t" +
               (f.is_binary() ? vocab.individual(f.object) : "∅") + "\n";
      }
      return out;
    case KgFormat::kDot: {
      std::map<SymbolId, std::vector<std::string>> nodes;
      for (const auto& [f, score] : kg.facts()) {
        auto& attrs = nodes[f.subject];
        if (f.is_unary()) attrs.push_back(vocab.predicate_name(f.kind, f.predicate));
        else nodes.try_emplace(f.object);
      }
      out = "digraph kg {\n";
      for (const auto& [id, attrs] : nodes) {
        const std::string name = DotEscape(vocab.individual(id));
        out += "  \"" + name + "\"";
        if (!attrs.empty()) {
          std::string label = name + "\\n";
          for (std::size_t k = 0; k < attrs.size(); ++k) {
            if (k) label += ", ";
            label += DotEscape(attrs[k]);
          }
          out += " [label=\"" + label + "\"]";
        }
        out += ";\n";
      }
      for (const auto& [f, score] : kg.facts()) {
        if (!f.is_binary()) continue;
        out += "  \"" + DotEscape(vocab.individual(f.subject)) + "\" -> \"" +
               DotEscape(vocab.individual(f.object)) + "\" [label=\"" +
               DotEscape(vocab.predicate_name(f.kind, f.predicate)) + "\"];\n";
      }
      return out + "}\n";
    }
    case KgFormat::kJson: {
      out = "{\"facts\":[";
      bool first = true;
      for (const auto& [f, score] : kg.facts()) {
        if (!first) out += ',';
        first = false;
        out += FactJson(f, vocab) + ",\"score\":" +
               (score ? FormatDouble(*score) : std::string("null")) + "}";
      }
      return out + "]}\n";
    }
  }
  return out;
}

ReportTable::ReportTable(std::vector<std::string> columns)
    : columns_(std::move(columns)) {}

void ReportTable::AddRow(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw std::invalid_argument("ReportTable: row width does not match header");
  }
  rows_.push_back(std::move(row));
}

std::string ReportTable::ToTsv() const {
  std::string out;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    out += (c ? "\t" : "") + columns_[c];
  }
  out += "\n";
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += (c ? "\t" : "") + CellText(row[c]);
    }
    out += "\n";
  }
  return out;
}

std::string ReportTable::ToJson() const {
  std::string out = "[";
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    out += r ? ",\n {" : "\n {";
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (c) out += ",";
      out += Quote(columns_[c]) + ":";
      const auto& cell = rows_[r][c];
      out += std::holds_alternative<std::string>(cell)
                 ? Quote(std::get<std::string>(cell))
                 : CellText(cell);
    }
    out += "}";
  }
  return out + (rows_.empty() ? "]\n" : "\n]\n");
}

}  // namespace kgx
