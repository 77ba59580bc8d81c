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

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "kgx/bgk.h"
#include "kgx/eval.h"
#include "kgx/formats.h"
#include "kgx/model.h"
#include "kgx/numfmt.h"
#include "kgx/synthgen.h"
#include "kgx/train.h"

namespace kgx::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string data;
  std::string vocab;
  std::string model;
  std::string stats;
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string q;
  std::string mode = "main";
  std::string out;
  std::string format;
  std::string caps = "0,1,2,5,10,20";
};

struct Context {
  Options opt;
  std::ostream& out;
  std::ostream& err;

  void Log(const std::string& line) const { err << "kgx: " << line << "\n"; }

  void Emit(const std::string& text) const {
    if (opt.out.empty()) {
      out << text;
    } else {
      WriteTextFile(opt.out, text);
      Log("wrote " + opt.out);
    }
  }
};

std::vector<std::size_t> ParseList(const std::string& text, const char* flag) {
  std::vector<std::size_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(ParseInteger<std::size_t>(item, flag));
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
  }
  if (values.empty()) throw UsageError(std::string(flag) + " needs a value");
  return values;
}

std::size_t SingleQ(const Options& opt, std::size_t fallback) {
  if (opt.q.empty()) return fallback;
  const auto qs = ParseList(opt.q, "--q");
  if (qs.size() != 1 || qs[0] == 0) throw UsageError("--q expects one positive integer");
  return qs[0];
}

InferenceMode Mode(const Options& opt) {
  try {
    return ParseMode(opt.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void Require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

void ApplyTrainConfigFile(const Options& opt, TrainConfig& tc, ModelConfig& mc) {
  if (!opt.config.empty()) ApplyConfigText(ReadTextFile(opt.config), tc, mc);
  if (opt.seed_given) tc.seed = opt.seed;
  tc.q = SingleQ(opt, tc.q);
}

std::optional<BkStats> LoadStatsOpt(const Options& opt, const Vocabulary& vocab) {
  if (opt.stats.empty()) return std::nullopt;
  return LoadStats(ReadTextFile(opt.stats), vocab);
}

ExtractionModel LoadModel(const Options& opt) {
  Require(opt.model, "--model");
  std::optional<Vocabulary> vocab;
  if (!opt.vocab.empty()) vocab = ParseVocabularyTsv(ReadTextFile(opt.vocab));
  return load_checkpoint(ReadTextFile(opt.model), vocab ? &*vocab : nullptr);
}

// A dataset directory contributes its test split; a file is read whole.
std::vector<Example> LoadEvalExamples(const Options& opt,
                                      const ExtractionModel& model) {
  Require(opt.data, "--data");
  std::vector<Example> examples;
  std::size_t dim = 0;
  if (fs::is_directory(opt.data)) {
    Dataset ds = ReadDatasetDir(opt.data);
    if (!(ds.vocabulary == model.vocab)) {
      throw DataError("vocabulary mismatch: '" + opt.data +
                      "' does not use the model's vocabulary");
    }
    dim = ds.dim_e;
    examples = std::move(ds.test);
  } else {
    examples = ReadExamplesFile(opt.data, model.vocab, dim);
  }
  if (!examples.empty() && dim != model.config.raw_width) {
    throw DataError("encoding width " + std::to_string(dim) +
                    " does not match the model input width " +
                    std::to_string(model.config.raw_width));
  }
  return examples;
}

std::string RenderTable(const ReportTable& table, const Options& opt) {
  if (opt.format.empty() || opt.format == "tsv") return table.ToTsv();
  if (opt.format == "json") return table.ToJson();
  throw UsageError("--format must be tsv or json for this command");
}

std::vector<ReportTable::Cell> MetricCells(const EvalResult& r) {
  const auto& m = r.report;
  return {m.f1,
          m.positive_accuracy,
          m.negative_accuracy,
          m.total_accuracy,
          m.precision,
          r.candidate_recall,
          static_cast<std::int64_t>(r.confusion.tp),
          static_cast<std::int64_t>(r.confusion.fp),
          static_cast<std::int64_t>(r.confusion.fn),
          static_cast<std::int64_t>(r.confusion.tn)};
}

std::vector<std::string> MetricColumns() {
  return {"f1",        "positive_accuracy", "negative_accuracy",
          "total_accuracy", "precision",    "candidate_recall",
          "tp",        "fp",                "fn",
          "tn"};
}

void WarnDegenerate(const Context& ctx, const EvalResult& r) {
  if (HasDegenerateDenominator(r.confusion)) {
    ctx.Log("warning: a metric had an empty denominator and is reported as 0");
  }
}

std::string LossSummary(const char* what, const TrainResult& r) {
  std::ostringstream ss;
  ss << what << ": " << r.history.size() << " epochs, best epoch "
     << r.best_epoch;
  if (r.best_epoch > 0) {
    ss << " (validation loss "
       << FormatDouble(r.history[r.best_epoch - 1].validation_loss) << ")";
  }
  if (r.early_stopped) ss << ", early stopped";
  return ss.str();
}

// ---- subcommands ----------------------------------------------------------

void CmdGen(const Context& ctx) {
  const Options& opt = ctx.opt;
  Require(opt.out, "--out");
  GenConfig g;
  if (!opt.config.empty()) ApplyGenConfigText(ReadTextFile(opt.config), g);
  if (opt.seed_given) g.seed = opt.seed;
  GeneratedData data = generate_dataset(g);
  WriteDatasetDir(opt.out, data.dataset);
  const auto corpus =
      generate_scene_corpus(g, data.table, data.dataset.vocabulary);
  WriteTextFile(fs::path(opt.out) / "scenes.jsonl", SceneCorpusToJsonl(corpus));
  const auto& v = data.dataset.vocabulary;
  ctx.Log("generated " + std::to_string(data.dataset.train.size()) + "/" +
          std::to_string(data.dataset.validation.size()) + "/" +
          std::to_string(data.dataset.test.size()) +
          " train/validation/test videos, vocabulary " +
          std::to_string(v.num_individuals()) + "/" +
          std::to_string(v.num_unary()) + "/" + std::to_string(v.num_binary()) +
          ", " + std::to_string(corpus.size()) + " scene graphs in " + opt.out);
}

void CmdIngestStats(const Context& ctx) {
  const Options& opt = ctx.opt;
  Require(opt.data, "--data");
  Require(opt.vocab, "--vocab");
  const Vocabulary vocab = ParseVocabularyTsv(ReadTextFile(opt.vocab));
  const auto corpus = ParseSceneCorpus(ReadTextFile(opt.data));
  const BkStats stats = ingest_scene_graphs(corpus, vocab);
  ctx.Log("ingested " + std::to_string(stats.corpus_size()) + " images, " +
          std::to_string(stats.fact_counts().size()) + " distinct facts");
  ctx.Emit(SaveStats(stats, vocab));
}

void CmdTrain(const Context& ctx) {
  const Options& opt = ctx.opt;
  Require(opt.data, "--data");
  Require(opt.out, "--out");
  const Dataset ds = ReadDatasetDir(opt.data);
  ModelConfig mc;
  mc.raw_width = ds.dim_e;
  mc.dim_e = ds.dim_e;
  TrainConfig tc;
  ApplyTrainConfigFile(opt, tc, mc);
  const auto stats = LoadStatsOpt(opt, ds.vocabulary);
  ctx.Log("training on " + std::to_string(ds.train.size()) + " videos (seed " +
          std::to_string(tc.seed) + ")");
  TrainReport report = train_model(ds, mc, tc, stats ? &*stats : nullptr);
  ctx.Log(LossSummary("detectors", report.detectors));
  ctx.Log(LossSummary("predicate MLPs", report.scorer));
  ctx.Log("calibrated mlp_threshold " +
          FormatDouble(report.model.thresholds.mlp_threshold) +
          ", fusion_threshold " +
          FormatDouble(report.model.thresholds.fusion_threshold) +
          ", train F1 " + FormatDouble(report.calibration.train_f1_main));
  WriteTextFile(opt.out, save_checkpoint(report.model));
  ctx.Log("wrote " + opt.out);
}

void CmdCalibrate(const Context& ctx) {
  const Options& opt = ctx.opt;
  Require(opt.data, "--data");
  Require(opt.out, "--out");
  ExtractionModel model = LoadModel(opt);
  const Dataset ds = ReadDatasetDir(opt.data);
  if (!(ds.vocabulary == model.vocab)) {
    throw DataError("vocabulary mismatch: '" + opt.data +
                    "' does not use the model's vocabulary");
  }
  TrainConfig tc;
  ModelConfig mc = model.config;
  ApplyTrainConfigFile(opt, tc, mc);
  const auto stats = LoadStatsOpt(opt, model.vocab);
  const Calibration cal =
      calibrate(model, ds.train, stats ? &*stats : nullptr, tc);
  model.thresholds = cal.thresholds;
  model.fusion = cal.fusion;
  ctx.Log("mlp_threshold " + FormatDouble(cal.thresholds.mlp_threshold) +
          ", fusion_threshold " + FormatDouble(cal.thresholds.fusion_threshold));
  WriteTextFile(opt.out, save_checkpoint(model));
  ctx.Log("wrote " + opt.out);
}

void CmdPredict(const Context& ctx) {
  const Options& opt = ctx.opt;
  const ExtractionModel model = LoadModel(opt);
  const auto examples = LoadEvalExamples(opt, model);
  const auto stats = LoadStatsOpt(opt, model.vocab);
  CandidateConfig cand;
  cand.q = SingleQ(opt, cand.q);
  const InferenceMode mode = Mode(opt);
  std::vector<PredictionRecord> records;
  for (const auto& ex : examples) {
    records.push_back({ex.id, predict(model, ex.encoding, cand, mode,
                                      stats ? &*stats : nullptr)});
  }
  if (opt.format.empty() || opt.format == "json") {
    ctx.Emit(WritePredictions(records, model.vocab));
  } else if (opt.format == "triples_tsv" || opt.format == "tsv") {
    std::string text;
    for (const auto& r : records) {
      std::istringstream lines(export_kg(r.kg, model.vocab, KgFormat::kTriplesTsv));
      std::string line;
      auto it = r.kg.facts().begin();
      while (std::getline(lines, line)) {
        text += r.id + "\t" + line + "\t" + FormatDouble(it->second.value_or(0.0)) + "\n";
        ++it;
      }
    }
    ctx.Emit(text);
  } else {
    throw UsageError("--format must be json or triples_tsv for predict");
  }
}

void CmdEval(const Context& ctx) {
  const Options& opt = ctx.opt;
  const ExtractionModel model = LoadModel(opt);
  const auto examples = LoadEvalExamples(opt, model);
  const auto stats = LoadStatsOpt(opt, model.vocab);
  EvalSettings s;
  s.candidates.q = SingleQ(opt, s.candidates.q);
  s.mode = Mode(opt);
  s.stats = stats ? &*stats : nullptr;
  const EvalResult r = evaluate(model, examples, s);
  WarnDegenerate(ctx, r);
  ReportTable table(MetricColumns());
  table.AddRow(MetricCells(r));
  ctx.Emit(RenderTable(table, opt));
}

void CmdAblate(const Context& ctx) {
  const Options& opt = ctx.opt;
  const ExtractionModel model = LoadModel(opt);
  const auto examples = LoadEvalExamples(opt, model);
  const auto stats = LoadStatsOpt(opt, model.vocab);
  EvalSettings top;
  top.candidates.q = SingleQ(opt, top.candidates.q);
  top.mode = Mode(opt);
  top.stats = stats ? &*stats : nullptr;
  EvalSettings thr = top;
  thr.candidates.strategy = CandidateStrategy::kThresholdProduct;
  const AblationResult r = ablate_combiner(model, examples, top, thr);
  auto columns = MetricColumns();
  columns.insert(columns.begin(), "strategy");
  ReportTable table(columns);
  for (const auto& [name, res] :
       {std::pair{"top_q", &r.top_q},
        std::pair{"threshold_product", &r.threshold_product}}) {
    WarnDegenerate(ctx, *res);
    auto cells = MetricCells(*res);
    cells.insert(cells.begin(), std::string(name));
    table.AddRow(std::move(cells));
  }
  ctx.Emit(RenderTable(table, opt));
}

void CmdSweepQ(const Context& ctx) {
  const Options& opt = ctx.opt;
  const ExtractionModel model = LoadModel(opt);
  const auto examples = LoadEvalExamples(opt, model);
  const auto stats = LoadStatsOpt(opt, model.vocab);
  auto qs = ParseList(opt.q.empty() ? "25,50,100,200,400,800" : opt.q, "--q");
  if (!std::is_sorted(qs.begin(), qs.end()) ||
      std::find(qs.begin(), qs.end(), 0) != qs.end()) {
    throw UsageError("--q values must be positive and ascending");
  }
  EvalSettings s;
  s.mode = Mode(opt);
  s.stats = stats ? &*stats : nullptr;
  ReportTable table({"q", "f1", "positive_accuracy", "negative_accuracy",
                     "total_accuracy", "candidate_recall", "wall_time_ms"});
  for (const auto& row : sweep_q(model, examples, qs, s)) {
    const auto& m = row.result.report;
    table.AddRow({static_cast<std::int64_t>(row.q), m.f1, m.positive_accuracy,
                  m.negative_accuracy, m.total_accuracy,
                  row.result.candidate_recall, row.wall_time_ms});
  }
  ctx.Emit(RenderTable(table, opt));
}

void CmdSweepEpochs(const Context& ctx) {
  const Options& opt = ctx.opt;
  Require(opt.data, "--data");
  const Dataset ds = ReadDatasetDir(opt.data);
  ModelConfig mc;
  mc.raw_width = ds.dim_e;
  mc.dim_e = ds.dim_e;
  TrainConfig tc;
  ApplyTrainConfigFile(opt, tc, mc);
  const auto caps = ParseList(opt.caps, "--caps");
  if (caps.front() != 0 || !std::is_sorted(caps.begin(), caps.end())) {
    throw UsageError("--caps must be ascending and start at 0");
  }
  const auto stats = LoadStatsOpt(opt, ds.vocabulary);
  if (!stats) ctx.Log("warning: no --stats given; the extended model sees bk = 0.5");
  ReportTable table({"epochs", "f1_main", "f1_extended"});
  for (const auto& row :
       sweep_epochs(ds, mc, tc, caps, stats ? &*stats : nullptr)) {
    table.AddRow({static_cast<std::int64_t>(row.cap), row.f1_main,
                  row.f1_extended});
  }
  ctx.Emit(RenderTable(table, opt));
}

std::string SafeFileName(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out.empty() ? "_" : out;
}

void CmdExport(const Context& ctx) {
  const Options& opt = ctx.opt;
  Require(opt.data, "--data");
  Require(opt.out, "--out");
  Vocabulary vocab;
  if (!opt.vocab.empty()) {
    vocab = ParseVocabularyTsv(ReadTextFile(opt.vocab));
  } else if (!opt.model.empty()) {
    vocab = LoadModel(opt).vocab;
  } else {
    throw UsageError("export needs --vocab or --model");
  }
  KgFormat format;
  try {
    format = ParseKgFormat(opt.format.empty() ? "triples_tsv" : opt.format);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const char* ext = format == KgFormat::kDot    ? ".dot"
                    : format == KgFormat::kJson ? ".json"
                                                : ".tsv";
  const auto records = ReadPredictions(ReadTextFile(opt.data), vocab);
  std::error_code ec;
  fs::create_directories(opt.out, ec);
  if (ec) throw DataError("cannot create '" + opt.out + "': " + ec.message());
  for (const auto& r : records) {
    WriteTextFile(fs::path(opt.out) / (SafeFileName(r.id) + ext),
                  export_kg(r.kg, vocab, format));
  }
  ctx.Log("exported " + std::to_string(records.size()) + " graphs to " + opt.out);
}

struct Command {
  const char* name;
  const char* help;
  std::vector<const char*> flags;
  std::function<void(const Context&)> fn;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Options opt;
  CLI::App app{"kgx: knowledge-graph extraction from video encodings"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  const std::vector<Command> commands = {
      {"gen", "Generate a planted dataset directory and scene-graph corpus",
       {"--out", "--config", "--seed"}, CmdGen},
      {"ingest-stats", "Count facts in a scene-graph corpus",
       {"--data", "--vocab", "--out"}, CmdIngestStats},
      {"train", "Train detectors and predicate MLPs, then calibrate",
       {"--data", "--config", "--seed", "--stats", "--q", "--out"}, CmdTrain},
      {"calibrate", "Re-select thresholds and refit the fusion regressor",
       {"--model", "--data", "--vocab", "--config", "--seed", "--stats", "--q", "--out"},
       CmdCalibrate},
      {"predict", "Extract knowledge graphs",
       {"--model", "--data", "--vocab", "--stats", "--q", "--mode", "--format", "--out"},
       CmdPredict},
      {"eval", "Report F1 and positive/negative/total accuracy",
       {"--model", "--data", "--vocab", "--stats", "--q", "--mode", "--format", "--out"},
       CmdEval},
      {"ablate-combiner", "Compare top-q candidates with per-symbol thresholds",
       {"--model", "--data", "--vocab", "--stats", "--q", "--mode", "--format", "--out"},
       CmdAblate},
      {"sweep-q", "Evaluate over a list of q values",
       {"--model", "--data", "--vocab", "--stats", "--q", "--mode", "--format", "--out"},
       CmdSweepQ},
      {"sweep-epochs", "F1 of both modes against predicate-MLP epoch caps",
       {"--data", "--config", "--seed", "--stats", "--q", "--caps", "--format", "--out"},
       CmdSweepEpochs},
      {"export", "Render predicted graphs as triples_tsv, dot or json",
       {"--data", "--vocab", "--model", "--format", "--out"}, CmdExport},
  };

  const std::map<std::string, std::function<void(CLI::App*)>> flag_makers = {
      {"--data", [&](CLI::App* c) { c->add_option("--data", opt.data, "Dataset directory, JSONL file, or input file"); }},
      {"--vocab", [&](CLI::App* c) { c->add_option("--vocab", opt.vocab, "Vocabulary TSV"); }},
      {"--model", [&](CLI::App* c) { c->add_option("--model", opt.model, "Checkpoint file"); }},
      {"--stats", [&](CLI::App* c) { c->add_option("--stats", opt.stats, "Background statistics JSON"); }},
      {"--config", [&](CLI::App* c) { c->add_option("--config", opt.config, "key=value config file"); }},
      {"--seed", [&](CLI::App* c) { c->add_option("--seed", opt.seed, "Random seed (default 0)"); }},
      {"--q", [&](CLI::App* c) { c->add_option("--q", opt.q, "Candidate count q (comma list for sweep-q)"); }},
      {"--mode", [&](CLI::App* c) { c->add_option("--mode", opt.mode, "main|extended")->capture_default_str(); }},
      {"--out", [&](CLI::App* c) { c->add_option("--out", opt.out, "Output path (stdout when omitted, if allowed)"); }},
      {"--format", [&](CLI::App* c) { c->add_option("--format", opt.format, "Output format"); }},
      {"--caps", [&](CLI::App* c) { c->add_option("--caps", opt.caps, "Comma list of predicate-MLP epoch caps")->capture_default_str(); }},
  };

  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    for (const char* flag : cmd.flags) flag_makers.at(flag)(sub);
    subs.emplace_back(sub, &cmd);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (const auto& [sub, cmd] : subs) {
    if (!sub->parsed()) continue;
    if (auto* seed = sub->get_option_no_throw("--seed")) {
      opt.seed_given = seed->count() > 0;
    }
    Context ctx{opt, out, err};
    try {
      cmd->fn(ctx);
      return kExitOk;
    } catch (const UsageError& e) {
      err << "kgx " << cmd->name << ": " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "kgx " << cmd->name << ": " << e.what() << "\n";
      return kExitData;
    }
  }
  return kExitUsage;
}

}  // namespace kgx::cli
