// Copyright 2026 The ESAL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "esal/check_suite.h"
#include "esal/corpus.h"
#include "esal/errors.h"
#include "esal/metrics.h"
#include "esal/model.h"
#include "esal/synthgen.h"
#include "esal/training.h"
#include "esal/util.h"
#include "json.hpp"

namespace esal::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Kind { kInt, kUint, kDouble, kString, kBool, kDoubleList };

struct KeySpec {
  const char* key;
  Kind kind;
  const char* help;
};

// Every key a config file may hold. Flags are the same names in kebab case.
constexpr KeySpec kKeys[] = {
    {"seed", Kind::kUint, "random seed"},
    {"schema", Kind::kString, "schema JSON path"},
    {"out", Kind::kString, "output directory"},
    {"train_dialogues", Kind::kInt, "dialogues in the train split"},
    {"dev_dialogues", Kind::kInt, "dialogues in the dev split"},
    {"test_dialogues", Kind::kInt, "dialogues in the test split"},
    {"utterances_per_dialogue", Kind::kInt, "utterances per dialogue"},
    {"window_size", Kind::kInt, "utterances per window"},
    {"labels_per_window", Kind::kDouble, "mean labels per window"},
    {"noise", Kind::kDouble, "probability an item cue is replaced by a distractor"},
    {"train", Kind::kString, "train corpus JSONL"},
    {"dev", Kind::kString, "dev corpus JSONL"},
    {"checkpoint", Kind::kString, "checkpoint path"},
    {"log", Kind::kString, "training log JSONL path"},
    {"resume", Kind::kString, "checkpoint to continue training from"},
    {"deterministic", Kind::kBool, "serial, bit-reproducible execution (always on)"},
    {"embed_dim", Kind::kInt, "token embedding width"},
    {"lstm_hidden", Kind::kInt, "LSTM hidden width per direction"},
    {"gate_hidden", Kind::kInt, "gate hidden width"},
    {"ffn_hidden", Kind::kInt, "output head hidden width"},
    {"gate_mode", Kind::kString, "single | per_category"},
    {"context_windows", Kind::kInt, "previous windows matched against (K)"},
    {"score_head", Kind::kString, "scalar | maxpool"},
    {"score_pool", Kind::kInt, "output width max-pooled by the maxpool head"},
    {"optimizer", Kind::kString, "adam | sgd"},
    {"learning_rate", Kind::kDouble, "learning rate"},
    {"batch_size", Kind::kInt, "windows per minibatch"},
    {"max_epochs", Kind::kInt, "epoch limit"},
    {"patience", Kind::kInt, "early-stopping patience in epochs"},
    {"clip_norm", Kind::kDouble, "global gradient-norm clip"},
    {"threshold_grid", Kind::kDoubleList, "comma-separated thresholds swept on dev"},
    {"max_seq_len", Kind::kInt, "token limit per window"},
    {"vocab_min_freq", Kind::kInt, "minimum token count"},
    {"vocab_max_size", Kind::kInt, "vocabulary cap (0 = none)"},
    {"corpus", Kind::kString, "corpus JSONL"},
    {"output", Kind::kString, "output file"},
    {"threshold", Kind::kDouble, "decision threshold (overrides the checkpoint's)"},
    {"predictions", Kind::kString, "predictions JSONL"},
    {"gold", Kind::kString, "gold corpus JSONL"},
    {"format", Kind::kString, "text | json"},
    {"dialogue_id", Kind::kString, "dialogue to inspect"},
    {"window_index", Kind::kInt, "window to inspect"},
    {"samples_per_tensor", Kind::kInt, "coordinates checked per tensor"},
    {"eps", Kind::kDouble, "finite-difference step"},
    {"tolerance", Kind::kDouble, "maximum relative error"},
};

const KeySpec& Spec(const std::string& key) {
  for (const auto& k : kKeys) {
    if (key == k.key) return k;
  }
  throw std::logic_error("unregistered key " + key);
}

std::string Kebab(std::string s) {
  for (char& c : s) {
    if (c == '_') c = '-';
  }
  return s;
}

json ConvertFlag(const KeySpec& spec, const std::string& raw) {
  const std::string flag = "--" + Kebab(spec.key);
  try {
    size_t used = 0;
    switch (spec.kind) {
      case Kind::kInt: {
        const long long v = std::stoll(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::kUint: {
        if (!raw.empty() && raw[0] == '-') break;
        const unsigned long long v = std::stoull(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::kDouble: {
        const double v = std::stod(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::kString:
        return raw;
      case Kind::kBool:
        return true;
      case Kind::kDoubleList: {
        json list = json::array();
        std::stringstream ss(raw);
        std::string part;
        while (std::getline(ss, part, ',')) {
          list.push_back(std::stod(std::string(Trim(part)), &used));
        }
        return list;
      }
    }
  } catch (const std::logic_error&) {
  }
  throw ConfigError("invalid value '" + raw + "' for " + flag);
}

// Merged settings: defaults < config file < ESAL_SEED < flags.
class Settings {
 public:
  void LoadFile(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
    json j;
    try {
      j = json::parse(ReadFile(path));
    } catch (const json::exception& e) {
      throw ConfigError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
      bool known = false;
      for (const auto& k : kKeys) known = known || key == k.key;
      if (!known) throw ConfigError("unknown config key '" + key + "'");
      values_[key] = value;
    }
  }

  void Set(const std::string& key, json value) { values_[key] = std::move(value); }
  bool Has(const std::string& key) const { return values_.contains(key); }

  template <typename V>
  V Get(const std::string& key, V fallback) const {
    if (!values_.contains(key)) return fallback;
    try {
      return values_.at(key).get<V>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }

  std::string Require(const std::string& key) const {
    if (!values_.contains(key)) throw ConfigError("missing required --" + Kebab(key));
    return Get<std::string>(key, "");
  }

  std::string RequireFile(const std::string& key) const {
    const std::string path = Require(key);
    if (!fs::exists(path)) throw ConfigError("--" + Kebab(key) + ": no such file " + path);
    return path;
  }

 private:
  json values_ = json::object();
};

// Binds the listed keys of a subcommand as string flags.
class Command {
 public:
  Command(CLI::App& app, const char* name, const char* help, std::vector<std::string> keys)
      : sub_(app.add_subcommand(name, help)), keys_(std::move(keys)) {
    sub_->add_option("--config", config_, "JSON config file");
    for (const auto& key : keys_) {
      const KeySpec& spec = Spec(key);
      const std::string flag = "--" + Kebab(key);
      if (spec.kind == Kind::kBool) {
        sub_->add_flag(flag, spec.help);
      } else {
        sub_->add_option(flag, raw_[key], spec.help);
      }
    }
  }

  CLI::App* app() { return sub_; }
  bool parsed() const { return sub_->parsed(); }

  Settings Resolve() const {
    Settings s;
    if (!config_.empty()) s.LoadFile(config_);
    if (const char* env = std::getenv("ESAL_SEED")) s.Set("seed", ConvertFlag(Spec("seed"), env));
    for (const auto& key : keys_) {
      const std::string flag = "--" + Kebab(key);
      if (sub_->count(flag) == 0) continue;
      const KeySpec& spec = Spec(key);
      s.Set(key, spec.kind == Kind::kBool ? json(true) : ConvertFlag(spec, raw_.at(key)));
    }
    return s;
  }

 private:
  CLI::App* sub_;
  std::vector<std::string> keys_;
  std::string config_;
  std::map<std::string, std::string> raw_;
};

const std::vector<std::string> kModelKeys = {"embed_dim",  "lstm_hidden", "gate_hidden",
                                             "ffn_hidden", "gate_mode",   "context_windows",
                                             "score_head", "score_pool"};
const std::vector<std::string> kTrainKeys = {"seed",           "optimizer",      "learning_rate",
                                             "batch_size",     "max_epochs",     "patience",
                                             "clip_norm",      "threshold_grid", "max_seq_len",
                                             "vocab_min_freq", "vocab_max_size", "deterministic"};

std::vector<std::string> Concat(std::initializer_list<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Schema LoadSchemaSetting(const Settings& s) { return Schema::Load(s.RequireFile("schema")); }

ModelConfig ModelConfigFrom(const Settings& s) {
  ModelConfig c;
  c.dims.embed_dim = s.Get("embed_dim", c.dims.embed_dim);
  c.dims.lstm_hidden = s.Get("lstm_hidden", c.dims.lstm_hidden);
  c.dims.gate_hidden = s.Get("gate_hidden", c.dims.gate_hidden);
  c.dims.ffn_hidden = s.Get("ffn_hidden", c.dims.ffn_hidden);
  c.gate_mode =
      ParseGateMode(s.Get<std::string>("gate_mode", std::string(GateModeName(c.gate_mode))));
  c.context_windows = s.Get("context_windows", c.context_windows);
  c.score_head =
      ParseScoreHead(s.Get<std::string>("score_head", std::string(ScoreHeadName(c.score_head))));
  c.score_pool = s.Get("score_pool", c.score_pool);
  c.Validate();
  return c;
}

TrainConfig TrainConfigFrom(const Settings& s) {
  TrainConfig c;
  c.optimizer =
      ParseOptimizer(s.Get<std::string>("optimizer", std::string(OptimizerName(c.optimizer))));
  c.learning_rate = s.Get("learning_rate", c.learning_rate);
  c.batch_size = s.Get("batch_size", c.batch_size);
  c.max_epochs = s.Get("max_epochs", c.max_epochs);
  c.patience = s.Get("patience", c.patience);
  c.seed = s.Get<uint64_t>("seed", c.seed);
  c.clip_norm = s.Get("clip_norm", c.clip_norm);
  c.threshold_grid = s.Get("threshold_grid", c.threshold_grid);
  c.max_seq_len = s.Get("max_seq_len", c.max_seq_len);
  c.vocab_min_freq = s.Get("vocab_min_freq", c.vocab_min_freq);
  c.vocab_max_size = s.Get("vocab_max_size", c.vocab_max_size);
  c.Validate();
  return c;
}

void EnsureParentDir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw ConfigError("cannot create directory " + parent.string() + ": " + ec.message());
}

// Any I/O failure while writing an output is a usage problem (bad path).
void WriteOutput(const std::string& path, std::string_view contents) {
  EnsureParentDir(path);
  try {
    WriteFile(path, contents);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

int CmdGen(const Settings& s, std::ostream& out) {
  GenConfig c;
  if (s.Has("schema")) c.schema = LoadSchemaSetting(s);
  c.train_dialogues = s.Get("train_dialogues", c.train_dialogues);
  c.dev_dialogues = s.Get("dev_dialogues", c.dev_dialogues);
  c.test_dialogues = s.Get("test_dialogues", c.test_dialogues);
  c.utterances_per_dialogue = s.Get("utterances_per_dialogue", c.utterances_per_dialogue);
  c.window_size = s.Get("window_size", c.window_size);
  c.labels_per_window = s.Get("labels_per_window", c.labels_per_window);
  c.noise = s.Get("noise", c.noise);
  c.seed = s.Get<uint64_t>("seed", c.seed);
  const std::string dir = s.Require("out");
  const GeneratedCorpus corpus = Generate(c);
  try {
    WriteGenerated(corpus, c.schema, dir);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  auto stats = [&](const char* name, const std::vector<Dialogue>& split) {
    int64_t windows = 0, labels = 0;
    for (const auto& d : split) {
      windows += static_cast<int64_t>(d.windows.size());
      for (const auto& w : d.windows) labels += static_cast<int64_t>(w.gold.size());
    }
    char line[160];
    std::snprintf(line, sizeof(line),
                  "%-5s %6zu dialogues %7lld windows %7lld labels  %.3f labels/window\n", name,
                  split.size(), static_cast<long long>(windows), static_cast<long long>(labels),
                  windows ? static_cast<double>(labels) / windows : 0.0);
    out << line;
  };
  stats("train", corpus.train);
  stats("dev", corpus.dev);
  stats("test", corpus.test);
  out << "wrote " << dir << "\n";
  return kExitOk;
}

int CmdTrain(const Settings& s, std::ostream& out) {
  const Schema schema = LoadSchemaSetting(s);
  const auto train = LoadCorpus(s.RequireFile("train"), schema);
  const auto dev = LoadCorpus(s.RequireFile("dev"), schema);
  const ModelConfig model_config = ModelConfigFrom(s);
  const TrainConfig config = TrainConfigFrom(s);
  const std::string checkpoint = s.Require("checkpoint");
  std::optional<TrainedModel> resume;
  if (s.Has("resume")) resume = LoadTrainedModel(s.RequireFile("resume"));

  std::ofstream log;
  if (s.Has("log")) {
    EnsureParentDir(s.Require("log"));
    log.open(s.Require("log"), std::ios::trunc);
    if (!log) throw ConfigError("cannot write " + s.Require("log"));
  }
  TrainHooks hooks;
  hooks.on_epoch = [&](const EpochRecord& r) {
    char line[200];
    std::snprintf(line, sizeof(line),
                  "epoch %3d  train_loss %.6f  dev_loss %.6f  dev_f1 full %.4f item %.4f "
                  "category %.4f  %.1fs\n",
                  r.epoch, r.train_loss, r.dev_loss, r.dev_f1_full, r.dev_f1_item,
                  r.dev_f1_category, r.seconds);
    out << line << std::flush;
    if (log) log << r.ToJson().dump() << "\n" << std::flush;
  };
  TrainResult result =
      Train(schema, train, dev, model_config, config, hooks, resume ? &*resume : nullptr);
  EnsureParentDir(checkpoint);
  try {
    SaveTrainedModel(checkpoint, result.model);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  out << "best epoch " << result.best_epoch << (result.stopped_early ? " (early stop)" : "")
      << ", threshold " << result.model.threshold << ", checkpoint " << checkpoint << "\n";
  return kExitOk;
}

struct LoadedRun {
  TrainedModel trained;
  std::vector<Dialogue> corpus;
};

LoadedRun LoadForInference(const Settings& s) {
  TrainedModel trained = LoadTrainedModel(s.RequireFile("checkpoint"));
  if (s.Has("schema")) {
    const Schema given = LoadSchemaSetting(s);
    if (given.Hash() != trained.schema.Hash()) {
      throw DataMismatchError("schema hash " + given.Hash() + " does not match checkpoint " +
                              trained.schema.Hash());
    }
  }
  std::vector<Dialogue> corpus = LoadCorpus(s.RequireFile("corpus"), trained.schema);
  return {std::move(trained), std::move(corpus)};
}

int CmdPredict(const Settings& s, std::ostream& out) {
  const LoadedRun run = LoadForInference(s);
  const std::string output = s.Require("output");
  const double threshold = s.Get("threshold", run.trained.threshold);
  const EsalModel<float> model = run.trained.MakeModel();
  const auto examples = BuildExamples(run.corpus, run.trained.vocab, model.space(),
                                      run.trained.config, run.trained.max_seq_len);
  const auto probs = PredictProbabilities(model, run.trained.params, examples);
  const auto records = MakePredictions(examples, probs, model.space(), threshold);
  WriteOutput(output, FormatPredictions(records, run.trained.schema));
  out << "predicted " << records.size() << " windows at threshold " << threshold << " -> " << output
      << "\n";
  return kExitOk;
}

int CmdScore(const Settings& s, std::ostream& out) {
  const Schema schema = LoadSchemaSetting(s);
  const auto gold = LoadCorpus(s.RequireFile("gold"), schema);
  const auto preds = ParsePredictions(ReadFile(s.RequireFile("predictions")), schema);
  const EvalReport report = Evaluate(PredictionSets(preds), GoldSets(gold), schema);
  const std::string format = s.Get<std::string>("format", "text");
  if (format == "json") {
    out << report.ToJson().dump(2) << "\n";
  } else if (format == "text") {
    out << report.FormatTable();
  } else {
    throw ConfigError("--format must be text or json");
  }
  if (s.Has("output")) WriteOutput(s.Require("output"), report.ToJson().dump(2) + "\n");
  return kExitOk;
}

std::string CsvField(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void WriteHeatmap(const fs::path& base, const std::vector<std::string>& tokens,
                  const std::vector<std::string>& queries, const Tensor<float>& weights) {
  std::string csv = CsvField("query");
  for (const auto& t : tokens) csv += "," + CsvField(t);
  csv += "\n";
  float max = 0;
  for (float w : weights.values()) max = std::max(max, w);
  std::string pgm =
      "P5\n" + std::to_string(tokens.size()) + " " + std::to_string(queries.size()) + "\n255\n";
  for (int r = 0; r < weights.rows(); ++r) {
    csv += CsvField(queries[r]);
    for (int c = 0; c < weights.cols(); ++c) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), ",%.10f", static_cast<double>(weights.at(r, c)));
      csv += buf;
      const double scaled = max > 0 ? 255.0 * weights.at(r, c) / max : 0.0;
      pgm += static_cast<char>(static_cast<unsigned char>(std::lround(scaled)));
    }
    csv += "\n";
  }
  WriteOutput(base.string() + ".csv", csv);
  WriteOutput(base.string() + ".pgm", pgm);
}

int CmdInspect(const Settings& s, std::ostream& out) {
  const LoadedRun run = LoadForInference(s);
  const std::string dialogue_id = s.Require("dialogue_id");
  if (!s.Has("window_index")) throw ConfigError("missing required --window-index");
  const int window_index = s.Get("window_index", 0);
  const fs::path dir = s.Require("out");

  const EsalModel<float> model = run.trained.MakeModel();
  const Dialogue* dialogue = nullptr;
  for (const auto& d : run.corpus) {
    if (d.id == dialogue_id) dialogue = &d;
  }
  if (!dialogue) throw ConfigError("no dialogue '" + dialogue_id + "' in the corpus");
  const auto examples = BuildExamples({*dialogue}, run.trained.vocab, model.space(),
                                      run.trained.config, run.trained.max_seq_len);
  const Example* ex = nullptr;
  for (const auto& e : examples) {
    if (e.key.second == window_index) ex = &e;
  }
  if (!ex) {
    throw ConfigError("dialogue '" + dialogue_id + "' has no window " +
                      std::to_string(window_index));
  }

  Graph<float> g;
  const WindowForward<float> fw = model.Forward(g, run.trained.params, ex->input);
  const Schema& schema = run.trained.schema;
  for (int c = 0; c < schema.num_categories(); ++c) {
    std::string prefix = model.ExpertPrefix(c);
    std::replace(prefix.begin(), prefix.end(), '.', '_');
    WriteHeatmap(dir / prefix, ex->tokens, schema.categories()[c].items,
                 fw.evidence.pair_attention[c].value());
    out << "wrote " << (dir / prefix).string() << ".{csv,pgm}\n";
  }
  WriteHeatmap(dir / "status", ex->tokens, schema.statuses(), fw.evidence.status_attention.value());
  out << "wrote " << (dir / "status").string() << ".{csv,pgm}\n";
  return kExitOk;
}

int CmdGradcheck(const Settings& s, bool inject_sign_bug, std::ostream& out) {
  GradCheckOptions options;
  options.seed = s.Get<uint64_t>("seed", options.seed);
  options.samples_per_tensor = s.Get("samples_per_tensor", options.samples_per_tensor);
  options.eps = s.Get("eps", options.eps);
  options.negate_analytic = inject_sign_bug;
  const double tolerance = s.Get("tolerance", 1e-4);
  const auto start = std::chrono::steady_clock::now();
  const auto checks = RunGradCheckSuite(options);
  const NamedCheck* worst = nullptr;
  for (const auto& c : checks) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-34s max_rel_err %.3e  coords %lld  %s\n", c.name.c_str(),
                  c.report.max_rel_err, static_cast<long long>(c.report.checked),
                  c.report.Passed(tolerance) ? "ok" : "FAIL");
    out << line;
    if (!worst || c.report.max_rel_err > worst->report.max_rel_err) worst = &c;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char line[256];
  if (worst && !worst->report.Passed(tolerance)) {
    std::snprintf(line, sizeof(line),
                  "FAIL: %s %s[%lld] analytic %.9g numeric %.9g rel %.3e (tolerance %.1e, %.2fs)\n",
                  worst->name.c_str(), worst->report.worst_param.c_str(),
                  static_cast<long long>(worst->report.worst_index), worst->report.worst_analytic,
                  worst->report.worst_numeric, worst->report.max_rel_err, tolerance, seconds);
    out << line;
    return kExitVerify;
  }
  std::snprintf(line, sizeof(line), "PASS: max_rel_err %.3e < %.1e (%.2fs)\n",
                worst ? worst->report.max_rel_err : 0.0, tolerance, seconds);
  out << line;
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expert-gated attention labeler for medical dialogues", "esal"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  Command gen(app, "gen", "Generate a synthetic corpus",
              {"seed", "schema", "out", "train_dialogues", "dev_dialogues", "test_dialogues",
               "utterances_per_dialogue", "window_size", "labels_per_window", "noise"});
  Command train(
      app, "train", "Train a model",
      Concat({{"schema", "train", "dev", "checkpoint", "log", "resume"}, kModelKeys, kTrainKeys}));
  Command predict(app, "predict", "Label a corpus with a trained model",
                  {"checkpoint", "corpus", "output", "threshold", "schema", "deterministic"});
  Command score(app, "score", "Score predictions against a gold corpus",
                {"schema", "predictions", "gold", "format", "output"});
  Command inspect(app, "inspect", "Dump attention heat maps of one window",
                  {"checkpoint", "corpus", "dialogue_id", "window_index", "out", "schema"});
  Command gradcheck(app, "gradcheck", "Finite-difference gradient verification",
                    {"seed", "samples_per_tensor", "eps", "tolerance"});
  bool inject_sign_bug = false;
  gradcheck.app()->add_flag("--inject-sign-bug", inject_sign_bug)->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen.parsed()) return CmdGen(gen.Resolve(), out);
    if (train.parsed()) return CmdTrain(train.Resolve(), out);
    if (predict.parsed()) return CmdPredict(predict.Resolve(), out);
    if (score.parsed()) return CmdScore(score.Resolve(), out);
    if (inspect.parsed()) return CmdInspect(inspect.Resolve(), out);
    if (gradcheck.parsed()) return CmdGradcheck(gradcheck.Resolve(), inject_sign_bug, out);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataMismatchError& e) {
    err << "data mismatch: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const EvalError& e) {
    err << "data mismatch: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace esal::cli
