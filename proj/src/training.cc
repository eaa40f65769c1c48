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

#include "esal/training.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "esal/checkpoint.h"
#include "esal/errors.h"
#include "esal/util.h"

namespace esal {

namespace {

constexpr int kEvalChunk = 16;
constexpr double kLogFloor = 1e-12;

struct DevScore {
  double f1_full = 0;
  double f1_item = 0;
  double f1_category = 0;
  double loss = 0;
};

WindowSets GoldOf(const std::vector<Example>& examples, const CandidateSpace& space) {
  WindowSets out;
  for (const Example& ex : examples) {
    auto& labels = out[ex.key];
    for (int64_t j = 0; j < ex.target.size(); ++j) {
      if (ex.target[j] > 0.5f) labels.push_back(space.TripleOf(static_cast<int>(j)));
    }
  }
  return out;
}

ScopeScores WindowScores(const std::vector<Example>& examples,
                         const std::vector<std::vector<double>>& probs, const CandidateSpace& space,
                         double threshold) {
  return EvalWindows(PredictionSets(MakePredictions(examples, probs, space, threshold)),
                     GoldOf(examples, space));
}

DevScore ScoreDev(const EsalModel<float>& model, const ParamStore<float>& params,
                  const std::vector<Example>& dev, const std::string& when) {
  const auto probs = PredictProbabilities(model, params, dev);
  for (const auto& window : probs) {
    for (double p : window) {
      if (!std::isfinite(p)) throw NumericError("non-finite dev probability " + when);
    }
  }
  const ScopeScores s = WindowScores(dev, probs, model.space(), 0.5);
  DevScore out;
  out.f1_full = s.at(Granularity::kFull).F1();
  out.f1_item = s.at(Granularity::kItem).F1();
  out.f1_category = s.at(Granularity::kCategory).F1();
  double total = 0;
  for (size_t i = 0; i < dev.size(); ++i) {
    std::vector<double> target(dev[i].target.values().begin(), dev[i].target.values().end());
    total += BceLoss(probs[i], target);
  }
  out.loss = dev.empty() ? 0 : total / dev.size();
  return out;
}

bool Better(const DevScore& a, const DevScore& b) {
  if (a.f1_full != b.f1_full) return a.f1_full > b.f1_full;
  return a.loss < b.loss;
}

std::vector<int> ShuffledOrder(int n, uint64_t seed, int epoch) {
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(epoch)));
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = std::min(i, static_cast<int>(UnitFromBits(rng()) * (i + 1)));
    std::swap(order[i], order[j]);
  }
  return order;
}

}  // namespace

std::string_view OptimizerName(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind ParseOptimizer(std::string_view s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  throw ConfigError("optimizer must be sgd or adam, got '" + std::string(s) + "'");
}

void TrainConfig::Validate() const {
  if (!(learning_rate >= 0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be finite and >= 0");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_epochs < 0) throw ConfigError("max_epochs must be >= 0");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (!(clip_norm > 0)) throw ConfigError("clip_norm must be > 0");
  if (threshold_grid.empty()) throw ConfigError("threshold_grid must not be empty");
  for (double t : threshold_grid) {
    if (!(t > 0 && t < 1)) throw ConfigError("thresholds must lie in (0,1)");
  }
  if (max_seq_len < 3) throw ConfigError("max_seq_len must be >= 3");
  if (vocab_min_freq < 1) throw ConfigError("vocab_min_freq must be >= 1");
  if (!(adam.beta1 >= 0 && adam.beta1 < 1 && adam.beta2 >= 0 && adam.beta2 < 1 && adam.eps > 0)) {
    throw ConfigError("adam betas must lie in [0,1) and eps must be > 0");
  }
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"optimizer", OptimizerName(optimizer)},
          {"learning_rate", learning_rate},
          {"batch_size", batch_size},
          {"max_epochs", max_epochs},
          {"patience", patience},
          {"seed", seed},
          {"clip_norm", clip_norm},
          {"threshold_grid", threshold_grid},
          {"max_seq_len", max_seq_len},
          {"vocab_min_freq", vocab_min_freq},
          {"vocab_max_size", vocab_max_size}};
}

double BceLoss(std::span<const double> probabilities, std::span<const double> targets) {
  if (probabilities.size() != targets.size()) {
    throw ContractError("BceLoss: " + std::to_string(probabilities.size()) + " probabilities vs " +
                        std::to_string(targets.size()) + " targets");
  }
  if (probabilities.empty()) return 0;
  double total = 0;
  for (size_t i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    const double y = targets[i];
    if (!(p > 0 && p < 1)) {
      throw ContractError("BceLoss: probability " + std::to_string(p) + " outside (0,1)");
    }
    if (y != 0 && y != 1) throw ContractError("BceLoss: target must be 0 or 1");
    total -= y * std::log(std::max(p, kLogFloor)) + (1 - y) * std::log(std::max(1 - p, kLogFloor));
  }
  return total / static_cast<double>(probabilities.size());
}

std::vector<Example> BuildExamples(const std::vector<Dialogue>& corpus, const Vocab& vocab,
                                   const CandidateSpace& space, const ModelConfig& config,
                                   int max_seq_len) {
  std::vector<Example> out;
  for (const Dialogue& d : corpus) {
    std::vector<std::vector<int>> previous;
    for (const Window& w : d.windows) {
      TokenSeq seq = EncodeWindow(w, d, vocab, max_seq_len);
      Example ex;
      ex.key = {d.id, w.window_index};
      ex.input.ids = seq.ids;
      const size_t k = std::min<size_t>(previous.size(), config.context_windows);
      ex.input.context.assign(previous.end() - k, previous.end());
      ex.tokens = std::move(seq.tokens);
      ex.target = Tensor<float>({space.size(), 1});
      for (const Candidate& c : w.gold) ex.target[space.IndexOf(c)] = 1.0f;
      previous.push_back(std::move(seq.ids));
      out.push_back(std::move(ex));
    }
  }
  return out;
}

EsalModel<float> TrainedModel::MakeModel() const {
  CandidateSpace space = BuildSpace(schema);
  QueryTokens queries = EncodeQueries(space, vocab);
  return EsalModel<float>(config, std::move(space), std::move(queries), vocab.size());
}

std::string EncodeTrainedModel(const TrainedModel& model) {
  nlohmann::json meta = {{"config", model.config.ToJson()},    {"vocab", model.vocab.tokens()},
                         {"vocab_hash", model.vocab.Hash()},   {"schema", model.schema.ToJson()},
                         {"schema_hash", model.schema.Hash()}, {"threshold", model.threshold},
                         {"max_seq_len", model.max_seq_len},   {"train_state", model.train_state}};
  return EncodeCheckpoint(model.params, meta);
}

void SaveTrainedModel(const std::string& path, const TrainedModel& model) {
  WriteFile(path, EncodeTrainedModel(model));
}

TrainedModel LoadTrainedModel(const std::string& path) {
  nlohmann::json manifest;
  ParamStore<float> params = LoadCheckpoint<float>(path, &manifest);
  try {
    Schema schema = Schema::FromJson(manifest.at("schema"));
    Vocab vocab(manifest.at("vocab").get<std::vector<std::string>>());
    if (schema.Hash() != manifest.at("schema_hash").get<std::string>()) {
      throw DataMismatchError("checkpoint schema does not match its schema hash");
    }
    if (vocab.Hash() != manifest.at("vocab_hash").get<std::string>()) {
      throw DataMismatchError("checkpoint vocab does not match its vocab hash");
    }
    TrainedModel model{std::move(schema),
                       std::move(vocab),
                       ModelConfig::FromJson(manifest.at("config")),
                       manifest.at("max_seq_len").get<int>(),
                       manifest.at("threshold").get<double>(),
                       std::move(params),
                       manifest.value("train_state", nlohmann::json::object())};
    const ParamStore<float> expected = model.MakeModel().InitParams(0);
    for (const auto& [name, t] : expected.params()) {
      if (!model.params.Has(name) || model.params.Get(name).shape() != t.shape()) {
        throw DataMismatchError("checkpoint lacks parameter '" + name + "' of shape " +
                                ShapeString(t.shape()));
      }
    }
    if (model.params.params().size() != expected.params().size()) {
      throw DataMismatchError("checkpoint holds parameters the model does not use");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataMismatchError(std::string("malformed checkpoint manifest: ") + e.what());
  }
}

std::vector<std::vector<double>> PredictProbabilities(const EsalModel<float>& model,
                                                      const ParamStore<float>& params,
                                                      const std::vector<Example>& examples) {
  std::vector<std::vector<double>> out;
  out.reserve(examples.size());
  for (size_t begin = 0; begin < examples.size(); begin += kEvalChunk) {
    const size_t end = std::min(examples.size(), begin + kEvalChunk);
    Graph<float> g;
    const CandidateEncodings<float> candidates = model.EncodeCandidates(g, params);
    for (size_t i = begin; i < end; ++i) {
      out.push_back(Probabilities(model.Forward(g, params, examples[i].input, candidates)));
    }
  }
  return out;
}

std::vector<PredictionRecord> MakePredictions(const std::vector<Example>& examples,
                                              const std::vector<std::vector<double>>& probs,
                                              const CandidateSpace& space, double threshold) {
  std::vector<PredictionRecord> out;
  for (size_t i = 0; i < examples.size(); ++i) {
    PredictionRecord r{examples[i].key.first, examples[i].key.second, {}};
    for (int j : Predict(probs[i], threshold))
      r.predictions.push_back({space.TripleOf(j), probs[i][j]});
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json EpochRecord::ToJson() const {
  return {{"epoch", epoch},
          {"train_loss", train_loss},
          {"dev_loss", dev_loss},
          {"dev_f1_full", dev_f1_full},
          {"dev_f1_item", dev_f1_item},
          {"dev_f1_category", dev_f1_category},
          {"lr", lr},
          {"seconds", seconds}};
}

TrainResult Train(const Schema& schema, const std::vector<Dialogue>& train,
                  const std::vector<Dialogue>& dev, const ModelConfig& model_config,
                  const TrainConfig& config, const TrainHooks& hooks, const TrainedModel* resume) {
  config.Validate();
  if (dev.empty()) throw ConfigError("training needs a non-empty dev split");
  if (resume && resume->schema.Hash() != schema.Hash()) {
    throw DataMismatchError("resume checkpoint was trained on a different schema");
  }

  Vocab vocab;
  if (resume) {
    vocab = resume->vocab;
  } else {
    vocab = BuildVocab(train, config.vocab_min_freq, config.vocab_max_size);
    AddQueryTokens(schema, vocab);
  }
  TrainResult result{TrainedModel{schema,
                                  vocab,
                                  resume ? resume->config : model_config,
                                  config.max_seq_len,
                                  0.5,
                                  {},
                                  nlohmann::json::object()},
                     {},
                     0,
                     false};
  TrainedModel& best = result.model;
  const EsalModel<float> model = best.MakeModel();
  const CandidateSpace& space = model.space();
  ParamStore<float> params = resume ? resume->params : model.InitParams(config.seed);

  const auto train_ex = BuildExamples(train, vocab, space, best.config, config.max_seq_len);
  const auto dev_ex = BuildExamples(dev, vocab, space, best.config, config.max_seq_len);

  int first_epoch = 1;
  DevScore best_score{-1, -1, -1, std::numeric_limits<double>::infinity()};
  if (resume) {
    first_epoch = resume->train_state.value("epoch", 0) + 1;
    best_score = ScoreDev(model, params, dev_ex, "with the resumed parameters");
    result.best_epoch = resume->train_state.value("best_epoch", 0);
  }
  best.params = params;

  AdamState<float> adam;
  int stale = 0;
  for (int epoch = first_epoch; epoch < first_epoch + config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<int> order =
        ShuffledOrder(static_cast<int>(train_ex.size()), config.seed, epoch);
    double loss_sum = 0;
    int batch_index = 0;
    for (size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batch_index) {
      const size_t end = std::min(order.size(), begin + config.batch_size);
      const float inv = 1.0f / static_cast<float>(end - begin);
      Graph<float> g;
      const CandidateEncodings<float> candidates = model.EncodeCandidates(g, params);
      Var<float> total;
      for (size_t i = begin; i < end; ++i) {
        const Example& ex = train_ex[order[i]];
        const WindowForward<float> fw = model.Forward(g, params, ex.input, candidates);
        Var<float> l = BceWithLogits(fw.logits, ex.target);
        total = i == begin ? l : Add(total, l);
      }
      Var<float> loss = Scale(total, inv);
      g.Backward(loss);
      GradMap<float> grads = g.ParamGrads();
      const double loss_value = loss.value()[0];
      const double max_grad = MaxAbsGrad(grads);
      if (!std::isfinite(loss_value) || !std::isfinite(max_grad)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + " (loss " + std::to_string(loss_value) +
                           ", max|grad| " + std::to_string(max_grad) + ")");
      }
      loss_sum += loss_value * static_cast<double>(end - begin);
      ClipByGlobalNorm(grads, config.clip_norm);
      if (config.optimizer == OptimizerKind::kAdam) {
        AdamStep(params, grads, adam, config.learning_rate, config.adam);
      } else {
        SgdStep(params, grads, config.learning_rate);
      }
    }

    const DevScore score = ScoreDev(model, params, dev_ex, "after epoch " + std::to_string(epoch));
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = train_ex.empty() ? 0 : loss_sum / static_cast<double>(train_ex.size());
    rec.dev_loss = score.loss;
    rec.dev_f1_full = score.f1_full;
    rec.dev_f1_item = score.f1_item;
    rec.dev_f1_category = score.f1_category;
    rec.lr = config.learning_rate;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(rec);
    if (hooks.on_epoch) hooks.on_epoch(rec);

    best.train_state["epoch"] = epoch;
    if (Better(score, best_score)) {
      best_score = score;
      best.params = params;
      result.best_epoch = epoch;
      stale = 0;
      if (hooks.on_best) hooks.on_best(best);
    } else if (++stale >= config.patience) {
      result.stopped_early = true;
      break;
    }
  }

  const auto probs = PredictProbabilities(model, best.params, dev_ex);
  double best_f1 = -1;
  for (double t : config.threshold_grid) {
    const double f1 = WindowScores(dev_ex, probs, space, t).at(Granularity::kFull).F1();
    if (f1 > best_f1) {
      best_f1 = f1;
      best.threshold = t;
    }
  }
  best.train_state["best_epoch"] = result.best_epoch;
  best.train_state["best_dev_f1_full"] = best_score.f1_full;
  best.train_state["best_dev_loss"] = best_score.loss;
  best.train_state["threshold_dev_f1_full"] = best_f1;
  return result;
}

}  // namespace esal
