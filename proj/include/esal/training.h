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

// Training loop, loss and the bundle a trained model is saved as.

#ifndef ESAL_TRAINING_H_
#define ESAL_TRAINING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "esal/corpus.h"
#include "esal/metrics.h"
#include "esal/model.h"
#include "esal/ontology.h"
#include "esal/optimizer.h"
#include "esal/param_store.h"
#include "json.hpp"

namespace esal {

enum class OptimizerKind { kSgd, kAdam };

std::string_view OptimizerName(OptimizerKind kind);
OptimizerKind ParseOptimizer(std::string_view s);

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double learning_rate = 1e-2;
  AdamOptions adam;
  int batch_size = 16;
  int max_epochs = 200;
  int patience = 10;
  uint64_t seed = 0;
  double clip_norm = 5.0;
  std::vector<double> threshold_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  // Preprocessing.
  int max_seq_len = 256;
  int vocab_min_freq = 1;
  int vocab_max_size = 0;  // 0 = unbounded

  // Throws ConfigError. A zero learning rate is allowed (frozen run).
  void Validate() const;
  nlohmann::json ToJson() const;
};

// Mean binary cross-entropy over all entries of probabilities in (0,1);
// log arguments are clamped at 1e-12. Throws ContractError when a
// probability falls outside (0,1), a target is not 0/1, or sizes differ.
double BceLoss(std::span<const double> probabilities, std::span<const double> targets);

// A window ready for the model: token ids, context and target vector.
struct Example {
  WindowKey key;
  WindowInput input;
  std::vector<std::string> tokens;
  Tensor<float> target;  // [J,1]
};

std::vector<Example> BuildExamples(const std::vector<Dialogue>& corpus, const Vocab& vocab,
                                   const CandidateSpace& space, const ModelConfig& config,
                                   int max_seq_len);

// Everything needed to label new dialogues.
struct TrainedModel {
  Schema schema;
  Vocab vocab;
  ModelConfig config;
  int max_seq_len = 256;
  double threshold = 0.5;
  ParamStore<float> params;
  nlohmann::json train_state = nlohmann::json::object();  // best dev F1 etc.

  EsalModel<float> MakeModel() const;
};

// Manifest metadata: config, vocab (+hash), schema (+hash), threshold,
// max_seq_len, train_state.
void SaveTrainedModel(const std::string& path, const TrainedModel& model);
std::string EncodeTrainedModel(const TrainedModel& model);
// Throws DataMismatchError when a stored hash disagrees with the stored
// vocab or schema.
TrainedModel LoadTrainedModel(const std::string& path);

// Per-window candidate probabilities, batched so candidate encodings are
// shared. Output order follows `examples`.
std::vector<std::vector<double>> PredictProbabilities(const EsalModel<float>& model,
                                                      const ParamStore<float>& params,
                                                      const std::vector<Example>& examples);

std::vector<PredictionRecord> MakePredictions(const std::vector<Example>& examples,
                                              const std::vector<std::vector<double>>& probs,
                                              const CandidateSpace& space, double threshold);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0;
  double dev_loss = 0;
  double dev_f1_full = 0;
  double dev_f1_item = 0;
  double dev_f1_category = 0;
  double lr = 0;
  double seconds = 0;

  nlohmann::json ToJson() const;
};

struct TrainResult {
  TrainedModel model;
  std::vector<EpochRecord> log;
  int best_epoch = 0;  // 0 = the starting parameters were never beaten
  bool stopped_early = false;
};

struct TrainHooks {
  std::function<void(const EpochRecord&)> on_epoch;
  // Called with each improved model (for checkpointing during training).
  std::function<void(const TrainedModel&)> on_best;
};

// Trains from scratch, or continues from `resume` (its parameters and vocab;
// its dev score becomes the best to beat). Selection key per epoch: dev
// window-level Full-F1 at threshold 0.5, ties broken by lower dev loss.
// After training the threshold grid is swept on dev with the best params.
// Throws NumericError on a non-finite loss or gradient.
TrainResult Train(const Schema& schema, const std::vector<Dialogue>& train,
                  const std::vector<Dialogue>& dev, const ModelConfig& model_config,
                  const TrainConfig& config, const TrainHooks& hooks = {},
                  const TrainedModel* resume = nullptr);

}  // namespace esal

#endif  // ESAL_TRAINING_H_
