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

// Expert-gated self-attention labeler.
//
// Per window:
//   1. Embed the window tokens; run one BiLSTM per category ("expert") and a
//      status BiLSTM over the same embeddings.
//   2. Encode every candidate query: the item name through its category's
//      expert, each status name through the status BiLSTM, then
//      self-attention pooling to one vector per pair / status.
//   3. A domain gate mixes the expert outputs (one mixture for all
//      categories, or one per category).
//   4. Each pair encoding attends over its category's mixed representation,
//      each status encoding over the status representation (evidence).
//   5. Category evidence is matched bilinearly against status evidence of the
//      current and up to K previous windows; the softmax-weighted status
//      evidence is concatenated with the category evidence.
//   6. A shared feed-forward head scores every (pair, status) candidate;
//      probabilities are independent sigmoids.

#ifndef ESAL_MODEL_H_
#define ESAL_MODEL_H_

#include <span>
#include <string>
#include <vector>

#include "esal/corpus.h"
#include "esal/graph.h"
#include "esal/layers.h"
#include "esal/ontology.h"
#include "esal/param_store.h"
#include "json.hpp"

namespace esal {

enum class GateMode { kSingle, kPerCategory };
enum class ScoreHead { kScalar, kMaxPool };

struct ModelConfig {
  LayerDims dims;
  GateMode gate_mode = GateMode::kPerCategory;
  int context_windows = 0;  // K
  ScoreHead score_head = ScoreHead::kScalar;
  int score_pool = 4;  // output width pooled by the maxpool head

  void Validate() const;
  nlohmann::json ToJson() const;
  static ModelConfig FromJson(const nlohmann::json& j);
  bool operator==(const ModelConfig&) const = default;
};

std::string_view GateModeName(GateMode mode);
std::string_view ScoreHeadName(ScoreHead head);
GateMode ParseGateMode(std::string_view s);
ScoreHead ParseScoreHead(std::string_view s);

// Token ids of every candidate query text.
struct QueryTokens {
  std::vector<std::vector<int>> pairs;     // item name per pair
  std::vector<std::vector<int>> statuses;  // status name per status
};

// Throws ContractError when a query text tokenizes to nothing.
QueryTokens EncodeQueries(const CandidateSpace& space, const Vocab& vocab);

// Adds every schema query token to the vocabulary so candidate names never
// collapse to [UNK].
void AddQueryTokens(const Schema& schema, Vocab& vocab);

template <typename T>
struct ExpertOutputs {
  std::vector<Var<T>> category;  // per category, [n,2h]
  Var<T> status;                 // [n,2h]
};

template <typename T>
struct CandidateEncodings {
  Var<T> pairs;                             // [P,2h]
  Var<T> statuses;                          // [S,2h]
  std::vector<Var<T>> pair_pool_weights;    // per pair, [1,len]
  std::vector<Var<T>> status_pool_weights;  // per status, [1,len]
};

template <typename T>
struct GateOutput {
  std::vector<Var<T>> weights;  // one [1,E] distribution per gate head
  std::vector<Var<T>> mixed;    // per category, [n,2h]
};

template <typename T>
struct Evidence {
  Var<T> pairs;                        // Q_C, [P,2h]
  Var<T> statuses;                     // Q_S, [S,2h]
  std::vector<Var<T>> pair_attention;  // per category, [P_c,n]
  Var<T> status_attention;             // [S,n]
};

template <typename T>
struct MatchOutput {
  Var<T> weights;         // [J,W] over context windows (current last)
  Var<T> matched_status;  // [J,2h]
  Var<T> features;        // [J,4h]
};

template <typename T>
struct WindowForward {
  ExpertOutputs<T> experts;
  CandidateEncodings<T> candidates;
  GateOutput<T> gate;
  Evidence<T> evidence;                         // current window
  std::vector<Var<T>> context_status_evidence;  // Q_S per context window, current last
  MatchOutput<T> match;
  Var<T> logits;         // [J,1]
  Var<T> probabilities;  // [J,1]
};

// Token ids of the window to label plus up to K preceding windows of the
// same dialogue (oldest first).
struct WindowInput {
  std::vector<int> ids;
  std::vector<std::vector<int>> context;
};

template <typename T>
class EsalModel {
 public:
  EsalModel(ModelConfig config, CandidateSpace space, QueryTokens queries, int vocab_size);

  const ModelConfig& config() const { return config_; }
  const CandidateSpace& space() const { return space_; }
  int vocab_size() const { return vocab_size_; }
  int num_experts() const { return space_.schema().num_categories(); }

  // Parameter name prefix of a category expert, e.g. "expert.symptom".
  const std::string& ExpertPrefix(int category) const { return expert_prefixes_.at(category); }

  ParamStore<T> InitParams(uint64_t seed) const;

  ExpertOutputs<T> EncodeDialogueWindow(Graph<T>& g, const ParamStore<T>& store,
                                        std::span<const int> ids) const;
  // Status BiLSTM alone; all the context windows need.
  Var<T> EncodeStatus(Graph<T>& g, const ParamStore<T>& store, std::span<const int> ids) const;
  CandidateEncodings<T> EncodeCandidates(Graph<T>& g, const ParamStore<T>& store) const;
  GateOutput<T> ApplyGate(Graph<T>& g, const ParamStore<T>& store,
                          const ExpertOutputs<T>& experts) const;
  Evidence<T> LabelAttention(const GateOutput<T>& gate, Var<T> status_repr,
                             const CandidateEncodings<T>& candidates) const;
  // context_status: Q_S for each context window, current window last.
  MatchOutput<T> MatchAndFeature(Graph<T>& g, const ParamStore<T>& store, Var<T> pair_evidence,
                                 const std::vector<Var<T>>& context_status) const;
  // Returns logits [J,1].
  Var<T> Score(Graph<T>& g, const ParamStore<T>& store, Var<T> features) const;

  WindowForward<T> Forward(Graph<T>& g, const ParamStore<T>& store, const WindowInput& input) const;
  // Same, reusing candidate encodings already built in g (they depend on the
  // parameters only, so a batch can share one copy).
  WindowForward<T> Forward(Graph<T>& g, const ParamStore<T>& store, const WindowInput& input,
                           const CandidateEncodings<T>& candidates) const;

 private:
  Var<T> Embed(Graph<T>& g, const ParamStore<T>& store, std::span<const int> ids) const;

  ModelConfig config_;
  CandidateSpace space_;
  QueryTokens queries_;
  int vocab_size_;
  std::vector<std::string> expert_prefixes_;
  std::vector<int> pair_of_candidate_;
  std::vector<int> status_of_candidate_;
};

// Candidate indices with probability >= threshold (inclusive).
std::vector<int> Predict(std::span<const double> probabilities, double threshold);

// Probabilities of a forward pass as doubles, clamped into the open
// interval (0,1).
template <typename T>
std::vector<double> Probabilities(const WindowForward<T>& fw);

}  // namespace esal

#endif  // ESAL_MODEL_H_
