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

#include "esal/model.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "esal/errors.h"
#include "esal/util.h"

namespace esal {

namespace {

constexpr char kEmbedding[] = "embedding";
constexpr char kStatusPrefix[] = "status";
constexpr char kMatch[] = "match.w";
constexpr char kOutput[] = "output";
constexpr double kEmbeddingInitBound = 1.0;

std::string GatePrefix(GateMode mode, const std::string& expert_prefix) {
  if (mode == GateMode::kSingle) return "gate";
  // "expert.symptom" -> "gate.symptom"
  return "gate" + expert_prefix.substr(expert_prefix.find('.'));
}

}  // namespace

void ModelConfig::Validate() const {
  dims.Validate();
  if (context_windows < 0) throw ConfigError("context_windows must be >= 0");
  if (score_pool < 1) throw ConfigError("score_pool must be >= 1");
}

std::string_view GateModeName(GateMode mode) {
  return mode == GateMode::kSingle ? "single" : "per_category";
}

std::string_view ScoreHeadName(ScoreHead head) {
  return head == ScoreHead::kScalar ? "scalar" : "maxpool";
}

GateMode ParseGateMode(std::string_view s) {
  if (s == "single") return GateMode::kSingle;
  if (s == "per_category") return GateMode::kPerCategory;
  throw ConfigError("gate_mode must be single or per_category, got '" + std::string(s) + "'");
}

ScoreHead ParseScoreHead(std::string_view s) {
  if (s == "scalar") return ScoreHead::kScalar;
  if (s == "maxpool") return ScoreHead::kMaxPool;
  throw ConfigError("score_head must be scalar or maxpool, got '" + std::string(s) + "'");
}

nlohmann::json ModelConfig::ToJson() const {
  return {{"embed_dim", dims.embed_dim},
          {"lstm_hidden", dims.lstm_hidden},
          {"gate_hidden", dims.gate_hidden},
          {"ffn_hidden", dims.ffn_hidden},
          {"gate_mode", GateModeName(gate_mode)},
          {"context_windows", context_windows},
          {"score_head", ScoreHeadName(score_head)},
          {"score_pool", score_pool}};
}

ModelConfig ModelConfig::FromJson(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.dims.embed_dim = j.at("embed_dim").get<int>();
    c.dims.lstm_hidden = j.at("lstm_hidden").get<int>();
    c.dims.gate_hidden = j.at("gate_hidden").get<int>();
    c.dims.ffn_hidden = j.at("ffn_hidden").get<int>();
    c.gate_mode = ParseGateMode(j.at("gate_mode").get<std::string>());
    c.context_windows = j.at("context_windows").get<int>();
    c.score_head = ParseScoreHead(j.at("score_head").get<std::string>());
    c.score_pool = j.at("score_pool").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  c.Validate();
  return c;
}

QueryTokens EncodeQueries(const CandidateSpace& space, const Vocab& vocab) {
  const Schema& schema = space.schema();
  QueryTokens q;
  for (int p = 0; p < space.num_pairs(); ++p) {
    const CandidatePair& pair = space.PairAt(p);
    const std::string& name = schema.categories()[pair.category].items[pair.item];
    TokenSeq seq = EncodeText(name, vocab);
    if (seq.ids.empty()) throw ContractError("item name '" + name + "' has no tokens");
    q.pairs.push_back(std::move(seq.ids));
  }
  for (const auto& status : schema.statuses()) {
    TokenSeq seq = EncodeText(status, vocab);
    if (seq.ids.empty()) throw ContractError("status name '" + status + "' has no tokens");
    q.statuses.push_back(std::move(seq.ids));
  }
  return q;
}

void AddQueryTokens(const Schema& schema, Vocab& vocab) {
  for (const auto& c : schema.categories())
    for (const auto& item : c.items)
      for (const auto& t : Tokenize(item)) vocab.Add(t);
  for (const auto& s : schema.statuses())
    for (const auto& t : Tokenize(s)) vocab.Add(t);
}

template <typename T>
EsalModel<T>::EsalModel(ModelConfig config, CandidateSpace space, QueryTokens queries,
                        int vocab_size)
    : config_(std::move(config)),
      space_(std::move(space)),
      queries_(std::move(queries)),
      vocab_size_(vocab_size) {
  config_.Validate();
  if (static_cast<int>(queries_.pairs.size()) != space_.num_pairs() ||
      static_cast<int>(queries_.statuses.size()) != space_.num_statuses()) {
    throw ContractError("query tokens do not match the candidate space");
  }
  std::set<std::string> used;
  for (int c = 0; c < space_.schema().num_categories(); ++c) {
    std::string slug = Slugify(space_.schema().categories()[c].name);
    if (slug.empty() || used.count(slug)) slug += "_" + std::to_string(c);
    used.insert(slug);
    expert_prefixes_.push_back("expert." + slug);
  }
  for (int i = 0; i < space_.size(); ++i) {
    pair_of_candidate_.push_back(space_.PairOfCandidate(i));
    status_of_candidate_.push_back(space_.StatusOfCandidate(i));
  }
}

template <typename T>
ParamStore<T> EsalModel<T>::InitParams(uint64_t seed) const {
  const LayerDims& d = config_.dims;
  const int h2 = 2 * d.lstm_hidden;
  const int experts = num_experts();
  ParamStore<T> store;
  ParamInitializer init(seed);
  // Glorot over a [V, d] table shrinks with V; unit-scale rows keep
  // attention logits informative from the first step.
  init.AddUniform(store, kEmbedding, vocab_size_, d.embed_dim, kEmbeddingInitBound);
  for (int c = 0; c < experts; ++c) {
    init.AddBiLstm(store, expert_prefixes_[c], d.embed_dim, d.lstm_hidden);
    init.AddPool(store, expert_prefixes_[c], h2);
  }
  init.AddBiLstm(store, kStatusPrefix, d.embed_dim, d.lstm_hidden);
  init.AddPool(store, kStatusPrefix, h2);
  if (config_.gate_mode == GateMode::kSingle) {
    init.AddFfn(store, "gate", experts * h2, d.gate_hidden, experts);
  } else {
    for (int c = 0; c < experts; ++c) {
      init.AddFfn(store, GatePrefix(GateMode::kPerCategory, expert_prefixes_[c]), experts * h2,
                  d.gate_hidden, experts);
    }
  }
  init.AddMatrix(store, kMatch, h2, h2);
  const int out = config_.score_head == ScoreHead::kScalar ? 1 : config_.score_pool;
  init.AddFfn(store, kOutput, 2 * h2, d.ffn_hidden, out);
  return store;
}

template <typename T>
Var<T> EsalModel<T>::Embed(Graph<T>& g, const ParamStore<T>& store,
                           std::span<const int> ids) const {
  return EmbeddingForward(g.Param(kEmbedding, store.Get(kEmbedding)), ids);
}

template <typename T>
ExpertOutputs<T> EsalModel<T>::EncodeDialogueWindow(Graph<T>& g, const ParamStore<T>& store,
                                                    std::span<const int> ids) const {
  Var<T> embedded = Embed(g, store, ids);
  ExpertOutputs<T> out;
  for (int c = 0; c < num_experts(); ++c) {
    out.category.push_back(BiLstmForward(g, store, expert_prefixes_[c], embedded));
  }
  out.status = BiLstmForward(g, store, kStatusPrefix, embedded);
  return out;
}

template <typename T>
Var<T> EsalModel<T>::EncodeStatus(Graph<T>& g, const ParamStore<T>& store,
                                  std::span<const int> ids) const {
  return BiLstmForward(g, store, kStatusPrefix, Embed(g, store, ids));
}

template <typename T>
CandidateEncodings<T> EsalModel<T>::EncodeCandidates(Graph<T>& g,
                                                     const ParamStore<T>& store) const {
  CandidateEncodings<T> out;
  std::vector<Var<T>> pair_vectors;
  for (int p = 0; p < space_.num_pairs(); ++p) {
    const std::string& prefix = expert_prefixes_[space_.PairAt(p).category];
    Var<T> u = BiLstmForward(g, store, prefix, Embed(g, store, queries_.pairs[p]));
    Attended<T> pooled = SelfAttnPool(g, store, prefix, u);
    pair_vectors.push_back(pooled.vectors);
    out.pair_pool_weights.push_back(pooled.weights);
  }
  std::vector<Var<T>> status_vectors;
  for (int s = 0; s < space_.num_statuses(); ++s) {
    Var<T> u = BiLstmForward(g, store, kStatusPrefix, Embed(g, store, queries_.statuses[s]));
    Attended<T> pooled = SelfAttnPool(g, store, kStatusPrefix, u);
    status_vectors.push_back(pooled.vectors);
    out.status_pool_weights.push_back(pooled.weights);
  }
  out.pairs = Concat(pair_vectors, 0);
  out.statuses = Concat(status_vectors, 0);
  return out;
}

template <typename T>
GateOutput<T> EsalModel<T>::ApplyGate(Graph<T>& g, const ParamStore<T>& store,
                                      const ExpertOutputs<T>& experts) const {
  const int n_exp = num_experts();
  if (static_cast<int>(experts.category.size()) != n_exp) {
    throw ContractError("expert count does not match the number of categories");
  }
  std::vector<Var<T>> pooled;
  for (const auto& h : experts.category) pooled.push_back(MeanAxis(h, 0));
  Var<T> gate_input = Concat(pooled, 1);

  auto mix = [&](Var<T> weights) {
    Var<T> acc = MulScalar(experts.category[0], Slice(weights, 1, 0, 1));
    for (int e = 1; e < n_exp; ++e) {
      acc = Add(acc, MulScalar(experts.category[e], Slice(weights, 1, e, e + 1)));
    }
    return acc;
  };

  GateOutput<T> out;
  if (config_.gate_mode == GateMode::kSingle) {
    Var<T> w = SoftmaxRows(FfnForward(g, store, "gate", gate_input));
    out.weights.push_back(w);
    Var<T> mixed = mix(w);
    out.mixed.assign(n_exp, mixed);
  } else {
    for (int c = 0; c < n_exp; ++c) {
      Var<T> w = SoftmaxRows(FfnForward(
          g, store, GatePrefix(GateMode::kPerCategory, expert_prefixes_[c]), gate_input));
      out.weights.push_back(w);
      out.mixed.push_back(mix(w));
    }
  }
  return out;
}

template <typename T>
Evidence<T> EsalModel<T>::LabelAttention(const GateOutput<T>& gate, Var<T> status_repr,
                                         const CandidateEncodings<T>& candidates) const {
  Evidence<T> out;
  std::vector<Var<T>> per_category;
  for (int c = 0; c < num_experts(); ++c) {
    const int begin = space_.PairOffset(c);
    const int end = begin + static_cast<int>(space_.schema().categories()[c].items.size());
    Attended<T> att = AttnQuery(gate.mixed[c], Slice(candidates.pairs, 0, begin, end));
    per_category.push_back(att.vectors);
    out.pair_attention.push_back(att.weights);
  }
  out.pairs = Concat(per_category, 0);
  Attended<T> status = AttnQuery(status_repr, candidates.statuses);
  out.statuses = status.vectors;
  out.status_attention = status.weights;
  return out;
}

template <typename T>
MatchOutput<T> EsalModel<T>::MatchAndFeature(Graph<T>& g, const ParamStore<T>& store,
                                             Var<T> pair_evidence,
                                             const std::vector<Var<T>>& context_status) const {
  if (context_status.empty()) throw ContractError("match needs at least the current window");
  Var<T> w = g.Param(kMatch, store.Get(kMatch));
  // Row i of projected is Q_C[p(i)] W, so score(i, w) = <row, Q_S@w[s(i)]>.
  Var<T> projected = GatherRows(MatMul(pair_evidence, w), std::span<const int>(pair_of_candidate_));
  std::vector<Var<T>> scores;
  std::vector<Var<T>> status_rows;
  for (Var<T> qs : context_status) {
    Var<T> rows = GatherRows(qs, std::span<const int>(status_of_candidate_));
    status_rows.push_back(rows);
    scores.push_back(SumAxis(Mul(projected, rows), 1));
  }
  MatchOutput<T> out;
  out.weights = SoftmaxRows(Concat(scores, 1));
  const int contexts = static_cast<int>(context_status.size());
  Var<T> matched = ScaleRows(status_rows[0], Slice(out.weights, 1, 0, 1));
  for (int k = 1; k < contexts; ++k) {
    matched = Add(matched, ScaleRows(status_rows[k], Slice(out.weights, 1, k, k + 1)));
  }
  out.matched_status = matched;
  Var<T> pair_rows = GatherRows(pair_evidence, std::span<const int>(pair_of_candidate_));
  out.features = Concat<T>({pair_rows, matched}, 1);
  return out;
}

template <typename T>
Var<T> EsalModel<T>::Score(Graph<T>& g, const ParamStore<T>& store, Var<T> features) const {
  Var<T> out = FfnForward(g, store, kOutput, features);
  if (config_.score_head == ScoreHead::kMaxPool) out = MaxReduce(out, 1);
  return out;
}

template <typename T>
WindowForward<T> EsalModel<T>::Forward(Graph<T>& g, const ParamStore<T>& store,
                                       const WindowInput& input) const {
  return Forward(g, store, input, EncodeCandidates(g, store));
}

template <typename T>
WindowForward<T> EsalModel<T>::Forward(Graph<T>& g, const ParamStore<T>& store,
                                       const WindowInput& input,
                                       const CandidateEncodings<T>& candidates) const {
  if (input.ids.empty()) throw ContractError("empty window token sequence");
  WindowForward<T> fw;
  fw.experts = EncodeDialogueWindow(g, store, input.ids);
  fw.candidates = candidates;
  fw.gate = ApplyGate(g, store, fw.experts);
  fw.evidence = LabelAttention(fw.gate, fw.experts.status, fw.candidates);

  const size_t k = std::min<size_t>(input.context.size(), config_.context_windows);
  for (size_t i = input.context.size() - k; i < input.context.size(); ++i) {
    Var<T> h_s = EncodeStatus(g, store, input.context[i]);
    fw.context_status_evidence.push_back(AttnQuery(h_s, fw.candidates.statuses).vectors);
  }
  fw.context_status_evidence.push_back(fw.evidence.statuses);

  fw.match = MatchAndFeature(g, store, fw.evidence.pairs, fw.context_status_evidence);
  fw.logits = Score(g, store, fw.match.features);
  fw.probabilities = Sigmoid(fw.logits);
  return fw;
}

std::vector<int> Predict(std::span<const double> probabilities, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ContractError("threshold must lie in (0,1)");
  std::vector<int> out;
  for (size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] >= threshold) out.push_back(static_cast<int>(i));
  }
  return out;
}

template <typename T>
std::vector<double> Probabilities(const WindowForward<T>& fw) {
  const double lo = std::nextafter(0.0, 1.0);
  const double hi = std::nextafter(1.0, 0.0);
  std::vector<double> out;
  for (T p : fw.probabilities.value().values()) out.push_back(std::clamp<double>(p, lo, hi));
  return out;
}

template class EsalModel<float>;
template class EsalModel<double>;
template std::vector<double> Probabilities(const WindowForward<float>&);
template std::vector<double> Probabilities(const WindowForward<double>&);

}  // namespace esal
