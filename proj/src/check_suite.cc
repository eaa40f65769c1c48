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

#include "esal/check_suite.h"

#include <random>

#include "esal/corpus.h"
#include "esal/layers.h"
#include "esal/ontology.h"
#include "esal/util.h"

namespace esal {

namespace {

class ToyRng {
 public:
  explicit ToyRng(uint64_t seed) : engine_(seed) {}
  double Uniform(double lo, double hi) { return lo + (hi - lo) * UnitFromBits(engine_()); }
  int Below(int n) { return std::min(n - 1, static_cast<int>(UnitFromBits(engine_()) * n)); }
  Tensor<double> Matrix(int rows, int cols) {
    Tensor<double> t({rows, cols});
    for (int64_t i = 0; i < t.size(); ++i) t[i] = Uniform(-1, 1);
    return t;
  }

 private:
  std::mt19937_64 engine_;
};

// Contracts an output with a fixed random tensor so every output entry
// receives a distinct upstream gradient.
Var<double> Probe(Var<double> out, uint64_t seed) {
  ToyRng rng(seed);
  Tensor<double> r = rng.Matrix(out.rows(), out.cols());
  return Sum(Mul(out, out.graph->Constant(std::move(r))));
}

Var<double> P(Graph<double>& g, const ParamStore<double>& s, const std::string& name) {
  return g.Param(name, s.Get(name));
}

}  // namespace

ToyModel MakeToyModel(const ModelConfig& config, uint64_t seed) {
  Schema schema({{"Alpha", {"red", "green"}}, {"Beta", {"blue"}}}, {"yes", "no", "maybe"});
  CandidateSpace space = BuildSpace(schema);
  Vocab vocab;
  for (const char* t : {"red", "green", "blue", "yes", "no", "maybe", "x", "y"}) vocab.Add(t);
  QueryTokens queries = EncodeQueries(space, vocab);
  EsalModel<double> model(config, space, std::move(queries), vocab.size());
  ParamStore<double> params = model.InitParams(seed);
  ToyRng rng(seed + 1);
  // Glorot-scaled weights are small; spread them so no unit saturates or
  // sits flat and every path carries gradient.
  for (auto& [name, t] : params.mutable_params()) {
    for (int64_t i = 0; i < t.size(); ++i) t[i] += rng.Uniform(-0.3, 0.3);
  }
  WindowInput input;
  for (int i = 0; i < 6; ++i) input.ids.push_back(rng.Below(vocab.size()));
  for (int k = 0; k < config.context_windows; ++k) {
    std::vector<int> ids;
    for (int i = 0; i < 5; ++i) ids.push_back(rng.Below(vocab.size()));
    input.context.push_back(std::move(ids));
  }
  Tensor<double> target({space.size(), 1});
  for (int64_t i = 0; i < target.size(); ++i) target[i] = rng.Below(3) == 0 ? 1.0 : 0.0;
  target[0] = 1.0;
  return {std::move(model), std::move(params), std::move(input), std::move(target)};
}

Var<double> ToyLoss(const ToyModel& toy, Graph<double>& g, const ParamStore<double>& params) {
  return BceWithLogits(toy.model.Forward(g, params, toy.input).logits, toy.target);
}

std::vector<NamedCheck> RunGradCheckSuite(const GradCheckOptions& options) {
  std::vector<NamedCheck> out;
  auto check = [&](const char* name, ParamStore<double>& store, const LossBuilder& loss) {
    out.push_back({name, GradCheck(store, loss, options)});
  };
  ToyRng rng(options.seed + 17);
  const std::vector<int> ids = {0, 3, 5, 1, 3, 2};

  {
    ParamStore<double> s;
    ParamInitializer init(options.seed);
    init.AddMatrix(s, "embedding", 6, 4);
    init.AddBiLstm(s, "enc", 4, 3);
    check("embedding+bilstm", s, [&](Graph<double>& g, const ParamStore<double>& st) {
      Var<double> x = EmbeddingForward(P(g, st, "embedding"), std::span<const int>(ids));
      return Probe(BiLstmForward(g, st, "enc", x), 1);
    });
  }
  {
    ParamStore<double> s;
    ParamInitializer init(options.seed);
    init.AddPool(s, "pool_layer", 6);
    s.Add("input", rng.Matrix(5, 6));
    s.Mutable("pool_layer.pool.b")[0] = 0.3;
    check("self_attn_pool", s, [](Graph<double>& g, const ParamStore<double>& st) {
      Attended<double> a = SelfAttnPool(g, st, "pool_layer", P(g, st, "input"));
      return Add(Probe(a.vectors, 2), Probe(a.weights, 3));
    });
  }
  {
    ParamStore<double> s;
    s.Add("h", rng.Matrix(6, 6));
    s.Add("queries", rng.Matrix(3, 6));
    check("attn_query", s, [](Graph<double>& g, const ParamStore<double>& st) {
      Attended<double> a = AttnQuery(P(g, st, "h"), P(g, st, "queries"));
      return Add(Probe(a.vectors, 4), Probe(a.weights, 5));
    });
  }
  {
    ParamStore<double> s;
    s.Add("w", rng.Matrix(6, 6));
    s.Add("q", rng.Matrix(4, 6));
    s.Add("k", rng.Matrix(3, 6));
    check("bilinear", s, [](Graph<double>& g, const ParamStore<double>& st) {
      return Probe(BilinearScore(P(g, st, "w"), P(g, st, "q"), P(g, st, "k")), 6);
    });
  }
  {
    ParamStore<double> s;
    ParamInitializer init(options.seed);
    init.AddFfn(s, "ffn", 5, 4, 2);
    s.Add("input", rng.Matrix(3, 5));
    check("ffn", s, [](Graph<double>& g, const ParamStore<double>& st) {
      return Probe(FfnForward(g, st, "ffn", P(g, st, "input")), 7);
    });
  }
  {
    ParamStore<double> s;
    s.Add("logits", rng.Matrix(4, 3));
    Tensor<double> y({4, 3});
    for (int64_t i = 0; i < y.size(); ++i) y[i] = i % 3 == 0 ? 1.0 : 0.0;
    check("bce_with_logits", s, [y](Graph<double>& g, const ParamStore<double>& st) {
      return BceWithLogits(P(g, st, "logits"), y);
    });
  }

  ModelConfig base;
  base.dims = {4, 3, 3, 4};
  {
    ModelConfig c = base;
    c.gate_mode = GateMode::kPerCategory;
    c.context_windows = 1;
    ToyModel toy = MakeToyModel(c, options.seed);
    check("model(per_category,K=1,scalar)", toy.params,
          [&toy](Graph<double>& g, const ParamStore<double>& st) { return ToyLoss(toy, g, st); });
  }
  {
    ModelConfig c = base;
    c.gate_mode = GateMode::kSingle;
    c.score_head = ScoreHead::kMaxPool;
    c.score_pool = 3;
    ToyModel toy = MakeToyModel(c, options.seed + 1);
    check("model(single,K=0,maxpool)", toy.params,
          [&toy](Graph<double>& g, const ParamStore<double>& st) { return ToyLoss(toy, g, st); });
  }
  return out;
}

}  // namespace esal
