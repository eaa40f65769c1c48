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

#include <cmath>

#include "esal/check_suite.h"
#include "esal/errors.h"
#include "gtest/gtest.h"

namespace esal {
namespace {

ModelConfig SmallConfig() {
  ModelConfig c;
  c.dims = {6, 4, 5, 7};
  return c;
}

struct Built {
  Vocab vocab;
  EsalModel<double> model;
};

Built Build(const Schema& schema, const ModelConfig& config) {
  Vocab vocab;
  for (const char* t : {"[doc]", "[pat]", "yes", "no", "a", "the", "cough", "fever", "rash"}) {
    vocab.Add(t);
  }
  AddQueryTokens(schema, vocab);
  const CandidateSpace space = BuildSpace(schema);
  QueryTokens q = EncodeQueries(space, vocab);
  return {vocab, EsalModel<double>(config, space, std::move(q), vocab.size())};
}

Schema TwoCategorySchema(bool reversed) {
  std::vector<std::string> items = {"cough", "fever", "rash"};
  if (reversed) std::reverse(items.begin(), items.end());
  return Schema({{"Symptom", items}, {"Test", {"ecg", "x ray"}}}, {"pos", "neg", "unknown"});
}

WindowInput SampleInput(const Vocab& vocab) {
  WindowInput in;
  for (const char* t : {"[CLS]", "[doc]", "cough", "a", "fever", "[pat]", "yes", "ecg", "[SEP]"}) {
    in.ids.push_back(vocab.Id(t));
  }
  return in;
}

TEST(ModelTest, ShapesAndRanges) {
  Built b = Build(TwoCategorySchema(false), SmallConfig());
  const auto params = b.model.InitParams(3);
  Graph<double> g;
  const auto fw = b.model.Forward(g, params, SampleInput(b.vocab));
  const int j = b.model.space().size();
  EXPECT_EQ(j, 15);
  EXPECT_EQ(fw.probabilities.value().shape(), (std::vector<int>{j, 1}));
  EXPECT_EQ(fw.match.features.value().shape(), (std::vector<int>{j, 16}));
  EXPECT_EQ(fw.evidence.pairs.value().shape(), (std::vector<int>{5, 8}));
  EXPECT_EQ(fw.evidence.statuses.value().shape(), (std::vector<int>{3, 8}));
  for (double p : Probabilities(fw)) {
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
  auto rows_sum_to_one = [](const Tensor<double>& t) {
    for (int r = 0; r < t.rows(); ++r) {
      double s = 0;
      for (double v : t.row(r)) s += v;
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  };
  ASSERT_EQ(fw.gate.weights.size(), 2u);
  for (const auto& w : fw.gate.weights) {
    EXPECT_EQ(w.value().shape(), (std::vector<int>{1, 2}));
    rows_sum_to_one(w.value());
  }
  for (const auto& a : fw.evidence.pair_attention) rows_sum_to_one(a.value());
  rows_sum_to_one(fw.evidence.status_attention.value());
  rows_sum_to_one(fw.match.weights.value());
  for (const auto& w : fw.candidates.pair_pool_weights) rows_sum_to_one(w.value());
}

TEST(ModelTest, WithoutContextFeaturesAreExactConcatenation) {
  Built b = Build(TwoCategorySchema(false), SmallConfig());
  const auto params = b.model.InitParams(4);
  Graph<double> g;
  WindowInput in = SampleInput(b.vocab);
  in.context.push_back(in.ids);  // ignored when K = 0
  const auto fw = b.model.Forward(g, params, in);
  const auto& space = b.model.space();
  const auto& f = fw.match.features.value();
  const auto& qc = fw.evidence.pairs.value();
  const auto& qs = fw.evidence.statuses.value();
  ASSERT_EQ(fw.match.weights.value().cols(), 1);
  for (int i = 0; i < space.size(); ++i) {
    EXPECT_EQ(fw.match.weights.value()[i], 1.0);
    const int p = space.PairOfCandidate(i), s = space.StatusOfCandidate(i);
    for (int c = 0; c < 8; ++c) {
      EXPECT_EQ(f.at(i, c), qc.at(p, c));
      EXPECT_EQ(f.at(i, 8 + c), qs.at(s, c));
    }
  }
}

TEST(ModelTest, SaturatedGateRoutesEachCategoryToItsExpert) {
  Built b = Build(TwoCategorySchema(false), SmallConfig());
  auto params = b.model.InitParams(5);
  for (int c = 0; c < 2; ++c) {
    std::string prefix = b.model.ExpertPrefix(c);
    prefix.replace(0, 6, "gate");
    params.Mutable(prefix + ".w2").Fill(0);
    Tensor<double>& bias = params.Mutable(prefix + ".b2");
    for (int e = 0; e < 2; ++e) bias[e] = e == c ? 1e3 : -1e3;
  }
  Graph<double> g;
  const auto fw = b.model.Forward(g, params, SampleInput(b.vocab));
  for (int c = 0; c < 2; ++c) {
    const auto& w = fw.gate.weights[c].value();
    EXPECT_LT(std::abs(w[1 - c]), 1e-12);
    const auto& mixed = fw.gate.mixed[c].value();
    const auto& own = fw.experts.category[c].value();
    for (int64_t i = 0; i < own.size(); ++i) EXPECT_NEAR(mixed[i], own[i], 1e-12);
  }
}

TEST(ModelTest, ForwardIsDeterministic) {
  Built b = Build(TwoCategorySchema(false), SmallConfig());
  EXPECT_EQ(b.model.InitParams(9), b.model.InitParams(9));
  EXPECT_FALSE(b.model.InitParams(9) == b.model.InitParams(10));
  const auto params = b.model.InitParams(9);
  Graph<double> g1, g2;
  EXPECT_EQ(b.model.Forward(g1, params, SampleInput(b.vocab)).probabilities.value(),
            b.model.Forward(g2, params, SampleInput(b.vocab)).probabilities.value());
}

TEST(ModelTest, SharedCandidateEncodingsGiveTheSameResult) {
  Built b = Build(TwoCategorySchema(false), SmallConfig());
  const auto params = b.model.InitParams(2);
  Graph<double> g1, g2;
  const auto shared = b.model.EncodeCandidates(g2, params);
  const auto first = b.model.Forward(g2, params, SampleInput(b.vocab), shared);
  EXPECT_EQ(b.model.Forward(g1, params, SampleInput(b.vocab)).probabilities.value(),
            first.probabilities.value());
}

// Reordering the items of a category reorders the candidates and nothing
// else: each candidate is scored from its own pair and status only.
TEST(ModelTest, ItemOrderPermutesScores) {
  Built a = Build(TwoCategorySchema(false), SmallConfig());
  Built r = Build(TwoCategorySchema(true), SmallConfig());
  ASSERT_EQ(a.vocab, r.vocab);
  const auto params = a.model.InitParams(6);
  Graph<double> ga, gr;
  const auto pa = Probabilities(a.model.Forward(ga, params, SampleInput(a.vocab)));
  const auto pr = Probabilities(r.model.Forward(gr, params, SampleInput(r.vocab)));
  const Schema& sa = a.model.space().schema();
  const Schema& sr = r.model.space().schema();
  for (int i = 0; i < a.model.space().size(); ++i) {
    const std::string label = FormatLabel(a.model.space().TripleOf(i), sa);
    const int k = r.model.space().IndexOf(ParseLabel(label, sr));
    EXPECT_NEAR(pa[i], pr[k], 1e-12) << label;
  }
}

TEST(ModelTest, ContextWindowsAddMatchColumns) {
  ModelConfig config = SmallConfig();
  config.context_windows = 2;
  Built b = Build(TwoCategorySchema(false), config);
  const auto params = b.model.InitParams(7);
  WindowInput in = SampleInput(b.vocab);
  Graph<double> g0;
  const auto alone = b.model.Forward(g0, params, in);
  EXPECT_EQ(alone.match.weights.value().cols(), 1);
  in.context = {in.ids, {in.ids[0], in.ids[2]}, {in.ids[1]}};
  Graph<double> g;
  const auto fw = b.model.Forward(g, params, in);
  EXPECT_EQ(fw.match.weights.value().shape(), (std::vector<int>{15, 3}));
  EXPECT_EQ(fw.context_status_evidence.size(), 3u);
}

TEST(ModelTest, MaxPoolHeadScoresOneLogitPerCandidate) {
  ModelConfig config = SmallConfig();
  config.score_head = ScoreHead::kMaxPool;
  config.gate_mode = GateMode::kSingle;
  Built b = Build(TwoCategorySchema(false), config);
  const auto params = b.model.InitParams(8);
  Graph<double> g;
  const auto fw = b.model.Forward(g, params, SampleInput(b.vocab));
  EXPECT_EQ(fw.logits.value().shape(), (std::vector<int>{15, 1}));
  EXPECT_EQ(fw.gate.weights.size(), 1u);
}

TEST(ModelTest, ConfigJsonRoundTripAndValidation) {
  ModelConfig c = SmallConfig();
  c.context_windows = 3;
  c.gate_mode = GateMode::kSingle;
  EXPECT_EQ(ModelConfig::FromJson(c.ToJson()), c);
  c.context_windows = -1;
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_THROW(ParseGateMode("both"), ConfigError);
}

TEST(ModelTest, PredictUsesInclusiveThreshold) {
  const std::vector<double> p = {0.2, 0.5, 0.7, 0.49};
  EXPECT_EQ(Predict(p, 0.5), (std::vector<int>{1, 2}));
  EXPECT_THROW(Predict(p, 1.0), ContractError);
}

TEST(ModelTest, EmptyWindowIsRejected) {
  Built b = Build(TwoCategorySchema(false), SmallConfig());
  const auto params = b.model.InitParams(1);
  Graph<double> g;
  EXPECT_THROW(b.model.Forward(g, params, WindowInput{}), ContractError);
}

TEST(ModelTest, ToyModelLossIsFinite) {
  ToyModel toy = MakeToyModel(SmallConfig(), 1);
  Graph<double> g;
  const double loss = ToyLoss(toy, g, toy.params).value()[0];
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_GT(loss, 0.0);
}

}  // namespace
}  // namespace esal
