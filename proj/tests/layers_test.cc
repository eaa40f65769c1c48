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

#include "esal/layers.h"

#include <cmath>

#include "esal/errors.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace esal {
namespace {

using testing::RandomMatrix;

double Sigm(double x) { return 1 / (1 + std::exp(-x)); }

// Reference LSTM written out gate by gate.
Tensor<double> ReferenceLstm(const Tensor<double>& x, const Tensor<double>& w_ih,
                             const Tensor<double>& w_hh, const Tensor<double>& b, bool reverse) {
  const int n = x.rows(), d = x.cols(), h = w_hh.rows();
  Tensor<double> out({n, h});
  std::vector<double> hs(h, 0), cs(h, 0);
  for (int step = 0; step < n; ++step) {
    const int t = reverse ? n - 1 - step : step;
    std::vector<double> z(4 * h);
    for (int j = 0; j < 4 * h; ++j) {
      z[j] = b[j];
      for (int k = 0; k < d; ++k) z[j] += x.at(t, k) * w_ih.at(k, j);
      for (int k = 0; k < h; ++k) z[j] += hs[k] * w_hh.at(k, j);
    }
    for (int j = 0; j < h; ++j) {
      const double i = Sigm(z[j]), f = Sigm(z[h + j]), g = std::tanh(z[2 * h + j]),
                   o = Sigm(z[3 * h + j]);
      cs[j] = f * cs[j] + i * g;
      hs[j] = o * std::tanh(cs[j]);
      out.at(t, j) = hs[j];
    }
  }
  return out;
}

TEST(LayersTest, LstmMatchesReferenceInBothDirections) {
  auto x = RandomMatrix(6, 4, 1);
  auto w_ih = RandomMatrix(4, 12, 2);
  auto w_hh = RandomMatrix(3, 12, 3);
  auto b = RandomMatrix(1, 12, 4);
  for (bool reverse : {false, true}) {
    Graph<double> g;
    const Tensor<double>& got =
        LstmSequence(g.Constant(x), g.Constant(w_ih), g.Constant(w_hh), g.Constant(b), reverse)
            .value();
    const Tensor<double> want = ReferenceLstm(x, w_ih, w_hh, b, reverse);
    for (int64_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(LayersTest, BiLstmConcatenatesForwardThenBackward) {
  ParamStore<double> s;
  ParamInitializer(7).AddBiLstm(s, "enc", 4, 3);
  auto x = RandomMatrix(5, 4, 8);
  Graph<double> g;
  const Tensor<double>& out = BiLstmForward(g, s, "enc", g.Constant(x)).value();
  ASSERT_EQ(out.shape(), (std::vector<int>{5, 6}));
  const auto fwd = ReferenceLstm(x, s.Get("enc.lstm_fwd.w_ih"), s.Get("enc.lstm_fwd.w_hh"),
                                 s.Get("enc.lstm_fwd.b"), false);
  const auto bwd = ReferenceLstm(x, s.Get("enc.lstm_bwd.w_ih"), s.Get("enc.lstm_bwd.w_hh"),
                                 s.Get("enc.lstm_bwd.b"), true);
  for (int t = 0; t < 5; ++t) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(out.at(t, j), fwd.at(t, j), 1e-12);
      EXPECT_NEAR(out.at(t, 3 + j), bwd.at(t, j), 1e-12);
    }
  }
}

TEST(LayersTest, InitializerIsSeededAndBounded) {
  ParamStore<double> a, b, c;
  ParamInitializer(1).AddFfn(a, "f", 10, 6, 2);
  ParamInitializer(1).AddFfn(b, "f", 10, 6, 2);
  ParamInitializer(2).AddFfn(c, "f", 10, 6, 2);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == c);
  const double bound = std::sqrt(6.0 / 16);
  for (double v : a.Get("f.w1").values()) EXPECT_LT(std::abs(v), bound);
  for (double v : a.Get("f.b1").values()) EXPECT_EQ(v, 0.0);
}

TEST(LayersTest, LstmForgetBiasStartsAtOne) {
  ParamStore<double> s;
  ParamInitializer(3).AddLstm(s, "l", 4, 5);
  const auto& b = s.Get("l.b");
  ASSERT_EQ(b.shape(), (std::vector<int>{1, 20}));
  for (int j = 0; j < 20; ++j) EXPECT_EQ(b[j], j >= 5 && j < 10 ? 1.0 : 0.0) << j;
}

TEST(LayersTest, SelfAttnPoolIsAConvexCombination) {
  ParamStore<double> s;
  ParamInitializer(4).AddPool(s, "p", 6);
  auto u = RandomMatrix(7, 6, 5);
  Graph<double> g;
  Attended<double> a = SelfAttnPool(g, s, "p", g.Constant(u));
  ASSERT_EQ(a.weights.value().shape(), (std::vector<int>{1, 7}));
  double sum = 0;
  for (double w : a.weights.value().values()) {
    EXPECT_GT(w, 0.0);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  for (int j = 0; j < 6; ++j) {
    double expect = 0;
    for (int t = 0; t < 7; ++t) expect += a.weights.value()[t] * u.at(t, j);
    EXPECT_NEAR(a.vectors.value().at(0, j), expect, 1e-12);
  }
}

TEST(LayersTest, AttnQueryWeightsFollowDotProducts) {
  auto h = RandomMatrix(5, 4, 6);
  auto q = RandomMatrix(3, 4, 7);
  Graph<double> g;
  Attended<double> a = AttnQuery(g.Constant(h), g.Constant(q));
  for (int r = 0; r < 3; ++r) {
    std::vector<double> e(5);
    double z = 0;
    for (int t = 0; t < 5; ++t) {
      double dot = 0;
      for (int k = 0; k < 4; ++k) dot += q.at(r, k) * h.at(t, k);
      e[t] = std::exp(dot);
      z += e[t];
    }
    for (int t = 0; t < 5; ++t) EXPECT_NEAR(a.weights.value().at(r, t), e[t] / z, 1e-12);
  }
}

TEST(LayersTest, BilinearScoreIsQWKTranspose) {
  auto w = RandomMatrix(3, 3, 8);
  auto q = RandomMatrix(2, 3, 9);
  auto k = RandomMatrix(4, 3, 10);
  Graph<double> g;
  const Tensor<double>& s = BilinearScore(g.Constant(w), g.Constant(q), g.Constant(k)).value();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 4; ++j) {
      double expect = 0;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) expect += q.at(i, a) * w.at(a, b) * k.at(j, b);
      }
      EXPECT_NEAR(s.at(i, j), expect, 1e-12);
    }
  }
}

TEST(LayersTest, EmbeddingLooksUpRows) {
  auto table = RandomMatrix(5, 3, 11);
  const std::vector<int> ids = {4, 0, 4};
  Graph<double> g;
  const Tensor<double>& e = EmbeddingForward(g.Constant(table), std::span<const int>(ids)).value();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) EXPECT_EQ(e.at(r, c), table.at(ids[r], c));
  }
}

TEST(LayersTest, DimsMustBePositive) {
  LayerDims d;
  d.lstm_hidden = 0;
  EXPECT_THROW(d.Validate(), ConfigError);
}

}  // namespace
}  // namespace esal
