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

#include "esal/graph.h"

#include <cmath>
#include <functional>

#include "esal/errors.h"
#include "esal/grad_check.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace esal {
namespace {

using testing::Probe;
using testing::RandomMatrix;
using Op = std::function<Var<double>(Graph<double>&, const ParamStore<double>&)>;

double MaxRelErr(ParamStore<double> store, const Op& op) {
  GradCheckOptions options;
  options.samples_per_tensor = 1000;
  return GradCheck(store, op, options).max_rel_err;
}

Var<double> P(Graph<double>& g, const ParamStore<double>& s, const char* name) {
  return g.Param(name, s.Get(name));
}

TEST(GraphTest, MatMulMatchesNaiveProduct) {
  Graph<double> g;
  auto a = RandomMatrix(3, 4, 1);
  auto b = RandomMatrix(4, 2, 2);
  const Tensor<double>& c = MatMul(g.Constant(a), g.Constant(b)).value();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      double expect = 0;
      for (int k = 0; k < 4; ++k) expect += a.at(i, k) * b.at(k, j);
      EXPECT_NEAR(c.at(i, j), expect, 1e-12);
    }
  }
}

TEST(GraphTest, MatMulRejectsMismatchedShapes) {
  Graph<double> g;
  EXPECT_THROW(MatMul(g.Constant(Tensor<double>({2, 3})), g.Constant(Tensor<double>({2, 3}))),
               ShapeError);
}

TEST(GraphTest, SoftmaxRowsSumToOneAndIsShiftInvariant) {
  Graph<double> g;
  auto x = RandomMatrix(4, 7, 3, -50, 50);
  const Tensor<double>& s = SoftmaxRows(g.Constant(x)).value();
  auto shifted = x;
  for (int64_t i = 0; i < shifted.size(); ++i) shifted[i] += 1000;
  const Tensor<double>& s2 = SoftmaxRows(g.Constant(shifted)).value();
  for (int r = 0; r < 4; ++r) {
    double sum = 0;
    for (int c = 0; c < 7; ++c) {
      sum += s.at(r, c);
      EXPECT_NEAR(s.at(r, c), s2.at(r, c), 1e-12);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(GraphTest, MaxReducePicksFirstOfTies) {
  Graph<double> g;
  Var<double> x = g.Input(Tensor<double>::FromRows({{1, 5, 5}, {2, 0, -1}}));
  Var<double> m = MaxReduce(x, 1);
  EXPECT_EQ(m.value(), Tensor<double>::FromRows({{5}, {2}}));
  g.Backward(Sum(m));
  EXPECT_EQ(g.Grad(x), Tensor<double>::FromRows({{0, 1, 0}, {1, 0, 0}}));
}

TEST(GraphTest, BceWithLogitsIsStableForLargeLogits) {
  Graph<double> g;
  Var<double> z = g.Constant(Tensor<double>::FromRows({{800, -800}}));
  Tensor<double> y = Tensor<double>::FromRows({{1, 0}});
  const double loss = BceWithLogits(z, y).value()[0];
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_NEAR(loss, 0.0, 1e-12);
}

TEST(GraphTest, BceWithLogitsGradientIsSigmoidMinusTargetOverCount) {
  Graph<double> g;
  Var<double> z = g.Input(Tensor<double>::FromRows({{0.3, -1.2}, {2.0, 0.0}}));
  Tensor<double> y = Tensor<double>::FromRows({{1, 0}, {0, 1}});
  g.Backward(BceWithLogits(z, y));
  const Tensor<double> grad = g.Grad(z);
  for (int64_t i = 0; i < 4; ++i) {
    const double s = 1 / (1 + std::exp(-z.value()[i]));
    EXPECT_NEAR(grad[i], (s - y[i]) / 4, 1e-12);
  }
}

TEST(GraphTest, BackwardTwiceIsAContractError) {
  Graph<double> g;
  Var<double> x = g.Input(Tensor<double>({1, 1}, 2.0));
  Var<double> y = Sum(Mul(x, x));
  g.Backward(y);
  EXPECT_THROW(g.Backward(y), ContractError);
}

TEST(GraphTest, BackwardNeedsAScalar) {
  Graph<double> g;
  Var<double> x = g.Input(Tensor<double>({2, 1}, 2.0));
  EXPECT_THROW(g.Backward(x), ContractError);
}

TEST(GraphTest, ConstantsReceiveNoGradient) {
  Graph<double> g;
  Var<double> c = g.Constant(Tensor<double>({1, 2}, 3.0));
  Var<double> x = g.Input(Tensor<double>({1, 2}, 2.0));
  g.Backward(Sum(Mul(c, x)));
  EXPECT_FALSE(g.RequiresGrad(c.id));
  EXPECT_EQ(g.Grad(c), Tensor<double>({1, 2}));
  EXPECT_EQ(g.Grad(x), Tensor<double>({1, 2}, 3.0));
}

TEST(GraphTest, GatherRowsRejectsBadIds) {
  Graph<double> g;
  Var<double> t = g.Constant(Tensor<double>({3, 2}));
  const std::vector<int> ids = {0, 3};
  EXPECT_THROW(GatherRows(t, std::span<const int>(ids)), std::out_of_range);
}

TEST(GraphTest, GatherRowsAccumulatesRepeatedRows) {
  Graph<double> g;
  Var<double> t = g.Input(Tensor<double>({3, 2}));
  const std::vector<int> ids = {1, 1, 2};
  g.Backward(Sum(GatherRows(t, std::span<const int>(ids))));
  EXPECT_EQ(g.Grad(t), Tensor<double>::FromRows({{0, 0}, {2, 2}, {1, 1}}));
}

TEST(GraphTest, LogOfNonPositiveIsAContractError) {
  Graph<double> g;
  EXPECT_THROW(Log(g.Constant(Tensor<double>({1, 1}, 0.0))), ContractError);
}

TEST(GraphTest, ParamGradsAreZeroForUnusedParams) {
  ParamStore<double> s;
  s.Add("used", Tensor<double>({1, 1}, 2.0));
  s.Add("unused", Tensor<double>({2, 2}, 1.0));
  Graph<double> g;
  Var<double> u = g.Param("used", s.Get("used"));
  g.Param("unused", s.Get("unused"));
  g.Backward(Sum(Mul(u, u)));
  auto grads = g.ParamGrads();
  EXPECT_EQ(grads.at("used")[0], 4.0);
  EXPECT_EQ(grads.at("unused"), Tensor<double>({2, 2}));
}

TEST(GraphTest, ParamNameBoundToTwoTensorsIsRejected) {
  Tensor<double> a({1, 1}), b({1, 1});
  Graph<double> g;
  g.Param("w", a);
  EXPECT_THROW(g.Param("w", b), ContractError);
}

// Every op against central differences.
struct OpCase {
  const char* name;
  std::function<ParamStore<double>()> store;
  Op op;
};

ParamStore<double> Store2(std::vector<int> a, std::vector<int> b, uint64_t seed) {
  ParamStore<double> s;
  s.Add("a", RandomMatrix(a[0], a[1], seed));
  if (!b.empty()) s.Add("b", RandomMatrix(b[0], b[1], seed + 1));
  return s;
}

class OpGradientTest : public ::testing::TestWithParam<OpCase> {};

TEST_P(OpGradientTest, MatchesFiniteDifferences) {
  EXPECT_LT(MaxRelErr(GetParam().store(), GetParam().op), 1e-6) << GetParam().name;
}

const std::vector<int> kIds = {2, 0, 2, 1};

INSTANTIATE_TEST_SUITE_P(
    AllOps, OpGradientTest,
    ::testing::Values(
        OpCase{"matmul", [] { return Store2({3, 4}, {4, 2}, 1); },
               [](auto& g, auto& s) { return Probe(MatMul(P(g, s, "a"), P(g, s, "b")), 9); }},
        OpCase{"transpose", [] { return Store2({3, 4}, {}, 2); },
               [](auto& g, auto& s) { return Probe(Transpose(P(g, s, "a")), 9); }},
        OpCase{"add", [] { return Store2({2, 3}, {2, 3}, 3); },
               [](auto& g, auto& s) { return Probe(Add(P(g, s, "a"), P(g, s, "b")), 9); }},
        OpCase{"sub", [] { return Store2({2, 3}, {2, 3}, 4); },
               [](auto& g, auto& s) { return Probe(Sub(P(g, s, "a"), P(g, s, "b")), 9); }},
        OpCase{"mul", [] { return Store2({2, 3}, {2, 3}, 5); },
               [](auto& g, auto& s) { return Probe(Mul(P(g, s, "a"), P(g, s, "b")), 9); }},
        OpCase{"tanh", [] { return Store2({2, 3}, {}, 6); },
               [](auto& g, auto& s) { return Probe(Tanh(P(g, s, "a")), 9); }},
        OpCase{"sigmoid", [] { return Store2({2, 3}, {}, 7); },
               [](auto& g, auto& s) { return Probe(Sigmoid(P(g, s, "a")), 9); }},
        OpCase{"exp", [] { return Store2({2, 3}, {}, 8); },
               [](auto& g, auto& s) { return Probe(Exp(P(g, s, "a")), 9); }},
        OpCase{"log",
               [] {
                 ParamStore<double> s;
                 s.Add("a", RandomMatrix(2, 3, 9, 0.5, 2.0));
                 return s;
               },
               [](auto& g, auto& s) { return Probe(Log(P(g, s, "a")), 9); }},
        OpCase{"relu", [] { return Store2({3, 3}, {}, 10); },
               [](auto& g, auto& s) { return Probe(Relu(P(g, s, "a")), 9); }},
        OpCase{"scale", [] { return Store2({2, 3}, {}, 11); },
               [](auto& g, auto& s) { return Probe(Scale(P(g, s, "a"), 0.7), 9); }},
        OpCase{"mul_scalar", [] { return Store2({2, 3}, {1, 1}, 12); },
               [](auto& g, auto& s) { return Probe(MulScalar(P(g, s, "a"), P(g, s, "b")), 9); }},
        OpCase{"add_bias", [] { return Store2({3, 4}, {1, 4}, 13); },
               [](auto& g, auto& s) { return Probe(AddBias(P(g, s, "a"), P(g, s, "b")), 9); }},
        OpCase{"scale_rows", [] { return Store2({3, 4}, {3, 1}, 14); },
               [](auto& g, auto& s) { return Probe(ScaleRows(P(g, s, "a"), P(g, s, "b")), 9); }},
        OpCase{"concat0", [] { return Store2({2, 3}, {1, 3}, 15); },
               [](auto& g, auto& s) {
                 return Probe(Concat<double>({P(g, s, "a"), P(g, s, "b")}, 0), 9);
               }},
        OpCase{"concat1", [] { return Store2({2, 3}, {2, 2}, 16); },
               [](auto& g, auto& s) {
                 return Probe(Concat<double>({P(g, s, "a"), P(g, s, "b")}, 1), 9);
               }},
        OpCase{"slice", [] { return Store2({4, 5}, {}, 17); },
               [](auto& g, auto& s) {
                 return Add(Probe(Slice(P(g, s, "a"), 0, 1, 3), 9),
                            Probe(Slice(P(g, s, "a"), 1, 2, 5), 8));
               }},
        OpCase{"reshape", [] { return Store2({2, 6}, {}, 18); },
               [](auto& g, auto& s) { return Probe(Reshape(P(g, s, "a"), 3, 4), 9); }},
        OpCase{"gather_rows", [] { return Store2({3, 4}, {}, 19); },
               [](auto& g, auto& s) {
                 return Probe(GatherRows(P(g, s, "a"), std::span<const int>(kIds)), 9);
               }},
        OpCase{"sum_mean", [] { return Store2({2, 3}, {}, 20); },
               [](auto& g, auto& s) {
                 Var<double> a = P(g, s, "a");
                 return Add(Mul(Sum(a), Sum(a)), Mean(Tanh(a)));
               }},
        OpCase{"sum_axis", [] { return Store2({3, 4}, {}, 21); },
               [](auto& g, auto& s) {
                 return Add(Probe(SumAxis(P(g, s, "a"), 0), 9), Probe(SumAxis(P(g, s, "a"), 1), 8));
               }},
        OpCase{"mean_axis", [] { return Store2({3, 4}, {}, 22); },
               [](auto& g, auto& s) {
                 return Add(Probe(MeanAxis(P(g, s, "a"), 0), 9),
                            Probe(MeanAxis(P(g, s, "a"), 1), 8));
               }},
        OpCase{"max_reduce", [] { return Store2({3, 4}, {}, 23); },
               [](auto& g, auto& s) {
                 return Add(Probe(MaxReduce(P(g, s, "a"), 0), 9),
                            Probe(MaxReduce(P(g, s, "a"), 1), 8));
               }},
        OpCase{"softmax_rows", [] { return Store2({3, 5}, {}, 24); },
               [](auto& g, auto& s) { return Probe(SoftmaxRows(P(g, s, "a")), 9); }},
        OpCase{"lstm_forward",
               [] {
                 ParamStore<double> s;
                 s.Add("x", RandomMatrix(5, 3, 25));
                 s.Add("w_ih", RandomMatrix(3, 8, 26));
                 s.Add("w_hh", RandomMatrix(2, 8, 27));
                 s.Add("b", RandomMatrix(1, 8, 28));
                 return s;
               },
               [](auto& g, auto& s) {
                 return Probe(LstmSequence(P(g, s, "x"), P(g, s, "w_ih"), P(g, s, "w_hh"),
                                           P(g, s, "b"), false),
                              9);
               }},
        OpCase{"lstm_reverse",
               [] {
                 ParamStore<double> s;
                 s.Add("x", RandomMatrix(4, 3, 29));
                 s.Add("w_ih", RandomMatrix(3, 12, 30));
                 s.Add("w_hh", RandomMatrix(3, 12, 31));
                 s.Add("b", RandomMatrix(1, 12, 32));
                 return s;
               },
               [](auto& g, auto& s) {
                 return Probe(LstmSequence(P(g, s, "x"), P(g, s, "w_ih"), P(g, s, "w_hh"),
                                           P(g, s, "b"), true),
                              9);
               }}),
    [](const ::testing::TestParamInfo<OpCase>& info) { return std::string(info.param.name); });

}  // namespace
}  // namespace esal
