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
#include "esal/util.h"

namespace esal {

void LayerDims::Validate() const {
  if (embed_dim < 1 || lstm_hidden < 1 || gate_hidden < 1 || ffn_hidden < 1) {
    throw ConfigError("all layer dimensions must be >= 1");
  }
}

double ParamInitializer::Uniform(double bound) {
  // Open interval (-bound, bound).
  for (;;) {
    const double v = -bound + 2.0 * bound * UnitFromBits(rng_());
    if (v > -bound) return v;
  }
}

template <typename T>
void ParamInitializer::AddMatrix(ParamStore<T>& store, const std::string& name, int rows,
                                 int cols) {
  AddUniform(store, name, rows, cols, std::sqrt(6.0 / (rows + cols)));
}

template <typename T>
void ParamInitializer::AddUniform(ParamStore<T>& store, const std::string& name, int rows, int cols,
                                  double bound) {
  Tensor<T> t({rows, cols});
  for (int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(Uniform(bound));
  store.Add(name, std::move(t));
}

template <typename T>
void ParamInitializer::AddZeros(ParamStore<T>& store, const std::string& name, int rows, int cols) {
  store.Add(name, Tensor<T>({rows, cols}));
}

template <typename T>
void ParamInitializer::AddLstm(ParamStore<T>& store, const std::string& prefix, int input_dim,
                               int hidden) {
  AddMatrix(store, prefix + ".w_ih", input_dim, 4 * hidden);
  AddMatrix(store, prefix + ".w_hh", hidden, 4 * hidden);
  Tensor<T> bias({1, 4 * hidden});
  for (int k = hidden; k < 2 * hidden; ++k) bias[k] = T(1);
  store.Add(prefix + ".b", std::move(bias));
}

template <typename T>
void ParamInitializer::AddBiLstm(ParamStore<T>& store, const std::string& prefix, int input_dim,
                                 int hidden) {
  AddLstm(store, prefix + ".lstm_fwd", input_dim, hidden);
  AddLstm(store, prefix + ".lstm_bwd", input_dim, hidden);
}

template <typename T>
void ParamInitializer::AddPool(ParamStore<T>& store, const std::string& prefix, int dim) {
  AddMatrix(store, prefix + ".pool.w", 1, dim);
  AddZeros(store, prefix + ".pool.b", 1, 1);
}

template <typename T>
void ParamInitializer::AddFfn(ParamStore<T>& store, const std::string& prefix, int in, int hidden,
                              int out) {
  AddMatrix(store, prefix + ".w1", in, hidden);
  AddZeros(store, prefix + ".b1", 1, hidden);
  AddMatrix(store, prefix + ".w2", hidden, out);
  AddZeros(store, prefix + ".b2", 1, out);
}

template <typename T>
Var<T> EmbeddingForward(Var<T> table, std::span<const int> ids) {
  return GatherRows(table, ids);
}

template <typename T>
Var<T> BiLstmForward(Graph<T>& g, const ParamStore<T>& store, const std::string& prefix, Var<T> x) {
  auto direction = [&](const std::string& dir, bool reverse) {
    const std::string p = prefix + "." + dir;
    return LstmSequence(x, g.Param(p + ".w_ih", store.Get(p + ".w_ih")),
                        g.Param(p + ".w_hh", store.Get(p + ".w_hh")),
                        g.Param(p + ".b", store.Get(p + ".b")), reverse);
  };
  return Concat<T>({direction("lstm_fwd", false), direction("lstm_bwd", true)}, 1);
}

template <typename T>
Attended<T> SelfAttnPool(Graph<T>& g, const ParamStore<T>& store, const std::string& prefix,
                         Var<T> u) {
  Var<T> w = g.Param(prefix + ".pool.w", store.Get(prefix + ".pool.w"));
  Var<T> b = g.Param(prefix + ".pool.b", store.Get(prefix + ".pool.b"));
  Var<T> scores = AddBias(MatMul(u, Transpose(w)), b);  // [n,1]
  Var<T> weights = SoftmaxRows(Transpose(scores));      // [1,n]
  return {MatMul(weights, u), weights};
}

template <typename T>
Attended<T> AttnQuery(Var<T> h, Var<T> queries) {
  Var<T> weights = SoftmaxRows(MatMul(queries, Transpose(h)));
  return {MatMul(weights, h), weights};
}

template <typename T>
Var<T> BilinearScore(Var<T> w, Var<T> q, Var<T> k) {
  return MatMul(MatMul(q, w), Transpose(k));
}

template <typename T>
Var<T> FfnForward(Graph<T>& g, const ParamStore<T>& store, const std::string& prefix, Var<T> x) {
  auto param = [&](const char* leaf) {
    const std::string name = prefix + "." + leaf;
    return g.Param(name, store.Get(name));
  };
  Var<T> hidden = Tanh(AddBias(MatMul(x, param("w1")), param("b1")));
  return AddBias(MatMul(hidden, param("w2")), param("b2"));
}

#define ESAL_INSTANTIATE_LAYERS(T)                                                               \
  template void ParamInitializer::AddMatrix<T>(ParamStore<T>&, const std::string&, int, int);    \
  template void ParamInitializer::AddUniform<T>(ParamStore<T>&, const std::string&, int, int,    \
                                                double);                                         \
  template void ParamInitializer::AddZeros<T>(ParamStore<T>&, const std::string&, int, int);     \
  template void ParamInitializer::AddLstm<T>(ParamStore<T>&, const std::string&, int, int);      \
  template void ParamInitializer::AddBiLstm<T>(ParamStore<T>&, const std::string&, int, int);    \
  template void ParamInitializer::AddPool<T>(ParamStore<T>&, const std::string&, int);           \
  template void ParamInitializer::AddFfn<T>(ParamStore<T>&, const std::string&, int, int, int);  \
  template Var<T> EmbeddingForward<T>(Var<T>, std::span<const int>);                             \
  template Var<T> BiLstmForward<T>(Graph<T>&, const ParamStore<T>&, const std::string&, Var<T>); \
  template Attended<T> SelfAttnPool<T>(Graph<T>&, const ParamStore<T>&, const std::string&,      \
                                       Var<T>);                                                  \
  template Attended<T> AttnQuery<T>(Var<T>, Var<T>);                                             \
  template Var<T> BilinearScore<T>(Var<T>, Var<T>, Var<T>);                                      \
  template Var<T> FfnForward<T>(Graph<T>&, const ParamStore<T>&, const std::string&, Var<T>);

ESAL_INSTANTIATE_LAYERS(float)
ESAL_INSTANTIATE_LAYERS(double)

}  // namespace esal
