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

// Parameterized building blocks. Each layer reads its weights from a
// ParamStore under a name prefix and records its computation into a Graph.
//
// Parameter naming under a prefix P:
//   BiLSTM          P.lstm_fwd.{w_ih,w_hh,b}  P.lstm_bwd.{w_ih,w_hh,b}
//   self-attn pool  P.pool.{w,b}               w:[1,2h] b:[1,1]
//   feed-forward    P.{w1,b1,w2,b2}

#ifndef ESAL_LAYERS_H_
#define ESAL_LAYERS_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>

#include "esal/graph.h"
#include "esal/param_store.h"

namespace esal {

struct LayerDims {
  int embed_dim = 32;
  int lstm_hidden = 32;  // BiLSTM output width is 2 * lstm_hidden
  int gate_hidden = 32;
  int ffn_hidden = 64;

  void Validate() const;
  bool operator==(const LayerDims&) const = default;
};

// Glorot-uniform weights, zero biases, forget-gate bias +1.
class ParamInitializer {
 public:
  explicit ParamInitializer(uint64_t seed) : rng_(seed) {}

  // Glorot uniform: U(-a, a), a = sqrt(6 / (rows + cols)).
  template <typename T>
  void AddMatrix(ParamStore<T>& store, const std::string& name, int rows, int cols);
  template <typename T>
  void AddUniform(ParamStore<T>& store, const std::string& name, int rows, int cols, double bound);
  template <typename T>
  void AddZeros(ParamStore<T>& store, const std::string& name, int rows, int cols);

  template <typename T>
  void AddLstm(ParamStore<T>& store, const std::string& prefix, int input_dim, int hidden);
  template <typename T>
  void AddBiLstm(ParamStore<T>& store, const std::string& prefix, int input_dim, int hidden);
  template <typename T>
  void AddPool(ParamStore<T>& store, const std::string& prefix, int dim);
  template <typename T>
  void AddFfn(ParamStore<T>& store, const std::string& prefix, int in, int hidden, int out);

 private:
  double Uniform(double bound);

  std::mt19937_64 rng_;
};

template <typename T>
struct Attended {
  Var<T> vectors;  // [m, dim]
  Var<T> weights;  // [m, n], rows sum to 1
};

// Row gather from a trainable table; ids outside the table throw
// std::out_of_range. Padding ids are ordinary rows.
template <typename T>
Var<T> EmbeddingForward(Var<T> table, std::span<const int> ids);

// [n,d] -> [n,2h]: forward and backward LSTM outputs concatenated per row.
template <typename T>
Var<T> BiLstmForward(Graph<T>& g, const ParamStore<T>& store, const std::string& prefix, Var<T> x);

// a_j = w . u_j + b, p = softmax(a), c = sum_j p_j u_j.
// Returns c as [1,2h] and p as [1,n].
template <typename T>
Attended<T> SelfAttnPool(Graph<T>& g, const ParamStore<T>& store, const std::string& prefix,
                         Var<T> u);

// Dot-product attention of each query row over the rows of h:
// p = softmax(q h^T), v = p h. queries [m,2h], h [n,2h].
template <typename T>
Attended<T> AttnQuery(Var<T> h, Var<T> queries);

// q^T W k for row vectors q, k; returns [1,1].
template <typename T>
Var<T> BilinearScore(Var<T> w, Var<T> q, Var<T> k);

// tanh(x w1 + b1) w2 + b2, applied row-wise to x [m,in].
template <typename T>
Var<T> FfnForward(Graph<T>& g, const ParamStore<T>& store, const std::string& prefix, Var<T> x);

}  // namespace esal

#endif  // ESAL_LAYERS_H_
