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

#ifndef ESAL_TESTS_TEST_UTIL_H_
#define ESAL_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <random>
#include <string>

#include "esal/graph.h"
#include "esal/param_store.h"
#include "esal/tensor.h"
#include "esal/util.h"

namespace esal::testing {

inline std::string SourcePath(const std::string& relative) {
  return std::string(ESAL_SOURCE_DIR) + "/" + relative;
}

inline Tensor<double> RandomMatrix(int rows, int cols, uint64_t seed, double lo = -1,
                                   double hi = 1) {
  std::mt19937_64 rng(seed);
  Tensor<double> t({rows, cols});
  for (int64_t i = 0; i < t.size(); ++i) t[i] = lo + (hi - lo) * UnitFromBits(rng());
  return t;
}

// sum(out * R) for a fixed random R: a scalar whose gradient reaches every
// output entry with a different weight.
template <typename T>
Var<T> Probe(Var<T> out, uint64_t seed) {
  Tensor<double> r = RandomMatrix(out.rows(), out.cols(), seed);
  return Sum(Mul(out, out.graph->Constant(r.Cast<T>())));
}

}  // namespace esal::testing

#endif  // ESAL_TESTS_TEST_UTIL_H_
