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

#ifndef ESAL_OPTIMIZER_H_
#define ESAL_OPTIMIZER_H_

#include <cstdint>
#include <map>
#include <string>

#include "esal/param_store.h"
#include "esal/tensor.h"

namespace esal {

template <typename T>
using GradMap = std::map<std::string, Tensor<T>>;

// sqrt of the sum of squares over every gradient tensor (double accumulator).
template <typename T>
double GlobalNorm(const GradMap<T>& grads);

// Rescales all gradients by max_norm / norm when norm > max_norm. Returns
// the norm before clipping.
template <typename T>
double ClipByGlobalNorm(GradMap<T>& grads, double max_norm);

// Largest |g| over all gradients; NaN if any entry is NaN.
template <typename T>
double MaxAbsGrad(const GradMap<T>& grads);

// theta -= lr * g. Params without a gradient entry are left alone.
template <typename T>
void SgdStep(ParamStore<T>& params, const GradMap<T>& grads, double lr);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct AdamState {
  GradMap<T> m;
  GradMap<T> v;
  int64_t step = 0;
};

// Bias-corrected Adam. Every parameter takes part in each step; a missing
// gradient counts as zero.
template <typename T>
void AdamStep(ParamStore<T>& params, const GradMap<T>& grads, AdamState<T>& state, double lr,
              const AdamOptions& options = {});

}  // namespace esal

#endif  // ESAL_OPTIMIZER_H_
