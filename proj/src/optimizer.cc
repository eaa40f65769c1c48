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

#include "esal/optimizer.h"

#include <cmath>

namespace esal {

template <typename T>
double GlobalNorm(const GradMap<T>& grads) {
  double sum = 0;
  for (const auto& [_, g] : grads) {
    for (int64_t i = 0; i < g.size(); ++i) sum += static_cast<double>(g[i]) * g[i];
  }
  return std::sqrt(sum);
}

template <typename T>
double ClipByGlobalNorm(GradMap<T>& grads, double max_norm) {
  const double norm = GlobalNorm(grads);
  if (norm > max_norm) {
    const double factor = max_norm / norm;
    for (auto& [_, g] : grads) {
      for (int64_t i = 0; i < g.size(); ++i) g[i] = static_cast<T>(g[i] * factor);
    }
  }
  return norm;
}

template <typename T>
double MaxAbsGrad(const GradMap<T>& grads) {
  double out = 0;
  for (const auto& [_, g] : grads) {
    for (int64_t i = 0; i < g.size(); ++i) {
      const double a = std::abs(static_cast<double>(g[i]));
      if (std::isnan(a)) return a;
      out = std::max(out, a);
    }
  }
  return out;
}

template <typename T>
void SgdStep(ParamStore<T>& params, const GradMap<T>& grads, double lr) {
  for (const auto& [name, g] : grads) {
    Tensor<T>& p = params.Mutable(name);
    for (int64_t i = 0; i < p.size(); ++i) p[i] = static_cast<T>(p[i] - lr * g[i]);
  }
}

template <typename T>
void AdamStep(ParamStore<T>& params, const GradMap<T>& grads, AdamState<T>& state, double lr,
              const AdamOptions& options) {
  ++state.step;
  const double c1 = 1.0 - std::pow(options.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(options.beta2, static_cast<double>(state.step));
  for (auto& [name, p] : params.mutable_params()) {
    Tensor<T>& m = state.m.try_emplace(name, Tensor<T>(p.shape())).first->second;
    Tensor<T>& v = state.v.try_emplace(name, Tensor<T>(p.shape())).first->second;
    auto git = grads.find(name);
    const Tensor<T>* g = git == grads.end() ? nullptr : &git->second;
    for (int64_t i = 0; i < p.size(); ++i) {
      const double gi = g ? static_cast<double>((*g)[i]) : 0.0;
      const double mi = options.beta1 * m[i] + (1 - options.beta1) * gi;
      const double vi = options.beta2 * v[i] + (1 - options.beta2) * gi * gi;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      p[i] = static_cast<T>(p[i] - lr * (mi / c1) / (std::sqrt(vi / c2) + options.eps));
    }
  }
}

#define ESAL_INSTANTIATE_OPTIMIZER(T)                                                 \
  template double GlobalNorm<T>(const GradMap<T>&);                                   \
  template double ClipByGlobalNorm<T>(GradMap<T>&, double);                           \
  template double MaxAbsGrad<T>(const GradMap<T>&);                                   \
  template void SgdStep<T>(ParamStore<T>&, const GradMap<T>&, double);                \
  template void AdamStep<T>(ParamStore<T>&, const GradMap<T>&, AdamState<T>&, double, \
                            const AdamOptions&);

ESAL_INSTANTIATE_OPTIMIZER(float)
ESAL_INSTANTIATE_OPTIMIZER(double)

}  // namespace esal
