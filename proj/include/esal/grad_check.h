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

#ifndef ESAL_GRAD_CHECK_H_
#define ESAL_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "esal/graph.h"
#include "esal/param_store.h"

namespace esal {

struct GradCheckOptions {
  double eps = 1e-5;
  // Coordinates per tensor; smaller tensors are checked exhaustively.
  int samples_per_tensor = 200;
  uint64_t seed = 0;
  // Denominator floor of the relative error, so coordinates whose true
  // gradient is ~0 are judged by absolute error.
  double denom_floor = 1e-6;
  // A coordinate whose one-sided slopes differ by more than this (relative)
  // sits on a kink (e.g. ReLU at 0) and is excluded.
  double kink_tol = 1e-2;
  // Test hook: negate every analytic gradient to prove the checker fails.
  bool negate_analytic = false;
};

struct GradCheckReport {
  double max_rel_err = 0;
  std::string worst_param;
  int64_t worst_index = -1;
  double worst_analytic = 0;
  double worst_numeric = 0;
  int64_t checked = 0;
  int64_t skipped_kinks = 0;
  std::map<std::string, double> per_param;  // max rel-err per tensor

  bool Passed(double tolerance) const { return max_rel_err < tolerance; }
};

using LossBuilder = std::function<Var<double>(Graph<double>&, const ParamStore<double>&)>;

// Compares autodiff gradients of loss(store) against central differences
//   (f(theta + eps e_i) - f(theta - eps e_i)) / 2 eps
// on sampled coordinates of every tensor in the store. The store is
// perturbed in place and restored before returning.
GradCheckReport GradCheck(ParamStore<double>& store, const LossBuilder& loss,
                          const GradCheckOptions& options = {});

}  // namespace esal

#endif  // ESAL_GRAD_CHECK_H_
