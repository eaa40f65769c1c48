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

// Finite-difference checks of every layer and of the assembled model on a
// toy configuration (f64, embed 4, hidden 3, two categories, 6-token
// window).

#ifndef ESAL_CHECK_SUITE_H_
#define ESAL_CHECK_SUITE_H_

#include <string>
#include <vector>

#include "esal/grad_check.h"
#include "esal/model.h"

namespace esal {

struct NamedCheck {
  std::string name;
  GradCheckReport report;
};

// The toy model used by the full-model checks.
struct ToyModel {
  EsalModel<double> model;
  ParamStore<double> params;
  WindowInput input;
  Tensor<double> target;  // [J,1]
};

ToyModel MakeToyModel(const ModelConfig& config, uint64_t seed);

// Loss of one toy window: mean BCE of the logits against the toy target.
Var<double> ToyLoss(const ToyModel& toy, Graph<double>& g, const ParamStore<double>& params);

// Layer checks first, then two full-model variants (per-category gate with
// one context window and scalar head; single gate, no context, max-pool
// head).
std::vector<NamedCheck> RunGradCheckSuite(const GradCheckOptions& options);

}  // namespace esal

#endif  // ESAL_CHECK_SUITE_H_
