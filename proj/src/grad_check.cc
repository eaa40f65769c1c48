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

#include "esal/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace esal {

namespace {

double Evaluate(const ParamStore<double>& store, const LossBuilder& loss) {
  Graph<double> g;
  return loss(g, store).value()[0];
}

std::vector<int64_t> SampleCoordinates(int64_t size, int samples, std::mt19937_64& rng) {
  std::vector<int64_t> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  if (size <= samples) return idx;
  for (int i = 0; i < samples; ++i) {
    std::uniform_int_distribution<int64_t> pick(i, size - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(samples);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

GradCheckReport GradCheck(ParamStore<double>& store, const LossBuilder& loss,
                          const GradCheckOptions& options) {
  std::map<std::string, Tensor<double>> analytic;
  {
    Graph<double> g;
    Var<double> l = loss(g, store);
    g.Backward(l);
    analytic = g.ParamGrads();
  }
  const double f0 = Evaluate(store, loss);
  const double eps = options.eps;

  GradCheckReport report;
  std::mt19937_64 rng(options.seed);
  for (auto& [name, tensor] : store.mutable_params()) {
    auto it = analytic.find(name);
    double worst = 0;
    for (int64_t i : SampleCoordinates(tensor.size(), options.samples_per_tensor, rng)) {
      const double saved = tensor[i];
      tensor[i] = saved + eps;
      const double f_plus = Evaluate(store, loss);
      tensor[i] = saved - eps;
      const double f_minus = Evaluate(store, loss);
      tensor[i] = saved;

      const double slope_up = (f_plus - f0) / eps;
      const double slope_down = (f0 - f_minus) / eps;
      if (std::abs(slope_up - slope_down) >
          options.kink_tol * std::max({1.0, std::abs(slope_up), std::abs(slope_down)})) {
        ++report.skipped_kinks;
        continue;
      }
      const double numeric = (f_plus - f_minus) / (2 * eps);
      double a = it == analytic.end() ? 0.0 : it->second[i];
      if (options.negate_analytic) a = -a;
      const double denom = std::max({std::abs(a), std::abs(numeric), options.denom_floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.checked;
      worst = std::max(worst, rel);
      if (rel > report.max_rel_err || report.worst_index < 0) {
        report.max_rel_err = rel;
        report.worst_param = name;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
    report.per_param[name] = worst;
  }
  return report;
}

}  // namespace esal
