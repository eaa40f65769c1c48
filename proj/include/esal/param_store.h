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

#ifndef ESAL_PARAM_STORE_H_
#define ESAL_PARAM_STORE_H_

#include <map>
#include <string>
#include <vector>

#include "esal/tensor.h"

namespace esal {

// Named trainable tensors with hierarchical dotted names, e.g.
// "expert.symptom.lstm_fwd.w_ih". Shapes are fixed once added.
template <typename T>
class ParamStore {
 public:
  using Map = std::map<std::string, Tensor<T>>;

  void Add(const std::string& name, Tensor<T> value);
  bool Has(const std::string& name) const { return params_.count(name) > 0; }
  const Tensor<T>& Get(const std::string& name) const;
  Tensor<T>& Mutable(const std::string& name);

  std::vector<std::string> Names() const;
  int64_t NumScalars() const;
  const Map& params() const { return params_; }
  Map& mutable_params() { return params_; }

  template <typename U>
  ParamStore<U> Cast() const {
    ParamStore<U> out;
    for (const auto& [name, t] : params_) out.Add(name, t.template Cast<U>());
    return out;
  }

  bool operator==(const ParamStore&) const = default;

 private:
  Map params_;
};

// Gradient buffers shaped like a store, all zero.
template <typename T>
ParamStore<T> ZerosLike(const ParamStore<T>& store);

}  // namespace esal

#endif  // ESAL_PARAM_STORE_H_
